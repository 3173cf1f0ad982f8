#include "floquet/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "floquet/block_cache.hpp"
#include "floquet/errors.hpp"
#include "floquet/parallel.hpp"

namespace floquet {

double fold_quasienergy(double raw, double omega) {
    double r = std::fmod(raw + 0.5 * omega, omega);
    if (r < 0.0) r += omega;
    if (r >= omega) r = 0.0;
    return r - 0.5 * omega;
}

double circular_distance(double a, double b, double omega) {
    double d = std::fmod(std::abs(a - b), omega);
    return std::min(d, omega - d);
}

double multiset_distance(std::vector<double> a, std::vector<double> b, double omega) {
    if (a.size() != b.size()) throw IndexOutOfRange("multisets differ in size");
    if (a.empty()) return 0.0;
    auto fold = [omega](double& v) { v = fold_quasienergy(v, omega); };
    std::for_each(a.begin(), a.end(), fold);
    std::for_each(b.begin(), b.end(), fold);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n; ++s) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n && worst < best; ++i)
            worst = std::max(worst, circular_distance(a[i], b[(i + s) % n], omega));
        best = std::min(best, worst);
    }
    return best;
}

double mirror_asymmetry(const Spectrum& spectrum) {
    const int K = spectrum.points();
    double worst = 0.0;
    for (int k = 0; k < K / 2 + 1; ++k) {
        if (std::abs(spectrum.kappas[k] + spectrum.kappas[K - 1 - k]) > 1e-12 * (1.0 + std::abs(spectrum.kappas[k])))
            throw IndexOutOfRange("kappa grid is not mirror symmetric");
        worst = std::max(worst, multiset_distance(spectrum.energies[k], spectrum.energies[K - 1 - k], spectrum.omega));
    }
    return worst;
}

CMatrix Diagonalization::vectors() const {
    if (modes.empty()) return {};
    CMatrix V(modes.front().components.size(), static_cast<Eigen::Index>(modes.size()));
    for (std::size_t a = 0; a < modes.size(); ++a) V.col(static_cast<Eigen::Index>(a)) = modes[a].components;
    return V;
}

CVector shift_operator_diagonal(double kappa, const ValidatedConfig& cfg) {
    const int D = cfg.dim();
    const int np = cfg.n_cells();
    const double L = cfg.lattice().barrier_spacing;
    CVector s(D);
    for (int r = 0; r < D; ++r) s(r) = std::polar(1.0, -(2.0 * pi * cfg.mu_of(r) / np + kappa * L));
    return s;
}

namespace {

// Groups eigenvalue indices whose mutual chain distance is below tol.
std::vector<std::vector<int>> clusters(const CVector& lambda, double tol) {
    const int n = static_cast<int>(lambda.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::arg(lambda(a)) < std::arg(lambda(b)); });
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < n; ++i) {
        if (!groups.empty() && std::abs(lambda(order[i]) - lambda(groups.back().back())) < tol)
            groups.back().push_back(order[i]);
        else
            groups.push_back({order[i]});
    }
    if (groups.size() > 1 && std::abs(lambda(groups.front().front()) - lambda(groups.back().back())) < tol) {
        groups.front().insert(groups.front().end(), groups.back().begin(), groups.back().end());
        groups.pop_back();
    }
    return groups;
}

}  // namespace

Diagonalization diagonalize(const CMatrix& U, double kappa, const ValidatedConfig& cfg, int start_index) {
    if (U.rows() != U.cols() || U.rows() != cfg.dim()) throw EigenFailure("propagator shape does not match basis");
    Eigen::ComplexSchur<CMatrix> schur(U);
    if (schur.info() != Eigen::Success) throw EigenFailure("Schur decomposition did not converge");

    CMatrix Q = schur.matrixU();
    CVector lambda = schur.matrixT().diagonal();

    const CVector shift = shift_operator_diagonal(kappa, cfg);
    for (const auto& group : clusters(lambda, cfg.tolerances().degeneracy)) {
        if (group.size() < 2) continue;
        const Eigen::Index k = static_cast<Eigen::Index>(group.size());
        CMatrix Qc(Q.rows(), k);
        for (Eigen::Index c = 0; c < k; ++c) Qc.col(c) = Q.col(group[c]);
        const CMatrix B = Qc.adjoint() * shift.asDiagonal() * Qc;
        Eigen::ComplexSchur<CMatrix> inner(B);
        if (inner.info() != Eigen::Success) throw EigenFailure("cluster rotation did not converge");
        Qc = Qc * inner.matrixU();
        for (Eigen::Index c = 0; c < k; ++c) Q.col(group[c]) = Qc.col(c);
    }

    const CMatrix UQ = U * Q;
    const int D = cfg.dim();
    const int w = cfg.truncation().interior_window;
    const double T = cfg.period();

    Diagonalization out;
    out.modes.resize(D);
    for (int a = 0; a < D; ++a) {
        FloquetMode& m = out.modes[a];
        m.kappa = kappa;
        m.start_index = start_index;
        m.components = Q.col(a);
        m.eigenvalue = Q.col(a).dot(UQ.col(a));
        m.residual = (UQ.col(a) - m.eigenvalue * Q.col(a)).norm();
        m.quasienergy = fold_quasienergy(-std::arg(m.eigenvalue) / T, cfg.omega());
        const double edge = m.components.head(w).squaredNorm() + m.components.tail(w).squaredNorm();
        if (edge < 0.5) out.max_modulus_deviation = std::max(out.max_modulus_deviation, std::abs(std::abs(m.eigenvalue) - 1.0));
    }
    std::stable_sort(out.modes.begin(), out.modes.end(),
                     [](const FloquetMode& a, const FloquetMode& b) { return a.quasienergy < b.quasienergy; });
    for (int a = 0; a < D; ++a) out.modes[a].band = a;

    if (out.max_modulus_deviation > cfg.tolerances().eig)
        out.warnings.push_back("NonUnitaryWarning: interior |lambda| deviates by " +
                               std::to_string(out.max_modulus_deviation) + " at kappa " + std::to_string(kappa));
    return out;
}

ShiftClass shift_class(const CVector& components, double kappa, const ValidatedConfig& cfg) {
    const CVector s = shift_operator_diagonal(kappa, cfg);
    const CVector image = s.cwiseProduct(components);
    const double norm2 = components.squaredNorm();
    ShiftClass out;
    out.eigenvalue = components.dot(image) / norm2;
    out.residual = (image - out.eigenvalue * components).norm() / std::sqrt(norm2);
    if (out.residual < cfg.tolerances().shift) {
        const int np = cfg.n_cells();
        const double L = cfg.lattice().barrier_spacing;
        const double phase = std::arg(out.eigenvalue * std::polar(1.0, kappa * L));
        const long q = std::lround(-phase * np / (2.0 * pi));
        out.q = static_cast<int>(((q % np) + np) % np);
    }
    return out;
}

ShiftClass shift_class(const FloquetMode& mode, const ValidatedConfig& cfg) {
    return shift_class(mode.components, mode.kappa, cfg);
}

double edge_weight(const CVector& components, const ValidatedConfig& cfg) {
    double w = 0.0;
    for (int r = 0; r < cfg.dim(); ++r)
        if (!cfg.interior(cfg.mu_of(r))) w += std::norm(components(r));
    return w;
}

void attach_trajectory(FloquetMode& mode, const BlockSet& blocks, const ValidatedConfig& cfg) {
    const int N = cfg.n_steps();
    if (blocks.size() != N) throw IndexOutOfRange("block set does not cover one period");
    const double dt = cfg.dt();
    mode.trajectory.clear();
    mode.trajectory.reserve(N + 1);
    CVector v = mode.components;
    mode.trajectory.push_back(v);
    for (int j = 1; j <= N; ++j) {
        v = blocks.block((mode.start_index + j - 1) % N + 1) * v;
        mode.trajectory.push_back(std::polar(1.0, mode.quasienergy * j * dt) * v);
    }
}

int Spectrum::follow(int band, int from, int to) const {
    if (from < 0 || to < 0 || from >= points() || to >= points())
        throw IndexOutOfRange("grid index outside spectrum");
    int b = band;
    for (int k = from; k < to; ++k) b = continuation[k][b];
    for (int k = from; k > to; --k) {
        const auto& perm = continuation[k - 1];
        b = static_cast<int>(std::find(perm.begin(), perm.end(), b) - perm.begin());
    }
    return b;
}

BlockSource direct_block_source(const ValidatedConfig& cfg) {
    return [cfg](double kappa) { return build_blocks(kappa, cfg); };
}

BlockSource cached_block_source(const ValidatedConfig& cfg, BlockCache& cache) {
    return [cfg, &cache](double kappa) { return cache.get_or_build(cfg, kappa); };
}

std::vector<double> zone_grid(int points, const ValidatedConfig& cfg) {
    if (points < 1) throw IndexOutOfRange("kappa grid needs at least one point");
    if (points == 1) return {0.0};
    std::vector<double> grid(points);
    const double edge = cfg.zone_edge();
    for (int i = 0; i < points; ++i) grid[i] = -edge + 2.0 * edge * i / (points - 1);
    // Exact symmetry about zero keeps +-kappa pairs bitwise opposite.
    for (int i = 0; i < points / 2; ++i) grid[points - 1 - i] = -grid[i];
    if (points % 2 == 1) grid[points / 2] = 0.0;
    return grid;
}

namespace {

std::vector<int> match_by_overlap(const CMatrix& from, const CMatrix& to, const std::vector<double>& e_from,
                                  const std::vector<double>& e_to, double omega, double& worst) {
    const int n = static_cast<int>(from.cols());
    const Eigen::MatrixXd overlap = (from.adjoint() * to).cwiseAbs2();
    struct Pair {
        double score;
        double gap;
        int a;
        int b;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (overlap(a, b) > 1e-6) pairs.push_back({overlap(a, b), circular_distance(e_from[a], e_to[b], omega), a, b});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        if (std::abs(x.score - y.score) > 1e-9) return x.score > y.score;
        return x.gap < y.gap;
    });
    std::vector<int> perm(n, -1);
    std::vector<char> used(n, 0);
    worst = 1.0;
    for (const Pair& p : pairs) {
        if (perm[p.a] >= 0 || used[p.b]) continue;
        perm[p.a] = p.b;
        used[p.b] = 1;
        worst = std::min(worst, p.score);
    }
    // Leftovers (negligible overlaps everywhere) pair by quasi-energy.
    for (int a = 0; a < n; ++a) {
        if (perm[a] >= 0) continue;
        int best = -1;
        for (int b = 0; b < n; ++b)
            if (!used[b] && (best < 0 || circular_distance(e_from[a], e_to[b], omega) <
                                             circular_distance(e_from[a], e_to[best], omega)))
                best = b;
        perm[a] = best;
        used[best] = 1;
        worst = 0.0;
    }
    return perm;
}

}  // namespace

Spectrum band_scan(const std::vector<double>& kappa_grid, const ValidatedConfig& cfg, const BlockSource& source,
                   const ScanOptions& options) {
    const double edge = cfg.zone_edge() * (1.0 + 1e-12);
    for (double k : kappa_grid)
        if (std::abs(k) > edge) throw IndexOutOfRange("kappa outside the first zone: " + std::to_string(k));

    const int K = static_cast<int>(kappa_grid.size());
    std::vector<Diagonalization> diag(K);
    std::vector<std::vector<std::string>> block_warnings(K);
    const int start = snap_time_index(options.t0, cfg);
    parallel_for(K, options.workers, [&](int i) {
        const BlockSet blocks = source(kappa_grid[i]);
        block_warnings[i] = blocks.warnings;
        const CMatrix U = period_propagator(options.t0, blocks, cfg).matrix;
        diag[i] = diagonalize(U, kappa_grid[i], cfg, start);
    });

    Spectrum s;
    s.omega = cfg.omega();
    s.kappas = kappa_grid;
    std::vector<CMatrix> vectors(K);
    for (int i = 0; i < K; ++i) {
        std::vector<double> e, r;
        std::vector<int> q;
        for (const FloquetMode& m : diag[i].modes) {
            e.push_back(m.quasienergy);
            r.push_back(m.residual);
            q.push_back(shift_class(m, cfg).q.value_or(-1));
        }
        s.energies.push_back(std::move(e));
        s.residuals.push_back(std::move(r));
        s.shift_classes.push_back(std::move(q));
        vectors[i] = diag[i].vectors();
        for (auto& w : block_warnings[i]) s.warnings.push_back(std::move(w));
        for (auto& w : diag[i].warnings) s.warnings.push_back(std::move(w));
    }
    for (int i = 0; i + 1 < K; ++i) {
        double worst = 1.0;
        s.continuation.push_back(
            match_by_overlap(vectors[i], vectors[i + 1], s.energies[i], s.energies[i + 1], cfg.omega(), worst));
        if (worst < 0.5)
            s.warnings.push_back("ContinuationAmbiguity: best overlap " + std::to_string(worst) + " between kappa " +
                                 std::to_string(kappa_grid[i]) + " and " + std::to_string(kappa_grid[i + 1]));
    }
    return s;
}

Spectrum band_scan(const std::vector<double>& kappa_grid, const ValidatedConfig& cfg, const ScanOptions& options) {
    return band_scan(kappa_grid, cfg, direct_block_source(cfg), options);
}

}  // namespace floquet
