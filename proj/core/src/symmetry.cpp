#include "floquet/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "floquet/errors.hpp"
#include "floquet/potential.hpp"

namespace floquet {

std::string_view to_string(IdentityTag tag) {
    switch (tag) {
        case IdentityTag::time_reversal_U: return "time-reversal-U";
        case IdentityTag::time_reversal_U_general: return "time-reversal-U-general";
        case IdentityTag::parity_composition: return "parity-composition";
        case IdentityTag::fbm_time_reversal: return "fbm-time-reversal";
        case IdentityTag::fbm_parity: return "fbm-parity";
        case IdentityTag::fbm_both: return "fbm-both";
        case IdentityTag::stripe: return "stripe";
        case IdentityTag::husimi_t: return "husimi-t";
        case IdentityTag::husimi_x: return "husimi-x";
        case IdentityTag::current_t: return "current-t";
        case IdentityTag::current_x: return "current-x";
    }
    return "unknown";
}

namespace {

template <class F>
double scan_residual(const ValidatedConfig& cfg, const ScanGrid& grid, F&& image) {
    const double L = cfg.lattice().barrier_spacing;
    const int nx = grid.x_points_per_spacing * cfg.n_cells();
    const double dx = L / grid.x_points_per_spacing;
    double worst = 0.0;
    for (int j = 0; j < grid.t_points; ++j) {
        const double t = cfg.period() * j / grid.t_points;
        for (int i = 0; i < nx; ++i) {
            const double x = i * dx;
            worst = std::max(worst, std::abs(potential_value(x, t, cfg) - image(x, t)));
        }
    }
    return worst / cfg.lattice().barrier_height;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

HamiltonianScan scan_hamiltonian_symmetry(const ValidatedConfig& cfg, const ScanGrid& grid) {
    const double T = cfg.period();
    const double L = cfg.lattice().barrier_spacing;
    HamiltonianScan out;

    out.time_reversal_residual =
        scan_residual(cfg, grid, [&](double x, double t) { return potential_value(x, -t, cfg); });
    out.time_reversal = out.time_reversal_residual < grid.tolerance;

    out.parity_residual = std::numeric_limits<double>::infinity();
    for (int c = 0; c < cfg.n_cells(); ++c) {
        const double chi = c * L;
        const double r =
            scan_residual(cfg, grid, [&](double x, double t) { return potential_value(chi - x, t + 0.5 * T, cfg); });
        if (r < out.parity_residual - 1e-15) {
            out.parity_residual = r;
            out.parity_center = chi;
        }
    }
    out.parity = out.parity_residual < grid.tolerance;

    out.shift_residual = scan_residual(cfg, grid, [&](double x, double t) { return potential_value(x + L, t, cfg); });
    out.shift = out.shift_residual < grid.tolerance;

    if (!out.time_reversal) {
        // V(x, t) = V(x, tau - t) needs 2 delta_i equal mod 2 pi; tau = -2 delta_1 / omega.
        double tau = std::fmod(-2.0 * cfg.lattice().phases.front() / cfg.omega(), T);
        if (tau < 0.0) tau += T;
        const double r =
            scan_residual(cfg, grid, [&](double x, double t) { return potential_value(x, tau - t, cfg); });
        if (r < grid.tolerance)
            out.lint.push_back("time reversal holds with time shift tau = " + format_double(tau) +
                               "; the time-reversal predicates assume tau = 0 and are not applied");
    }
    if (out.parity && out.parity_center != 0.0)
        out.lint.push_back("parity holds about chi = " + format_double(out.parity_center) +
                           " rather than chi = 0; parity predicates use this center");
    return out;
}

namespace {

int flip(int row, Eigen::Index D) { return static_cast<int>(D) - 1 - row; }

// R(mu, nu) = M(-nu, -mu).
CMatrix flip_transpose(const CMatrix& M) {
    const Eigen::Index D = M.rows();
    CMatrix R(D, D);
    for (Eigen::Index c = 0; c < D; ++c)
        for (Eigen::Index r = 0; r < D; ++r) R(r, c) = M(D - 1 - c, D - 1 - r);
    return R;
}

double interior_max(const CMatrix& A, const ValidatedConfig& cfg) {
    const int w = cfg.truncation().interior_window;
    const Eigen::Index n = A.rows() - 2 * w;
    return A.block(w, w, n, n).cwiseAbs().maxCoeff();
}

CMatrix ordered_product(int first, int last, const BlockSet& blocks) {
    const int N = blocks.size();
    const Eigen::Index D = blocks.blocks.front().rows();
    CMatrix U = CMatrix::Identity(D, D);
    for (int j = first; j <= last; ++j) U = blocks.block(j == 0 ? N : j) * U;
    return U;
}

}  // namespace

double check_time_reversal_U(const CMatrix& U_plus, const CMatrix& U_minus, const ValidatedConfig& cfg) {
    return interior_max(U_plus - flip_transpose(U_minus), cfg);
}

double check_time_reversal_general(int a, int b, const BlockSet& plus, const BlockSet& minus,
                                   const ValidatedConfig& cfg, MirrorConvention mirror) {
    const int N = plus.size();
    if (minus.size() != N) throw IndexOutOfRange("block sets differ in length");
    if (a < 0 || b > N || a >= b) throw IndexOutOfRange("time-reversal check needs 0 <= a < b <= N");
    const CMatrix rhs = flip_transpose(interval_propagator(a, b, minus));
    const CMatrix lhs = mirror == MirrorConvention::continuous ? ordered_product(N - b + 1, N - a, plus)
                                                               : ordered_product(N - b, N - a - 1, plus);
    return interior_max(lhs - rhs, cfg) / std::max(1.0, interior_max(lhs, cfg));
}

CMatrix half_period_propagator(const BlockSet& blocks) {
    if (blocks.size() % 2 != 0) throw OddStepCount("half-period propagator needs an even number of steps");
    return interval_propagator(0, blocks.size() / 2, blocks);
}

double check_parity_composition(const CMatrix& U_half_minus, const CMatrix& U_half, const CMatrix& U_full,
                                double kappa, double chi, const ValidatedConfig& cfg) {
    const int D = cfg.dim();
    CVector phase(D);
    for (int r = 0; r < D; ++r) phase(r) = std::polar(1.0, cfg.wavenumber(cfg.mu_of(r), kappa) * chi);
    CMatrix A(D, D);
    for (int c = 0; c < D; ++c)
        for (int r = 0; r < D; ++r) A(r, c) = std::conj(phase(r)) * U_half_minus(flip(r, D), flip(c, D)) * phase(c);
    return interior_max(U_full - A * U_half, cfg);
}

double stripe_report(const CMatrix& U, int n_cells) {
    if (n_cells <= 1) return 0.0;
    const double total = U.cwiseAbs2().sum();
    if (total == 0.0) return 0.0;
    double off = 0.0;
    for (Eigen::Index c = 0; c < U.cols(); ++c)
        for (Eigen::Index r = 0; r < U.rows(); ++r)
            if ((r - c) % n_cells != 0) off += std::norm(U(r, c));
    return off / total;
}

namespace {

// Reference component: largest magnitude, ties (1e-8 relative) broken
// towards small |mu|, then mu >= 0.
Eigen::Index reference_row(const CVector& v) {
    const Eigen::Index D = v.size();
    const Eigen::Index centre = D / 2;
    const double top = v.cwiseAbs().maxCoeff();
    Eigen::Index best = -1;
    for (Eigen::Index r = 0; r < D; ++r) {
        if (std::abs(v(r)) < top * (1.0 - 1e-8)) continue;
        if (best < 0) {
            best = r;
            continue;
        }
        const auto dr = std::abs(r - centre), db = std::abs(best - centre);
        if (dr < db || (dr == db && r > best)) best = r;
    }
    return best;
}

cplx gauge_factor(const FloquetMode& m) {
    const CVector& v = m.trajectory.empty() ? m.components : m.trajectory.front();
    const cplx ref = v(reference_row(v));
    return std::abs(ref) > 0.0 ? std::conj(ref) / std::abs(ref) : cplx(1.0);
}

CVector flipped(const CVector& v) { return v.reverse(); }

struct Fit {
    double residual = std::numeric_limits<double>::infinity();
    int sign = 0;
};

}  // namespace

FbmReport check_fbm_relation(const std::vector<FloquetMode>& plus, const std::vector<FloquetMode>& minus,
                             FbmKind kind, double chi, const ValidatedConfig& cfg, std::optional<int> time_index) {
    const std::vector<FloquetMode>& partners = kind == FbmKind::both ? plus : minus;
    const int N = cfg.n_steps();
    if ((kind != FbmKind::time_reversal) && N % 2 != 0) throw OddStepCount("parity relations need even N");
    for (const auto* list : {&plus, &partners})
        for (const FloquetMode& m : *list)
            if (m.trajectory.size() != static_cast<std::size_t>(N + 1) || m.start_index != 0)
                throw MissingTrajectory("FBM relations need trajectories starting at t = 0");

    std::vector<int> times;
    if (time_index) times.push_back(*time_index % N);
    else
        for (int j = 0; j < N; ++j) times.push_back(j);

    const double omega = cfg.omega();
    FbmReport report;
    report.kind = kind;
    constexpr double pair_window = 1e-6;
    constexpr double sign_tolerance = 1e-6;

    for (std::size_t a = 0; a < plus.size(); ++a) {
        const FloquetMode& ma = plus[a];
        const cplx ga = gauge_factor(ma);
        const int D = static_cast<int>(ma.components.size());
        CVector phase(D);
        for (int r = 0; r < D; ++r) phase(r) = std::polar(1.0, -cfg.wavenumber(cfg.mu_of(r), ma.kappa) * chi);

        std::vector<int> candidates;
        int nearest = 0;
        for (std::size_t b = 0; b < partners.size(); ++b) {
            const double d = circular_distance(ma.quasienergy, partners[b].quasienergy, omega);
            if (d < pair_window) candidates.push_back(static_cast<int>(b));
            if (d < circular_distance(ma.quasienergy, partners[nearest].quasienergy, omega)) nearest = static_cast<int>(b);
        }
        if (candidates.empty()) candidates.push_back(nearest);
        if (candidates.size() > 1)
            report.warnings.push_back("PairingAmbiguity: " + std::to_string(candidates.size()) +
                                      " partners within " + format_double(pair_window) + " of mode " +
                                      std::to_string(a));

        Fit best;
        int best_partner = candidates.front();
        for (int b : candidates) {
            const FloquetMode& mb = partners[static_cast<std::size_t>(b)];
            const cplx gb = gauge_factor(mb);
            std::vector<CVector> X, Y;
            for (int j : times) {
                switch (kind) {
                    case FbmKind::time_reversal:
                        X.push_back(ga * ma.trajectory[j]);
                        Y.push_back(flipped(gb * mb.trajectory[N - j]).conjugate());
                        break;
                    case FbmKind::parity:
                        X.push_back(ga * ma.trajectory[j]);
                        Y.push_back(phase.cwiseProduct(flipped(gb * mb.trajectory[(j + N / 2) % N])));
                        break;
                    case FbmKind::both:
                        X.push_back(ga * ma.trajectory[N - j]);
                        Y.push_back(phase.cwiseProduct((gb * mb.trajectory[(j + N / 2) % N]).conjugate()));
                        break;
                }
            }
            cplx c = 0.0;
            for (std::size_t i = 0; i < X.size(); ++i) c += Y[i].dot(X[i]);
            // Partner phase e^{i phi}, phi = arg(c) mod pi in (-pi/2, pi/2].
            double phi = std::remainder(std::arg(c), pi);
            if (phi <= -0.5 * pi) phi += pi;
            const cplx rot = std::polar(1.0, phi);
            const int sign = (std::conj(rot) * c).real() >= 0.0 ? 1 : -1;
            double worst = 0.0;
            for (std::size_t i = 0; i < X.size(); ++i)
                worst = std::max(worst, (X[i] - static_cast<double>(sign) * rot * Y[i]).norm());
            if (worst < best.residual) {
                best = {worst, sign};
                best_partner = b;
            }
        }
        report.residuals.push_back(best.residual);
        report.signs.push_back(best.residual < sign_tolerance ? best.sign : 0);
        report.partners.push_back(best_partner);
        report.residual = std::max(report.residual, best.residual);
    }
    return report;
}

}  // namespace floquet
