#include "floquet/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floquet/errors.hpp"
#include "floquet/potential.hpp"

namespace floquet {

FourierBlock hamiltonian_block(int n, double kappa, double t0, const ValidatedConfig& cfg) {
    FourierBlock b{kappa, n, unit_cell_matrix(n, t0, cfg)};
    if (n == 0) {
        for (int r = 0; r < cfg.dim(); ++r) {
            const double k = cfg.wavenumber(cfg.mu_of(r), kappa);
            b.matrix(r, r) += 0.5 * k * k;
        }
    }
    return b;
}

FloquetPowerState::FloquetPowerState(int order, int dim, int n_max)
    : order_(order), dim_(dim), n_max_(n_max),
      data_(CMatrix::Zero(static_cast<Eigen::Index>(dim) * dim, 2 * n_max + 1)) {}

FloquetPowerState FloquetPowerState::identity(const ValidatedConfig& cfg) {
    FloquetPowerState s(0, cfg.dim(), cfg.n_max());
    s.component(0).setIdentity();
    return s;
}

Eigen::Map<const CMatrix> FloquetPowerState::component(int n) const {
    if (std::abs(n) > n_max_) throw IndexOutOfRange("harmonic outside state: " + std::to_string(n));
    return Eigen::Map<const CMatrix>(data_.col(n + n_max_).data(), dim_, dim_);
}

Eigen::Map<CMatrix> FloquetPowerState::component(int n) {
    if (std::abs(n) > n_max_) throw IndexOutOfRange("harmonic outside state: " + std::to_string(n));
    return Eigen::Map<CMatrix>(data_.col(n + n_max_).data(), dim_, dim_);
}

double FloquetPowerState::boundary_fraction() const {
    const double total = data_.cwiseAbs().maxCoeff();
    if (total == 0.0 || n_max_ == 0) return 0.0;
    const double edge = std::max(data_.col(0).cwiseAbs().maxCoeff(),
                                 data_.col(2 * n_max_).cwiseAbs().maxCoeff());
    return edge / total;
}

FloquetOperator::FloquetOperator(double kappa, double t0, const ValidatedConfig& cfg)
    : kappa_(kappa), dim_(cfg.dim()), n_max_(cfg.n_max()), omega_(cfg.omega()) {
    const int reach = 2 * n_max_;
    const int M = 2 * reach + 1;
    harmonics_.reserve(M);
    double coupling = 0.0;
    for (int m = -reach; m <= reach; ++m) {
        harmonics_.push_back(hamiltonian_block(m, kappa, t0, cfg).matrix);
        if (m != 0) coupling += harmonics_.back().cwiseAbs().colwise().sum().maxCoeff();
    }
    norm_bound_ = harmonics_[reach].cwiseAbs().colwise().sum().maxCoeff() + coupling + n_max_ * omega_;

    // Samples h_k = sum_m H^(m) e^{2 pi i m k / M}.
    const Eigen::Index D2 = static_cast<Eigen::Index>(dim_) * dim_;
    CMatrix stacked(D2, M);
    for (int m = 0; m < M; ++m)
        stacked.col(m) = Eigen::Map<const CMatrix>(harmonics_[m].data(), D2, 1);
    CMatrix to_time(M, M);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < M; ++k)
            to_time(m, k) = std::polar(1.0, 2.0 * pi * static_cast<double>((m - reach) * k % M) / M);
    const CMatrix sampled = stacked * to_time;
    samples_.reserve(M);
    for (int k = 0; k < M; ++k)
        samples_.emplace_back(Eigen::Map<const CMatrix>(sampled.col(k).data(), dim_, dim_));

    const int Nn = 2 * n_max_ + 1;
    forward_.resize(Nn, M);
    backward_.resize(M, Nn);
    for (int n = -n_max_; n <= n_max_; ++n) {
        for (int k = 0; k < M; ++k) {
            const double arg = 2.0 * pi * static_cast<double>(n * k % M) / M;
            forward_(n + n_max_, k) = std::polar(1.0, arg);
            backward_(k, n + n_max_) = std::polar(1.0 / M, -arg);
        }
    }
}

const CMatrix& FloquetOperator::harmonic(int m) const {
    if (std::abs(m) > 2 * n_max_) throw IndexOutOfRange("harmonic outside operator: " + std::to_string(m));
    return harmonics_[static_cast<std::size_t>(m + 2 * n_max_)];
}

FloquetPowerState FloquetOperator::apply(const FloquetPowerState& prev, Contraction how) const {
    if (prev.dim() != dim_ || prev.n_max() != n_max_)
        throw IndexOutOfRange("power state shape does not match the operator");
    return how == Contraction::dense ? apply_dense(prev) : apply_spectral(prev);
}

FloquetPowerState FloquetOperator::apply_dense(const FloquetPowerState& prev) const {
    FloquetPowerState next(prev.order() + 1, dim_, n_max_);
    for (int n = -n_max_; n <= n_max_; ++n) {
        auto out = next.component(n);
        for (int np = -n_max_; np <= n_max_; ++np) out.noalias() += harmonic(n - np) * prev.component(np);
        out += (n * omega_) * prev.component(n);
    }
    return next;
}

FloquetPowerState FloquetOperator::apply_spectral(const FloquetPowerState& prev) const {
    const int M = static_cast<int>(samples_.size());
    const Eigen::Index D2 = static_cast<Eigen::Index>(dim_) * dim_;
    CMatrix in_time = prev.data() * forward_;
    CMatrix out_time(D2, M);
    for (int k = 0; k < M; ++k) {
        Eigen::Map<const CMatrix> s(in_time.col(k).data(), dim_, dim_);
        Eigen::Map<CMatrix> o(out_time.col(k).data(), dim_, dim_);
        o.noalias() = samples_[k] * s;
    }
    FloquetPowerState next(prev.order() + 1, dim_, n_max_);
    next.data().noalias() = out_time * backward_;
    for (int n = -n_max_; n <= n_max_; ++n)
        next.data().col(n + n_max_) += (n * omega_) * prev.data().col(n + n_max_);
    return next;
}

FloquetPowerState floquet_power_step(const FloquetPowerState& prev, double kappa, double t0,
                                     const ValidatedConfig& cfg) {
    return FloquetOperator(kappa, t0, cfg).apply(prev, Contraction::dense);
}

ShortTimeSeries short_time_series(double kappa, double base_time, const ValidatedConfig& cfg,
                                  const SeriesOptions& options) {
    const FloquetOperator op(kappa, base_time, cfg);
    const double dt = cfg.dt();
    const int p_max = cfg.truncation().p_max;
    const double tol = cfg.tolerances().series;
    const bool enforce = options.enforce_convergence && cfg.tolerances().enforce_series_convergence;

    ShortTimeSeries out;
    out.kappa = kappa;
    out.base_time = base_time;
    FloquetPowerState state = FloquetPowerState::identity(cfg);
    out.weights = state.data();

    cplx coef = 1.0;
    double previous = std::numeric_limits<double>::infinity();
    bool converged = p_max == 0 && !enforce;
    for (int p = 1; p <= p_max; ++p) {
        state = op.apply(state, options.contraction);
        coef *= cplx(0.0, -dt) / static_cast<double>(p);
        const double increment = std::abs(coef) * state.data().cwiseAbs().maxCoeff();
        out.weights += coef * state.data();
        out.order_used = p;
        out.last_increment = increment;
        if (increment < tol && increment <= previous && p >= op.norm_bound() * dt) {
            converged = true;
            break;
        }
        previous = increment;
    }
    if (!converged && enforce)
        throw ConvergenceError("exponential series not converged at p_max = " + std::to_string(p_max) +
                               " (last increment " + std::to_string(out.last_increment) + ")");

    const int n_max = cfg.n_max();
    if (n_max > 0) {
        const double edge = std::max(out.weights.col(0).cwiseAbs().maxCoeff(),
                                     out.weights.col(2 * n_max).cwiseAbs().maxCoeff());
        out.boundary_weight = edge;
        if (edge > cfg.tolerances().boundary_mass)
            out.warnings.push_back("TruncationWarning: harmonic-edge weight " + std::to_string(edge) +
                                   " at kappa " + std::to_string(kappa));
    }
    return out;
}

BlockSet blocks_from_series(const ShortTimeSeries& series, const ValidatedConfig& cfg) {
    const int N = cfg.n_steps();
    const int n_max = cfg.n_max();
    const int D = cfg.dim();
    CMatrix phases(2 * n_max + 1, N);
    for (int j = 1; j <= N; ++j)
        for (int n = -n_max; n <= n_max; ++n)
            phases(n + n_max, j - 1) =
                std::polar(1.0, 2.0 * pi * static_cast<double>(static_cast<long>(n) * j % N) / N);
    const CMatrix all = series.weights * phases;

    BlockSet set;
    set.kappa = series.kappa;
    set.base_time = series.base_time;
    set.series_order = series.order_used;
    set.warnings = series.warnings;
    set.blocks.reserve(N);
    for (int j = 0; j < N; ++j) set.blocks.emplace_back(Eigen::Map<const CMatrix>(all.col(j).data(), D, D));
    return set;
}

BlockSet build_blocks(double kappa, const ValidatedConfig& cfg, double base_time, const SeriesOptions& options) {
    return blocks_from_series(short_time_series(kappa, base_time, cfg, options), cfg);
}

PropagatorBlock short_time_block(int j, double kappa, const ValidatedConfig& cfg, double base_time,
                                 const SeriesOptions& options) {
    const int N = cfg.n_steps();
    if (j < 1 || j > N) throw IndexOutOfRange("step index outside [1, N]: " + std::to_string(j));
    const ShortTimeSeries series = short_time_series(kappa, base_time, cfg, options);
    const int n_max = cfg.n_max();
    const int D = cfg.dim();
    CMatrix U = CMatrix::Zero(D, D);
    for (int n = -n_max; n <= n_max; ++n)
        U += std::polar(1.0, 2.0 * pi * static_cast<double>(static_cast<long>(n) * j % N) / N) *
             Eigen::Map<const CMatrix>(series.weights.col(n + n_max).data(), D, D);
    return {kappa, base_time + (j - 1) * cfg.dt(), base_time + j * cfg.dt(), std::move(U)};
}

int snap_time_index(double t0, const ValidatedConfig& cfg) {
    const int N = cfg.n_steps();
    const long k = std::lround(t0 / cfg.dt());
    return static_cast<int>(((k % N) + N) % N);
}

PropagatorBlock period_propagator(double t0, const BlockSet& blocks, const ValidatedConfig& cfg) {
    const int k = snap_time_index(t0, cfg);
    const int indices[] = {k};
    auto U = period_propagators(indices, blocks);
    const double ts = blocks.base_time + k * cfg.dt();
    return {blocks.kappa, ts, ts + cfg.period(), std::move(U.front())};
}

std::vector<CMatrix> period_propagators(std::span<const int> time_indices, const BlockSet& blocks) {
    const int N = blocks.size();
    if (N == 0) throw IndexOutOfRange("empty block set");
    const Eigen::Index D = blocks.blocks.front().rows();
    for (int k : time_indices)
        if (k < 0 || k >= N) throw IndexOutOfRange("time index outside [0, N): " + std::to_string(k));

    // prefix[k] = U^k ... U^1, suffix[k] = U^N ... U^{k+1}.
    std::vector<int> wanted(time_indices.begin(), time_indices.end());
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    std::vector<CMatrix> prefix(wanted.size()), suffix(wanted.size());

    CMatrix acc = CMatrix::Identity(D, D);
    std::size_t w = 0;
    for (int k = 0; k <= wanted.back(); ++k) {
        if (k > 0) acc = blocks.block(k) * acc;
        if (k == wanted[w]) prefix[w++] = acc;
    }
    acc.setIdentity();
    std::size_t v = wanted.size();
    for (int k = N; k >= wanted.front(); --k) {
        if (k < N) acc = acc * blocks.block(k + 1);
        if (v > 0 && k == wanted[v - 1]) suffix[--v] = acc;
    }

    std::vector<CMatrix> out;
    out.reserve(time_indices.size());
    for (int k : time_indices) {
        const auto it = std::lower_bound(wanted.begin(), wanted.end(), k) - wanted.begin();
        out.push_back(prefix[it] * suffix[it]);
    }
    return out;
}

CMatrix interval_propagator(int a, int b, const BlockSet& blocks) {
    if (a < 0 || b > blocks.size() || a > b)
        throw IndexOutOfRange("interval indices must satisfy 0 <= a <= b <= N");
    const Eigen::Index D = blocks.blocks.front().rows();
    CMatrix U = CMatrix::Identity(D, D);
    for (int j = a + 1; j <= b; ++j) U = blocks.block(j) * U;
    return U;
}

double interior_unitarity_residual(const CMatrix& U, const ValidatedConfig& cfg) {
    const int w = cfg.truncation().interior_window;
    const Eigen::Index n = U.rows() - 2 * w;
    const CMatrix G = U.adjoint() * U;
    const CMatrix block = G.block(w, w, n, n) - CMatrix::Identity(n, n);
    return block.cwiseAbs().maxCoeff();
}

}  // namespace floquet
