#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/FFT>

#include "floquet/errors.hpp"
#include "floquet/observables.hpp"
#include "floquet/parallel.hpp"

namespace floquet {

const CMatrix& KappaModes::at(int time_index) const {
    const auto it = std::find(time_indices.begin(), time_indices.end(), time_index);
    if (it == time_indices.end()) throw MissingTrajectory("modes not sampled at time index " + std::to_string(time_index));
    return vectors[static_cast<std::size_t>(it - time_indices.begin())];
}

KappaModes compute_kappa_modes(double kappa, double weight, const BlockSet& blocks, std::span<const int> time_indices,
                               const ValidatedConfig& cfg) {
    const int N = cfg.n_steps();
    const int D = cfg.dim();
    if (blocks.size() != N) throw IndexOutOfRange("block set does not cover one period");
    for (int k : time_indices)
        if (k < 0 || k >= N) throw IndexOutOfRange("start time index outside [0, N)");

    const Diagonalization diag = diagonalize(period_propagator(0.0, blocks, cfg).matrix, kappa, cfg);
    KappaModes out;
    out.kappa = kappa;
    out.weight = weight;
    out.quasienergies.resize(D);
    for (int a = 0; a < D; ++a) out.quasienergies(a) = diag.modes[a].quasienergy;
    out.time_indices.assign(time_indices.begin(), time_indices.end());
    out.vectors.resize(time_indices.size());

    RVector k(D);
    for (int r = 0; r < D; ++r) k(r) = cfg.wavenumber(cfg.mu_of(r), kappa);
    CMatrix X = diag.vectors();
    out.velocities = RVector::Zero(D);
    for (int j = 0; j < N; ++j) {
        if (j > 0) X = blocks.block(j) * X;
        out.velocities += X.cwiseAbs2().transpose() * k;
        for (std::size_t s = 0; s < time_indices.size(); ++s) {
            if (time_indices[s] != j) continue;
            CVector phase(D);
            for (int a = 0; a < D; ++a) phase(a) = std::polar(1.0, out.quasienergies(a) * j * cfg.dt());
            out.vectors[s] = X * phase.asDiagonal();
        }
    }
    out.velocities /= N;
    return out;
}

double InitialState::completeness() const {
    double c = 0.0;
    for (std::size_t i = 0; i < overlaps.size(); ++i) c += weights[i] * overlaps[i].squaredNorm();
    return c;
}

InitialState custom_overlaps(std::vector<CVector> amplitudes, int time_index, const std::vector<KappaModes>& modes) {
    if (amplitudes.size() != modes.size()) throw IndexOutOfRange("one amplitude vector per kappa is required");
    InitialState s;
    s.kind = StateKind::custom_vector;
    s.time_index = time_index;
    s.amplitudes = std::move(amplitudes);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        s.kappas.push_back(modes[i].kappa);
        s.weights.push_back(modes[i].weight);
        s.overlaps.push_back(modes[i].at(time_index).adjoint() * s.amplitudes[i]);
    }
    return s;
}

InitialState gaussian_overlaps(double width, double center, int time_index, const std::vector<KappaModes>& modes,
                               const ValidatedConfig& cfg) {
    std::vector<CVector> amplitudes;
    amplitudes.reserve(modes.size());
    for (const KappaModes& m : modes) amplitudes.push_back(gaussian_packet(m.kappa, width, center, cfg));
    InitialState s = custom_overlaps(std::move(amplitudes), time_index, modes);
    s.kind = StateKind::gaussian_packet;
    s.width = width;
    s.center = center;
    return s;
}

double asymptotic_current(const InitialState& state, const std::vector<KappaModes>& modes) {
    double J = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i)
        J += state.weights[i] * modes[i].velocities.dot(state.overlaps[i].cwiseAbs2());
    return J;
}

std::vector<int> start_time_indices(int count, const ValidatedConfig& cfg) {
    if (count < 1) throw IndexOutOfRange("need at least one start time");
    std::vector<int> idx(count);
    for (int i = 0; i < count; ++i) idx[i] = snap_time_index(cfg.period() * i / count, cfg);
    return idx;
}

std::vector<KappaModes> compute_mode_table(const ValidatedConfig& cfg, const BlockSource& source,
                                           const KappaQuadrature& quadrature, std::span<const int> time_indices,
                                           int workers) {
    const int K = static_cast<int>(quadrature.nodes.size());
    std::vector<KappaModes> table(K);
    parallel_for(K, workers, [&](int i) {
        const BlockSet blocks = source(quadrature.nodes[i]);
        table[i] = compute_kappa_modes(quadrature.nodes[i], quadrature.weights[i], blocks, time_indices, cfg);
    });
    return table;
}

CurrentResult current_sweep(const std::vector<KappaModes>& modes, std::span<const int> time_indices, double width,
                            double center, const ValidatedConfig& cfg) {
    CurrentResult out;
    for (int k : time_indices) {
        const InitialState s = gaussian_overlaps(width, center, k, modes, cfg);
        out.time_indices.push_back(k);
        out.t0.push_back(k * cfg.dt());
        out.current.push_back(asymptotic_current(s, modes));
        out.completeness.push_back(s.completeness());
    }
    out.mean = std::accumulate(out.current.begin(), out.current.end(), 0.0) / static_cast<double>(out.current.size());
    return out;
}

CurrentResult current_sweep(const ValidatedConfig& cfg, const CurrentOptions& options, const BlockSource& source) {
    const std::vector<int> idx = start_time_indices(options.t0_points, cfg);
    const auto table = compute_mode_table(cfg, source, kappa_quadrature(options.kappa_points, cfg), idx,
                                          options.workers);
    return current_sweep(table, idx, options.packet_width, options.packet_center, cfg);
}

std::vector<CVector> stroboscopic_coefficients(const InitialState& state, const std::vector<KappaModes>& modes,
                                               int periods, const ValidatedConfig& cfg) {
    std::vector<CVector> out;
    out.reserve(modes.size());
    const double T = cfg.period();
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const RVector& eps = modes[i].quasienergies;
        CVector c = state.overlaps[i];
        for (Eigen::Index a = 0; a < c.size(); ++a) c(a) *= std::polar(1.0, -eps(a) * periods * T);
        out.push_back(modes[i].at(state.time_index) * c);
    }
    return out;
}

WavefunctionSample reconstruct(const std::vector<CVector>& coefficients, const std::vector<double>& kappas,
                               const std::vector<double>& weights, double center, const ValidatedConfig& cfg,
                               const ReconstructionOptions& options) {
    const int M = static_cast<int>(kappas.size());
    if (M < 2 || coefficients.size() != kappas.size() || weights.size() != kappas.size())
        throw IndexOutOfRange("reconstruction needs a full zone grid");
    const int D = cfg.dim();
    const int mu_max = cfg.mu_max();
    const double lc = cfg.cell_length();
    const double dk = 2.0 * pi / (lc * (M - 1));

    // Combined momentum grid k_m = k_0 + m dk; zone edges of neighbouring mu coincide.
    const int K = D * (M - 1) + 1;
    std::vector<cplx> g(static_cast<std::size_t>(K), cplx(0.0));
    for (int r = 0; r < D; ++r)
        for (int j = 0; j < M; ++j)
            g[static_cast<std::size_t>(r * (M - 1) + j)] += (weights[j] / dk) * coefficients[j](r);
    const double k0 = -cfg.zone_edge() - 2.0 * pi * mu_max / lc;

    WavefunctionSample out;
    double pk = 0.0, nk = 0.0;
    for (int m = 0; m < K; ++m) {
        const double w = std::norm(g[m]);
        pk += (k0 + m * dk) * w;
        nk += w;
    }
    out.mean_p = nk > 0.0 ? pk / nk : 0.0;

    int n_fft = 1;
    while (n_fft < options.oversample * K) n_fft *= 2;
    const double box = 2.0 * pi / dk;
    const double dx = box / n_fft;
    const double xs = center - 0.5 * box;

    std::vector<cplx> spectrum(static_cast<std::size_t>(n_fft), cplx(0.0));
    for (int m = 0; m < K; ++m) spectrum[m] = g[m] * std::polar(1.0, m * dk * xs);
    std::vector<cplx> field;
    Eigen::FFT<double> fft;
    fft.inv(field, spectrum);

    const double pref = dk / std::sqrt(2.0 * pi) * n_fft;
    double norm = 0.0, mx = 0.0;
    const double half_window = 0.5 * options.window_cells * lc;
    for (int l = 0; l < n_fft; ++l) {
        const double x = xs + l * dx;
        const double rho = std::norm(pref * field[l] * std::polar(1.0, k0 * x));
        norm += rho * dx;
        mx += x * rho * dx;
        if (std::abs(x - center) <= half_window) {
            out.x.push_back(x);
            out.density.push_back(rho);
        }
    }
    out.norm = norm;
    out.mean_x = norm > 0.0 ? mx / norm : 0.0;
    return out;
}

std::vector<WavefunctionSample> stroboscopic_propagate(const InitialState& state,
                                                       const std::vector<KappaModes>& modes,
                                                       std::span<const int> periods, const ValidatedConfig& cfg,
                                                       const ReconstructionOptions& options) {
    std::vector<WavefunctionSample> out;
    for (int m : periods) {
        WavefunctionSample s = reconstruct(stroboscopic_coefficients(state, modes, m, cfg), state.kappas,
                                           state.weights, state.center, cfg, options);
        s.periods = m;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace floquet
