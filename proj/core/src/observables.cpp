#include "floquet/observables.hpp"

#include <algorithm>
#include <cmath>

#include "floquet/errors.hpp"

namespace floquet {

std::vector<double> linspace(double lo, double hi, int n, bool periodic) {
    if (n < 1) throw IndexOutOfRange("grid needs at least one point");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double step = (hi - lo) / (periodic ? n : n - 1);
    for (int i = 0; i < n; ++i) v[i] = lo + i * step;
    if (!periodic) v.back() = hi;
    return v;
}

HusimiGrid husimi(const CVector& components, double kappa, std::span<const double> x, std::span<const double> p,
                  double sigma, const ValidatedConfig& cfg, double time) {
    if (!(sigma > 0.0)) throw NonPositiveParameter("Husimi width must be positive");
    const int D = cfg.dim();
    RVector k(D);
    for (int r = 0; r < D; ++r) k(r) = cfg.wavenumber(cfg.mu_of(r), kappa);
    const double pref = 2.0 * std::sqrt(pi) * sigma / cfg.cell_length();

    HusimiGrid out;
    out.x.assign(x.begin(), x.end());
    out.p.assign(p.begin(), p.end());
    out.sigma = sigma;
    out.time = time;
    out.values.resize(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(p.size()));

    // Plane-wave phases e^{i k_mu x} are shared across p.
    CMatrix waves(static_cast<Eigen::Index>(x.size()), D);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (int r = 0; r < D; ++r) waves(static_cast<Eigen::Index>(i), r) = std::polar(1.0, k(r) * x[i]);
    for (std::size_t j = 0; j < p.size(); ++j) {
        CVector weighted(D);
        for (int r = 0; r < D; ++r) {
            const double dk = k(r) - p[j];
            weighted(r) = components(r) * std::exp(-0.5 * sigma * sigma * dk * dk);
        }
        const CVector sums = waves * weighted;
        out.values.col(static_cast<Eigen::Index>(j)) = pref * sums.cwiseAbs2();
    }
    return out;
}

HusimiGrid husimi(const FloquetMode& mode, int time_index, std::span<const double> x, std::span<const double> p,
                  double sigma, const ValidatedConfig& cfg) {
    const CVector* v = &mode.components;
    if (time_index != 0) {
        if (!mode.has_trajectory() || time_index < 0 || time_index >= static_cast<int>(mode.trajectory.size()))
            throw MissingTrajectory("Husimi snapshot needs the mode trajectory at the requested time");
        v = &mode.trajectory[static_cast<std::size_t>(time_index)];
    }
    return husimi(*v, mode.kappa, x, p, sigma, cfg, (mode.start_index + time_index) * cfg.dt());
}

double husimi_momentum_mirror_residual(const HusimiGrid& q) {
    const Eigen::Index np = q.values.cols();
    for (Eigen::Index j = 0; j < np; ++j)
        if (std::abs(q.p[j] + q.p[np - 1 - j]) > 1e-12 * (1.0 + std::abs(q.p[j])))
            throw IndexOutOfRange("momentum grid is not symmetric");
    return husimi_difference(q.values, q.values.rowwise().reverse());
}

double husimi_shift_residual(const HusimiGrid& q, int shift_points) {
    const Eigen::Index nx = q.values.rows();
    Eigen::MatrixXd shifted(nx, q.values.cols());
    for (Eigen::Index i = 0; i < nx; ++i) shifted.row(i) = q.values.row((i + shift_points) % nx);
    return husimi_difference(q.values, shifted);
}

double husimi_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return (a - b).cwiseAbs().maxCoeff();
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

double momentum_expectation(const CVector& components, double kappa, const ValidatedConfig& cfg) {
    double v = 0.0;
    for (int r = 0; r < cfg.dim(); ++r) v += cfg.wavenumber(cfg.mu_of(r), kappa) * std::norm(components(r));
    return v;
}

double mode_velocity(const FloquetMode& mode, const ValidatedConfig& cfg) {
    const int N = cfg.n_steps();
    if (mode.trajectory.size() < static_cast<std::size_t>(N))
        throw MissingTrajectory("mode velocity needs the trajectory over one period");
    double v = 0.0;
    for (int j = 0; j < N; ++j) v += momentum_expectation(mode.trajectory[j], mode.kappa, cfg);
    return v / N;
}

CVector gaussian_packet(double kappa, double width, double center, const ValidatedConfig& cfg) {
    if (!(width > 0.0)) throw NonPositiveParameter("packet width must be positive");
    const int D = cfg.dim();
    // psi(x) = (pi w^2)^{-1/4} exp(-(x - c)^2 / (2 w^2)), b = psi~(k_mu) / sqrt(2 pi).
    const double amp = std::pow(pi * width * width, -0.25) * width;
    CVector b(D);
    for (int r = 0; r < D; ++r) {
        const double k = cfg.wavenumber(cfg.mu_of(r), kappa);
        b(r) = amp * std::exp(-0.5 * width * width * k * k) * std::polar(1.0, -k * center);
    }
    return b;
}

KappaQuadrature kappa_quadrature(int points, const ValidatedConfig& cfg) {
    if (points < 2) throw IndexOutOfRange("kappa quadrature needs at least two points");
    KappaQuadrature q;
    q.nodes = zone_grid(points, cfg);
    const double h = 2.0 * cfg.zone_edge() / (points - 1);
    q.weights.assign(points, h);
    q.weights.front() = q.weights.back() = 0.5 * h;
    return q;
}

}  // namespace floquet
