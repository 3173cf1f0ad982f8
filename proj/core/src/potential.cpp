#include "floquet/potential.hpp"

#include <cmath>
#include <vector>

#include "floquet/errors.hpp"

namespace floquet {

namespace {

// Bessel J_n for any integer order and real argument.
double bessel_j(int n, double x) {
    const int m = std::abs(n);
    double v = std::cyl_bessel_j(static_cast<double>(m), std::abs(x));
    if (n < 0 && m % 2 != 0) v = -v;
    if (x < 0.0 && (m % 2) != 0) v = -v;
    return v;
}

cplx i_pow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Single-barrier value as a function of d = nu - mu only.
cplx barrier_by_difference(int n, int d, const ValidatedConfig& cfg) {
    const auto& l = cfg.lattice();
    const double lc = cfg.cell_length();
    const double q = 2.0 * pi * d / lc;
    const double pref = l.barrier_height * l.barrier_width * std::sqrt(pi) / lc;
    const double gauss = std::exp(-q * q * l.barrier_width * l.barrier_width / 4.0);
    if (n == 0 && l.drive_amplitude == 0.0) return pref * gauss;
    return pref * gauss * i_pow(n) * bessel_j(n, q * l.drive_amplitude);
}

void check_harmonic(int n, const ValidatedConfig& cfg) {
    if (std::abs(n) > 2 * cfg.n_max())
        throw IndexOutOfRange("harmonic order outside [-2 n_max, 2 n_max]: " + std::to_string(n));
}

}  // namespace

cplx single_barrier_element(int n, int mu, int nu, const ValidatedConfig& cfg) {
    check_harmonic(n, cfg);
    cfg.row_of(mu);
    cfg.row_of(nu);
    return barrier_by_difference(n, nu - mu, cfg);
}

CMatrix unit_cell_matrix(int n, double t0, const ValidatedConfig& cfg) {
    check_harmonic(n, cfg);
    const int D = cfg.dim();
    const int np = cfg.n_cells();
    const double omega = cfg.omega();
    const auto& phases = cfg.lattice().phases;

    // Toeplitz in d = nu - mu, d in [-(D-1), D-1].
    std::vector<cplx> diag(2 * D - 1);
    for (int d = -(D - 1); d <= D - 1; ++d) {
        cplx sum = 0.0;
        for (int i = 1; i <= np; ++i) {
            const double arg = n * (omega * t0 + phases[i - 1]) + 2.0 * pi * d * i / np;
            sum += std::polar(1.0, arg);
        }
        diag[d + D - 1] = barrier_by_difference(n, d, cfg) * sum;
    }
    CMatrix V(D, D);
    for (int c = 0; c < D; ++c)
        for (int r = 0; r < D; ++r) V(r, c) = diag[c - r + D - 1];
    return V;
}

CMatrix instantaneous_potential(double t, const ValidatedConfig& cfg) {
    const auto& l = cfg.lattice();
    const int D = cfg.dim();
    const int np = cfg.n_cells();
    const double lc = cfg.cell_length();
    const double pref = l.barrier_height * l.barrier_width * std::sqrt(pi) / lc;

    std::vector<double> centers(np);
    for (int i = 1; i <= np; ++i)
        centers[i - 1] = cfg.barrier_position(i) +
                         l.drive_amplitude * std::cos(cfg.omega() * t + l.phases[i - 1]);

    std::vector<cplx> diag(2 * D - 1);
    for (int d = -(D - 1); d <= D - 1; ++d) {
        const double q = 2.0 * pi * d / lc;
        const double gauss = pref * std::exp(-q * q * l.barrier_width * l.barrier_width / 4.0);
        cplx sum = 0.0;
        for (double c : centers) sum += std::polar(1.0, q * c);
        diag[d + D - 1] = gauss * sum;
    }
    CMatrix V(D, D);
    for (int c = 0; c < D; ++c)
        for (int r = 0; r < D; ++r) V(r, c) = diag[c - r + D - 1];
    return V;
}

double potential_value(double x, double t, const ValidatedConfig& cfg) {
    const auto& l = cfg.lattice();
    const double lc = cfg.cell_length();
    const double w = l.barrier_width;
    // Images within 40 widths are kept; exp(-1600) underflows anyway.
    const int images = static_cast<int>(std::ceil((40.0 * w + l.drive_amplitude) / lc)) + 1;
    double xr = std::fmod(x, lc);
    if (xr < 0.0) xr += lc;
    double v = 0.0;
    for (int i = 1; i <= cfg.n_cells(); ++i) {
        const double c = cfg.barrier_position(i) +
                         l.drive_amplitude * std::cos(cfg.omega() * t + l.phases[i - 1]);
        for (int m = -images; m <= images; ++m) {
            const double u = (xr - c - m * lc) / w;
            v += std::exp(-u * u);
        }
    }
    return l.barrier_height * v;
}

}  // namespace floquet
