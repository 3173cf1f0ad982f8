#pragma once

#include <span>
#include <string>
#include <vector>

#include "floquet/lattice_config.hpp"
#include "floquet/modes.hpp"
#include "floquet/propagator.hpp"
#include "floquet/types.hpp"

namespace floquet {

// Q(x, p) on a tensor grid, rows follow x and columns follow p.
struct HusimiGrid {
    std::vector<double> x;
    std::vector<double> p;
    Eigen::MatrixXd values;
    double sigma = 0.5;
    double time = 0.0;
};

// Normalized so that the integral of Q dx dp / (2 pi) over one cell is 1.
HusimiGrid husimi(const CVector& components, double kappa, std::span<const double> x, std::span<const double> p,
                  double sigma, const ValidatedConfig& cfg, double time = 0.0);
HusimiGrid husimi(const FloquetMode& mode, int time_index, std::span<const double> x, std::span<const double> p,
                  double sigma, const ValidatedConfig& cfg);

// n points from lo with spacing (hi - lo) / n when periodic, else endpoints included.
std::vector<double> linspace(double lo, double hi, int n, bool periodic);

// max |Q(x, p) - Q(x, -p)| / max Q; p grid must be symmetric.
double husimi_momentum_mirror_residual(const HusimiGrid& q);
// max |Q(x + s dx, p) - Q(x, p)| / max Q on a periodic x grid.
double husimi_shift_residual(const HusimiGrid& q, int shift_points);
// max |A - B| / max A.
double husimi_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

double momentum_expectation(const CVector& components, double kappa, const ValidatedConfig& cfg);

// Left Riemann average of <p> over the N grid times of the trajectory.
double mode_velocity(const FloquetMode& mode, const ValidatedConfig& cfg);

// Gaussian packet amplitudes b_mu(kappa) normalized so that
// integral dkappa sum_mu |b_mu|^2 = 1.
CVector gaussian_packet(double kappa, double width, double center, const ValidatedConfig& cfg);

struct KappaQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Trapezoid rule on zone_grid(points).
KappaQuadrature kappa_quadrature(int points, const ValidatedConfig& cfg);

// Floquet modes at one kappa, sampled at requested start times.
struct KappaModes {
    double kappa = 0.0;
    double weight = 0.0;
    RVector quasienergies;
    RVector velocities;
    std::vector<int> time_indices;
    std::vector<CMatrix> vectors;  // vectors[s].col(a) = Phi_a(t_s)

    const CMatrix& at(int time_index) const;
};

KappaModes compute_kappa_modes(double kappa, double weight, const BlockSet& blocks, std::span<const int> time_indices,
                               const ValidatedConfig& cfg);

enum class StateKind { gaussian_packet, custom_vector };

struct InitialState {
    StateKind kind = StateKind::gaussian_packet;
    double width = 0.0;
    double center = 0.0;
    int time_index = 0;
    std::vector<double> kappas;
    std::vector<double> weights;
    std::vector<CVector> amplitudes;  // b(kappa) in the plane-wave basis
    std::vector<CVector> overlaps;    // C_{alpha kappa}(t0)

    // sum_kappa w sum_alpha |C|^2
    double completeness() const;
};

InitialState gaussian_overlaps(double width, double center, int time_index, const std::vector<KappaModes>& modes,
                               const ValidatedConfig& cfg);
InitialState custom_overlaps(std::vector<CVector> amplitudes, int time_index, const std::vector<KappaModes>& modes);

// sum_kappa w sum_alpha v |C|^2
double asymptotic_current(const InitialState& state, const std::vector<KappaModes>& modes);

struct CurrentResult {
    std::vector<int> time_indices;
    std::vector<double> t0;
    std::vector<double> current;
    std::vector<double> completeness;
    double mean = 0.0;
};

struct CurrentOptions {
    int kappa_points = 64;
    int t0_points = 32;
    double packet_width = 1.0;
    double packet_center = 0.0;
    int workers = 1;
};

// Start-time indices i N / count, snapped to the grid when count does not divide N.
std::vector<int> start_time_indices(int count, const ValidatedConfig& cfg);

std::vector<KappaModes> compute_mode_table(const ValidatedConfig& cfg, const BlockSource& source,
                                           const KappaQuadrature& quadrature, std::span<const int> time_indices,
                                           int workers = 1);

CurrentResult current_sweep(const ValidatedConfig& cfg, const CurrentOptions& options, const BlockSource& source);
CurrentResult current_sweep(const std::vector<KappaModes>& modes, std::span<const int> time_indices, double width,
                            double center, const ValidatedConfig& cfg);

// b(kappa, m) = sum_alpha C_alpha e^{-i eps_alpha m T} Phi_alpha(t0).
std::vector<CVector> stroboscopic_coefficients(const InitialState& state, const std::vector<KappaModes>& modes,
                                               int periods, const ValidatedConfig& cfg);

struct WavefunctionSample {
    int periods = 0;
    double norm = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    std::vector<double> x;        // window around the packet center
    std::vector<double> density;  // |Psi(x)|^2 on x
};

struct ReconstructionOptions {
    int window_cells = 4;
    int oversample = 2;
};

// Real-space reconstruction on the periodic box of length cell_length * (K - 1)
// implied by the kappa grid; moments are taken over the full box.
WavefunctionSample reconstruct(const std::vector<CVector>& coefficients, const std::vector<double>& kappas,
                               const std::vector<double>& weights, double center, const ValidatedConfig& cfg,
                               const ReconstructionOptions& options = {});

std::vector<WavefunctionSample> stroboscopic_propagate(const InitialState& state,
                                                       const std::vector<KappaModes>& modes,
                                                       std::span<const int> periods, const ValidatedConfig& cfg,
                                                       const ReconstructionOptions& options = {});

}  // namespace floquet
