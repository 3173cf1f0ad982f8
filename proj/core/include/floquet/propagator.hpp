#pragma once

#include <span>
#include <string>
#include <vector>

#include "floquet/lattice_config.hpp"
#include "floquet/types.hpp"

namespace floquet {

struct FourierBlock {
    double kappa = 0.0;
    int order = 0;
    CMatrix matrix;
};

// H^(n) = 1/2 k_mu^2 delta_{n0} + V^(n), |n| <= 2 n_max.
FourierBlock hamiltonian_block(int n, double kappa, double t0, const ValidatedConfig& cfg);

// Column nu, harmonic 0 of H_F^p: component n is the D x D matrix
// <<mu n| H_F^p |nu 0>>. Stored as D^2 x (2 n_max + 1), one flattened
// column-major matrix per harmonic.
class FloquetPowerState {
public:
    static FloquetPowerState identity(const ValidatedConfig& cfg);
    FloquetPowerState(int order, int dim, int n_max);

    int order() const noexcept { return order_; }
    int dim() const noexcept { return dim_; }
    int n_max() const noexcept { return n_max_; }
    Eigen::Map<const CMatrix> component(int n) const;
    Eigen::Map<CMatrix> component(int n);
    const CMatrix& data() const noexcept { return data_; }
    CMatrix& data() noexcept { return data_; }

    // Largest element in the outermost harmonics relative to the largest overall.
    double boundary_fraction() const;

private:
    int order_;
    int dim_;
    int n_max_;
    CMatrix data_;
};

enum class Contraction { dense, spectral };

// Floquet operator H_F on the truncated (mu, n) space at fixed kappa.
// The spectral contraction evaluates the same truncated convolution over n
// through a length 4 n_max + 1 discrete Fourier transform.
class FloquetOperator {
public:
    FloquetOperator(double kappa, double t0, const ValidatedConfig& cfg);

    FloquetPowerState apply(const FloquetPowerState& prev, Contraction how = Contraction::spectral) const;
    const CMatrix& harmonic(int m) const;
    double kappa() const noexcept { return kappa_; }
    // Upper bound on the operator norm used for series termination.
    double norm_bound() const noexcept { return norm_bound_; }

private:
    FloquetPowerState apply_dense(const FloquetPowerState& prev) const;
    FloquetPowerState apply_spectral(const FloquetPowerState& prev) const;

    double kappa_;
    int dim_;
    int n_max_;
    double omega_;
    double norm_bound_ = 0.0;
    std::vector<CMatrix> harmonics_;  // m = -2 n_max .. 2 n_max
    std::vector<CMatrix> samples_;    // H on the DFT time grid
    CMatrix forward_;                 // (2 n_max + 1) x M
    CMatrix backward_;                // M x (2 n_max + 1)
};

// Literal double-sum recursion step, the reference path.
FloquetPowerState floquet_power_step(const FloquetPowerState& prev, double kappa, double t0,
                                     const ValidatedConfig& cfg);

struct SeriesOptions {
    Contraction contraction = Contraction::spectral;
    // When false the series is cut at p_max without a convergence check.
    bool enforce_convergence = true;
};

// W[n] = sum_p (-i dt)^p / p! <<mu n|H_F^p|nu 0>>; block j is sum_n e^{i n omega j dt} W[n].
struct ShortTimeSeries {
    double kappa = 0.0;
    double base_time = 0.0;
    int order_used = 0;
    double last_increment = 0.0;
    double boundary_weight = 0.0;
    CMatrix weights;  // D^2 x (2 n_max + 1)
    std::vector<std::string> warnings;
};

ShortTimeSeries short_time_series(double kappa, double base_time, const ValidatedConfig& cfg,
                                  const SeriesOptions& options = {});

struct PropagatorBlock {
    double kappa = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    CMatrix matrix;
};

// The N short-time propagators of one period at fixed kappa.
struct BlockSet {
    double kappa = 0.0;
    double base_time = 0.0;
    int series_order = 0;
    std::vector<CMatrix> blocks;  // blocks[j-1] = U^{kappa,j}
    std::vector<std::string> warnings;

    const CMatrix& block(int j) const { return blocks.at(static_cast<std::size_t>(j - 1)); }
    int size() const noexcept { return static_cast<int>(blocks.size()); }
};

BlockSet build_blocks(double kappa, const ValidatedConfig& cfg, double base_time = 0.0,
                      const SeriesOptions& options = {});
BlockSet blocks_from_series(const ShortTimeSeries& series, const ValidatedConfig& cfg);

PropagatorBlock short_time_block(int j, double kappa, const ValidatedConfig& cfg,
                                 double base_time = 0.0, const SeriesOptions& options = {});

// Index k of the grid time k dt nearest to t0, reduced to [0, N).
int snap_time_index(double t0, const ValidatedConfig& cfg);

// U(t0 + T, t0) by cyclic reordering of base blocks, t0 snapped to the grid.
PropagatorBlock period_propagator(double t0, const BlockSet& blocks, const ValidatedConfig& cfg);

// Period propagators for several grid indices sharing prefix and suffix products.
std::vector<CMatrix> period_propagators(std::span<const int> time_indices, const BlockSet& blocks);

// U(t_b, t_a) for grid indices 0 <= a <= b <= N.
CMatrix interval_propagator(int a, int b, const BlockSet& blocks);

// max |(U^dagger U - 1)| restricted to interior mu indices.
double interior_unitarity_residual(const CMatrix& U, const ValidatedConfig& cfg);

// Oracle: adaptive Runge-Kutta-Fehlberg 7(8) integration of i dU/dt = H(t) U.
struct OracleOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-13;
    long max_steps = 2'000'000;
};

PropagatorBlock oracle_propagator(double t1, double t2, double kappa, const ValidatedConfig& cfg,
                                  const OracleOptions& options = {});

}  // namespace floquet
