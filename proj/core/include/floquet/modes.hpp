#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "floquet/lattice_config.hpp"
#include "floquet/propagator.hpp"
#include "floquet/types.hpp"

namespace floquet {

class BlockCache;

struct FloquetMode {
    double kappa = 0.0;
    double quasienergy = 0.0;
    cplx eigenvalue{1.0, 0.0};
    CVector components;               // Phi^mu(t0), unit norm
    double residual = 0.0;            // |U Phi - lambda Phi|
    int band = -1;
    int start_index = 0;              // t0 = start_index * dt
    std::vector<CVector> trajectory;  // Phi(t0 + j dt), j = 0..N, when attached

    bool has_trajectory() const noexcept { return !trajectory.empty(); }
};

struct Diagonalization {
    std::vector<FloquetMode> modes;  // sorted by quasi-energy
    double max_modulus_deviation = 0.0;
    std::vector<std::string> warnings;

    // Columns are the mode vectors in sorted order.
    CMatrix vectors() const;
};

// Folds into [-omega/2, omega/2); the upper boundary maps to -omega/2.
double fold_quasienergy(double raw, double omega);

// Schur-based eigendecomposition of a period propagator. Near-degenerate
// clusters are rotated to diagonalize the one-barrier shift operator so
// that modes carry a shift class whenever the symmetry exists.
Diagonalization diagonalize(const CMatrix& U, double kappa, const ValidatedConfig& cfg, int start_index = 0);

struct ShiftClass {
    std::optional<int> q;
    double residual = 0.0;
    cplx eigenvalue{0.0, 0.0};
};

// Diagonal of S^{kappa,L}: e^{-i(2 pi mu / n_p + kappa L)}.
CVector shift_operator_diagonal(double kappa, const ValidatedConfig& cfg);
ShiftClass shift_class(const CVector& components, double kappa, const ValidatedConfig& cfg);
ShiftClass shift_class(const FloquetMode& mode, const ValidatedConfig& cfg);

// Weight of a vector outside the interior window |mu| <= mu_max - interior_window.
double edge_weight(const CVector& components, const ValidatedConfig& cfg);

// Phi(t0 + j dt) = e^{i eps j dt} U(t0 + j dt, t0) Phi(t0) for j = 0..N.
void attach_trajectory(FloquetMode& mode, const BlockSet& blocks, const ValidatedConfig& cfg);

struct Spectrum {
    double omega = 1.0;
    std::vector<double> kappas;
    std::vector<std::vector<double>> energies;     // sorted per kappa
    std::vector<std::vector<int>> shift_classes;   // -1 when undefined
    std::vector<std::vector<double>> residuals;
    std::vector<std::vector<int>> continuation;    // [k][a] = index at k+1 continuing band a
    std::vector<std::string> warnings;

    int points() const noexcept { return static_cast<int>(kappas.size()); }
    int bands() const noexcept { return energies.empty() ? 0 : static_cast<int>(energies.front().size()); }
    // Sorted index of a band followed from grid point `from` to grid point `to`.
    int follow(int band, int from, int to) const;
};

using BlockSource = std::function<BlockSet(double kappa)>;

BlockSource direct_block_source(const ValidatedConfig& cfg);
BlockSource cached_block_source(const ValidatedConfig& cfg, BlockCache& cache);

struct ScanOptions {
    int workers = 1;
    double t0 = 0.0;
};

Spectrum band_scan(const std::vector<double>& kappa_grid, const ValidatedConfig& cfg,
                   const BlockSource& source, const ScanOptions& options = {});
Spectrum band_scan(const std::vector<double>& kappa_grid, const ValidatedConfig& cfg,
                   const ScanOptions& options = {});

// Uniform grid over the first zone [-pi/(n_p L), pi/(n_p L)], endpoints included.
std::vector<double> zone_grid(int points, const ValidatedConfig& cfg);

// Circular distance of quasi-energies modulo omega.
double circular_distance(double a, double b, double omega);

// Distance between two quasi-energy multisets on the circle: the sorted
// levels are matched under the best cyclic offset, worst pair reported.
double multiset_distance(std::vector<double> a, std::vector<double> b, double omega);

// max_k multiset_distance(levels(kappa_k), levels(-kappa_k)); the grid must be
// mirror symmetric.
double mirror_asymmetry(const Spectrum& spectrum);

}  // namespace floquet
