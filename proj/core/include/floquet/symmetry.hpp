#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "floquet/lattice_config.hpp"
#include "floquet/modes.hpp"
#include "floquet/propagator.hpp"
#include "floquet/types.hpp"

namespace floquet {

enum class IdentityTag {
    time_reversal_U,
    time_reversal_U_general,
    parity_composition,
    fbm_time_reversal,
    fbm_parity,
    fbm_both,
    stripe,
    husimi_t,
    husimi_x,
    current_t,
    current_x,
};

std::string_view to_string(IdentityTag tag);

struct SymmetryRecord {
    IdentityTag tag = IdentityTag::stripe;
    double residual = 0.0;
    double tolerance = 0.0;
    bool applicable = true;  // the Hamiltonian scan confirms the underlying symmetry
    bool passed = false;     // applicable: residual < tolerance; otherwise residual > margin
    std::vector<int> signs;  // fitted sigma per mode, 0 where the relation fails
    std::string note;
};

// Direct test of the Hamiltonian on a space-time grid:
//   time reversal  V(x, t) = V(x, -t)
//   parity         V(x, t) = V(chi - x, t + T/2), chi a multiple of L
//   shift          V(x + L, t) = V(x, t)
struct HamiltonianScan {
    double time_reversal_residual = 0.0;
    bool time_reversal = false;
    double parity_residual = 0.0;
    double parity_center = 0.0;  // best chi
    bool parity = false;
    double shift_residual = 0.0;
    bool shift = false;
    std::vector<std::string> lint;
};

struct ScanGrid {
    int x_points_per_spacing = 200;
    int t_points = 64;
    double tolerance = 1e-10;
};

HamiltonianScan scan_hamiltonian_symmetry(const ValidatedConfig& cfg, const ScanGrid& grid = {});

// max_interior |U^kappa_{mu nu}(T,0) - U^{-kappa}_{-nu,-mu}(T,0)|.
double check_time_reversal_U(const CMatrix& U_plus, const CMatrix& U_minus, const ValidatedConfig& cfg);

// How interval blocks are mirrored under t -> T - t.
//   continuous:  block j pairs with block N + 1 - j (exact propagators)
//   first_order: block j pairs with block N - j (endpoint-evaluated p_max = 1 blocks)
enum class MirrorConvention { continuous, first_order };

// Compares U^kappa(T - t1, T - t2) with the index-flipped transpose of
// U^{-kappa}(t2, t1) for grid times t1 = a dt < t2 = b dt. The residual is
// relative to max(1, max |element|).
double check_time_reversal_general(int a, int b, const BlockSet& plus, const BlockSet& minus,
                                   const ValidatedConfig& cfg,
                                   MirrorConvention mirror = MirrorConvention::continuous);

// U(T/2, 0) from base blocks; OddStepCount when N is odd.
CMatrix half_period_propagator(const BlockSet& blocks);

// U^kappa(T,0) = P U^{-kappa}(T/2,0) P U^kappa(T/2,0) with the parity map
// P|nu_kappa> = e^{i k_nu chi} |(-nu)_{-kappa}>.
double check_parity_composition(const CMatrix& U_half_minus, const CMatrix& U_half, const CMatrix& U_full,
                                double kappa, double chi, const ValidatedConfig& cfg);

// Fraction of |U|^2 outside the stripes (mu - nu) = 0 mod n_p.
double stripe_report(const CMatrix& U, int n_cells);

enum class FbmKind { time_reversal, parity, both };

struct FbmReport {
    FbmKind kind = FbmKind::time_reversal;
    double residual = 0.0;  // worst over modes
    std::vector<int> signs;
    std::vector<double> residuals;
    std::vector<int> partners;
    std::vector<std::string> warnings;
};

// Modes need trajectories starting at t = 0. For `both` only `plus` is used.
// With `time_index` set the relation is tested at that grid time only.
FbmReport check_fbm_relation(const std::vector<FloquetMode>& plus, const std::vector<FloquetMode>& minus,
                             FbmKind kind, double chi, const ValidatedConfig& cfg,
                             std::optional<int> time_index = std::nullopt);

}  // namespace floquet
