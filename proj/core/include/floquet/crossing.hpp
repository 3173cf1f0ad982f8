#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "floquet/lattice_config.hpp"
#include "floquet/modes.hpp"

namespace floquet {

struct Level {
    double quasienergy = 0.0;
    int shift_class = -1;
};

// Quasi-energy levels at an arbitrary kappa, sorted.
using LevelProbe = std::function<std::vector<Level>(double kappa)>;

LevelProbe make_level_probe(const ValidatedConfig& cfg, double t0 = 0.0);

struct BandPair {
    int a = 0;  // sorted band indices at the first grid point inside the window
    int b = 1;
};

struct KappaWindow {
    double lo = 0.0;
    double hi = 0.0;
};

struct GapOptions {
    double tolerance = 1e-10;
    int max_evaluations = 40;
};

struct GapResult {
    double gap = 0.0;
    double kappa = 0.0;
    double quasienergy = 0.0;  // midpoint of the pair at the minimum
    int evaluations = 0;
    bool converged = false;
};

// Minimal circular distance between two continued bands inside the window,
// refined between grid points with fresh diagonalizations from `probe`.
GapResult crossing_gap(const Spectrum& spectrum, BandPair pair, KappaWindow window, const LevelProbe& probe,
                       const GapOptions& options = {});

struct CrossingCandidate {
    int grid_index = 0;  // crossing lies between grid_index and grid_index + 1
    BandPair pair;       // sorted indices at grid_index
    double kappa = 0.0;
    double quasienergy = 0.0;
};

// Adjacent grid points where two continued bands with distinct defined
// shift classes swap order, restricted to an energy window.
std::vector<CrossingCandidate> find_class_crossings(const Spectrum& spectrum, double e_lo, double e_hi);

// crossing_gap over the grid points around a candidate.
GapResult refine_crossing(const Spectrum& spectrum, const CrossingCandidate& candidate, const LevelProbe& probe,
                          const GapOptions& options = {});

// Mean kinetic energy of the two bands of a candidate at its grid point.
std::pair<double, double> candidate_kinetic_energy(const Spectrum& spectrum, const CrossingCandidate& candidate,
                                                   const ValidatedConfig& cfg);

// A refined crossing with the two modes at its closest approach.
struct ReferenceCrossing {
    double kappa = 0.0;
    double quasienergy = 0.0;
    double gap = 0.0;
    int class_a = -1;
    int class_b = -1;
    CVector mode_a;
    CVector mode_b;
};

ReferenceCrossing locate_crossing(const Spectrum& spectrum, const CrossingCandidate& candidate,
                                  const ValidatedConfig& cfg, const GapOptions& options = {});

// Closest approach in another configuration of the two levels whose modes
// project most strongly on the reference pair, searched within half_width of
// the reference kappa. Throws NoApproach when the minimum is at the edge.
GapResult deformed_gap(const ReferenceCrossing& reference, const ValidatedConfig& target, double half_width,
                       const GapOptions& options = {});

}  // namespace floquet
