#pragma once

#include <functional>
#include <string>
#include <vector>

#include "floquet/lattice_config.hpp"

namespace floquet::acceptance {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id = 0;
    std::string name;
    std::function<Outcome()> run;
};

std::vector<Criterion> propagation_criteria();
std::vector<Criterion> spectrum_criteria();
std::vector<Criterion> symmetry_criteria();
std::vector<Criterion> transport_criteria();

// Desk scale: mu_max 48, n_max 24, N 256.
inline ValidatedConfig lattice(std::vector<double> phases, int mu_max = 48, int n_max = 24, int n_steps = 256,
                               double amplitude = 1.0, int interior_window = 8) {
    LatticeConfig l;
    l.phases = std::move(phases);
    l.drive_amplitude = amplitude;
    TruncationConfig t;
    t.mu_max = mu_max;
    t.n_max = n_max;
    t.n_steps = n_steps;
    t.interior_window = interior_window;
    return validate(l, t);
}

// The reduced scale used where many diagonalizations per kappa are needed.
inline ValidatedConfig reduced(std::vector<double> phases, double amplitude = 1.0) {
    return lattice(std::move(phases), 32, 16, 128, amplitude, 4);
}

std::string sci(double v);

}  // namespace floquet::acceptance
