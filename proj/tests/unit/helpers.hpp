#pragma once

#include <vector>

#include "floquet/lattice_config.hpp"

namespace floquet::test {

inline ValidatedConfig make_config(std::vector<double> phases, int mu_max = 10, int n_max = 12, int n_steps = 64,
                                   double amplitude = 1.0) {
    LatticeConfig l;
    l.phases = std::move(phases);
    l.drive_amplitude = amplitude;
    TruncationConfig t;
    t.mu_max = mu_max;
    t.n_max = n_max;
    t.n_steps = n_steps;
    t.interior_window = mu_max / 3;
    return validate(l, t);
}

}  // namespace floquet::test
