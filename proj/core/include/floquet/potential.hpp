#pragma once

#include "floquet/lattice_config.hpp"
#include "floquet/types.hpp"

namespace floquet {

// Temporal Fourier component n of a single barrier at the origin in the
// orthonormal cell basis, V = sum_n V^(n) e^{i n omega t}.
// Harmonics up to |n| <= 2 n_max are accepted: the truncated Floquet
// recursion couples components whose indices differ by that much.
cplx single_barrier_element(int n, int mu, int nu, const ValidatedConfig& cfg);

// Unit-cell component V^(n)_{mu nu} with barriers at x_i = i L, i = 1..n_p.
CMatrix unit_cell_matrix(int n, double t0, const ValidatedConfig& cfg);

// Instantaneous potential matrix V_{mu nu}(t) from displaced Gaussians,
// without going through the harmonic expansion.
CMatrix instantaneous_potential(double t, const ValidatedConfig& cfg);

// Real-space potential V(x, t) of the periodic lattice.
double potential_value(double x, double t, const ValidatedConfig& cfg);

}  // namespace floquet
