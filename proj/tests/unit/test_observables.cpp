#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "floquet/errors.hpp"
#include "floquet/observables.hpp"
#include "helpers.hpp"

using namespace floquet;
using floquet::test::make_config;

TEST(Husimi, SinglePlaneWave) {
    const ValidatedConfig cfg = make_config({0.0, 0.0, 0.0}, 6, 2, 8);
    const double kappa = 0.04;
    const double sigma = 0.5;
    CVector v = CVector::Zero(cfg.dim());
    v(cfg.row_of(2)) = 1.0;
    const std::vector<double> x = linspace(0.0, cfg.cell_length(), 12, true);
    const std::vector<double> p = linspace(-1.0, 1.0, 9, false);
    const HusimiGrid q = husimi(v, kappa, x, p, sigma, cfg);
    const double k = cfg.wavenumber(2, kappa);
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double expected = 2.0 * std::sqrt(pi) * sigma / cfg.cell_length() *
                                std::exp(-sigma * sigma * (k - p[j]) * (k - p[j]));
        for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(q.values(i, j), expected, 1e-14);
    }
    EXPECT_LT(husimi_shift_residual(q, 5), 1e-14);
}

TEST(Husimi, NormalizedAndNonNegative) {
    const ValidatedConfig cfg = make_config({0.0, pi, 0.0}, 6, 2, 8);
    CVector v(cfg.dim());
    for (int r = 0; r < cfg.dim(); ++r) v(r) = std::polar(1.0 / (1.0 + r % 4), 0.3 * r);
    v.normalize();
    const int nx = 240, np = 2001;
    const std::vector<double> x = linspace(0.0, cfg.cell_length(), nx, true);
    const std::vector<double> p = linspace(-20.0, 20.0, np, false);
    const HusimiGrid q = husimi(v, 0.01, x, p, 0.5, cfg);
    EXPECT_GE(q.values.minCoeff(), 0.0);
    const double dx = cfg.cell_length() / nx;
    const double dp = 40.0 / (np - 1);
    EXPECT_NEAR(q.values.sum() * dx * dp / (2.0 * pi), 1.0, 1e-9);
}

TEST(Husimi, RejectsBadInput) {
    const ValidatedConfig cfg = make_config({0.0}, 4, 2, 8);
    const CVector v = CVector::Ones(cfg.dim());
    const std::vector<double> x{0.0}, p{-1.0, 0.5};
    EXPECT_THROW(husimi(v, 0.0, x, p, 0.0, cfg), NonPositiveParameter);
    const HusimiGrid q = husimi(v, 0.0, x, p, 0.5, cfg);
    EXPECT_THROW(husimi_momentum_mirror_residual(q), IndexOutOfRange);
    FloquetMode m;
    m.components = v;
    EXPECT_THROW(husimi(m, 3, x, p, 0.5, cfg), MissingTrajectory);
}

TEST(Velocity, FreeParticleMode) {
    const ValidatedConfig cfg = make_config({0.0}, 6, 2, 8);
    const double kappa = 0.1;
    CVector v = CVector::Zero(cfg.dim());
    v(cfg.row_of(-3)) = 1.0;
    FloquetMode m;
    m.kappa = kappa;
    m.components = v;
    EXPECT_THROW(mode_velocity(m, cfg), MissingTrajectory);
    m.trajectory.assign(static_cast<std::size_t>(cfg.n_steps() + 1), v);
    EXPECT_DOUBLE_EQ(mode_velocity(m, cfg), cfg.wavenumber(-3, kappa));
}

TEST(Velocity, MirrorUnderTimeReversal) {
    const ValidatedConfig cfg = make_config({0.0, 0.0, 0.0});
    const std::vector<int> t0{0};
    const KappaModes plus = compute_kappa_modes(0.03, 1.0, build_blocks(0.03, cfg), t0, cfg);
    const KappaModes minus = compute_kappa_modes(-0.03, 1.0, build_blocks(-0.03, cfg), t0, cfg);
    for (Eigen::Index a = 0; a < plus.velocities.size(); ++a) {
        EXPECT_NEAR(plus.quasienergies(a), minus.quasienergies(a), 1e-9);
        EXPECT_NEAR(plus.velocities(a), -minus.velocities(a), 1e-6);
    }
}

TEST(Velocity, ModeTableMatchesTrajectoryAverage) {
    const ValidatedConfig cfg = make_config({0.0, pi, 0.0});
    const BlockSet blocks = build_blocks(0.02, cfg);
    const std::vector<int> t0{0, 16};
    const KappaModes km = compute_kappa_modes(0.02, 1.0, blocks, t0, cfg);
    Diagonalization d = diagonalize(period_propagator(0.0, blocks, cfg).matrix, 0.02, cfg);
    for (int a : {0, 7, 20}) {
        attach_trajectory(d.modes[a], blocks, cfg);
        EXPECT_NEAR(km.velocities(a), mode_velocity(d.modes[a], cfg), 1e-10);
        // Phi(t0) at index 16 is the trajectory entry up to the eigenvector phase.
        const cplx overlap = d.modes[a].trajectory[16].dot(km.at(16).col(a));
        EXPECT_NEAR(std::abs(overlap), 1.0, 1e-10);
    }
    EXPECT_THROW(km.at(3), MissingTrajectory);
}

class Transport : public ::testing::Test {
protected:
    static std::vector<KappaModes> table(const ValidatedConfig& cfg, std::span<const int> t0) {
        return compute_mode_table(cfg, direct_block_source(cfg), kappa_quadrature(17, cfg), t0);
    }
};

TEST_F(Transport, GaussianCompleteness) {
    const ValidatedConfig cfg = make_config({0.0, pi, 0.0});
    const std::vector<int> t0{0, 32};
    const std::vector<KappaModes> modes = table(cfg, t0);
    for (int k : t0) {
        const InitialState s = gaussian_overlaps(20.0, 20.0, k, modes, cfg);
        EXPECT_NEAR(s.completeness(), 1.0, 1e-3);
    }
    EXPECT_THROW(gaussian_packet(0.0, 0.0, 0.0, cfg), NonPositiveParameter);
}

TEST_F(Transport, NoDriveNoCurrent) {
    const ValidatedConfig cfg = make_config({0.0, 0.0, 0.0}, 10, 8, 64, 0.0);
    const std::vector<int> t0{0};
    const std::vector<KappaModes> modes = table(cfg, t0);
    EXPECT_LT(std::abs(asymptotic_current(gaussian_overlaps(20.0, 20.0, 0, modes, cfg), modes)), 1e-10);
}

TEST_F(Transport, MeanIsStartTimeAverage) {
    const ValidatedConfig cfg = make_config({0.0, 2.0 * pi / 3.0, 0.1 * pi});
    const std::vector<int> t0 = start_time_indices(4, cfg);
    EXPECT_EQ(t0, (std::vector<int>{0, 16, 32, 48}));
    const std::vector<KappaModes> modes = table(cfg, t0);
    const CurrentResult r = current_sweep(modes, t0, 20.0, 20.0, cfg);
    ASSERT_EQ(r.current.size(), 4u);
    const double avg = std::accumulate(r.current.begin(), r.current.end(), 0.0) / 4.0;
    EXPECT_NEAR(r.mean, avg, 1e-15);
    for (std::size_t i = 0; i < t0.size(); ++i)
        EXPECT_NEAR(r.current[i], asymptotic_current(gaussian_overlaps(20.0, 20.0, t0[i], modes, cfg), modes),
                    1e-15);
}

TEST_F(Transport, ReconstructionAtStart) {
    const ValidatedConfig cfg = make_config({0.0, 2.0 * pi / 3.0, 0.0});
    const std::vector<int> t0{0};
    const std::vector<KappaModes> modes = table(cfg, t0);
    const InitialState s = gaussian_overlaps(20.0, 20.0, 0, modes, cfg);
    const std::vector<int> periods{0};
    const std::vector<WavefunctionSample> w = stroboscopic_propagate(s, modes, periods, cfg);
    ASSERT_EQ(w.size(), 1u);
    EXPECT_NEAR(w[0].norm, 1.0, 1e-6);
    EXPECT_NEAR(w[0].mean_x, 20.0, 1e-6);
    EXPECT_NEAR(w[0].mean_p, 0.0, 1e-10);
    ASSERT_FALSE(w[0].density.empty());
    const auto peak = std::max_element(w[0].density.begin(), w[0].density.end()) - w[0].density.begin();
    EXPECT_NEAR(w[0].x[static_cast<std::size_t>(peak)], 20.0, 1.0);
}
