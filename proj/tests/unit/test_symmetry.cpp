#include <gtest/gtest.h>

#include "floquet/errors.hpp"
#include "floquet/modes.hpp"
#include "floquet/symmetry.hpp"
#include "helpers.hpp"

using namespace floquet;
using floquet::test::make_config;

namespace {

std::vector<FloquetMode> modes_with_trajectories(double kappa, const ValidatedConfig& cfg) {
    const BlockSet blocks = build_blocks(kappa, cfg);
    Diagonalization d = diagonalize(period_propagator(0.0, blocks, cfg).matrix, kappa, cfg);
    std::vector<FloquetMode> out;
    // The truncated basis is closed under mu -> -mu, so edge modes obey the relations too.
    for (FloquetMode& m : d.modes) {
        attach_trajectory(m, blocks, cfg);
        out.push_back(std::move(m));
    }
    return out;
}

FloquetMode constant_mode(const CVector& v, double kappa, double energy, const ValidatedConfig& cfg) {
    FloquetMode m;
    m.kappa = kappa;
    m.quasienergy = energy;
    m.components = v;
    m.trajectory.assign(static_cast<std::size_t>(cfg.n_steps() + 1), v);
    return m;
}

}  // namespace

TEST(Symmetry, ScanRecognizesSymmetries) {
    const HamiltonianScan uniform = scan_hamiltonian_symmetry(make_config({0.0, 0.0, 0.0}, 4, 2, 8));
    EXPECT_TRUE(uniform.time_reversal);
    EXPECT_TRUE(uniform.parity);
    EXPECT_TRUE(uniform.shift);

    const HamiltonianScan none = scan_hamiltonian_symmetry(make_config({0.0, pi, pi / 4.0}, 4, 2, 8));
    EXPECT_FALSE(none.time_reversal);
    EXPECT_FALSE(none.parity);
    EXPECT_FALSE(none.shift);
    EXPECT_GT(none.parity_residual, 1e-3);

    const HamiltonianScan half = scan_hamiltonian_symmetry(make_config({0.0, pi / 2.0, 0.0}, 4, 2, 8));
    EXPECT_FALSE(half.time_reversal);
    EXPECT_TRUE(half.parity);
    EXPECT_FALSE(half.shift);

    const HamiltonianScan staggered = scan_hamiltonian_symmetry(make_config({0.0, pi, 0.0}, 4, 2, 8));
    EXPECT_TRUE(staggered.time_reversal);
    EXPECT_FALSE(staggered.shift);
}

TEST(Symmetry, LintFlagsShiftedCenters) {
    const HamiltonianScan s = scan_hamiltonian_symmetry(make_config({0.0, 2.0 * pi / 3.0, 0.0}, 4, 2, 8));
    EXPECT_TRUE(s.parity);
    EXPECT_NE(s.parity_center, 0.0);
    EXPECT_FALSE(s.lint.empty());
    const HamiltonianScan t = scan_hamiltonian_symmetry(make_config({pi / 2.0, pi / 2.0, pi / 2.0}, 4, 2, 8));
    EXPECT_FALSE(t.time_reversal);
    ASSERT_FALSE(t.lint.empty());
    EXPECT_NE(t.lint.front().find("tau"), std::string::npos);
}

TEST(Symmetry, TimeReversedPropagator) {
    const ValidatedConfig cfg = make_config({0.0, 0.0, 0.0});
    const double kappa = 0.021;
    const CMatrix plus = period_propagator(0.0, build_blocks(kappa, cfg), cfg).matrix;
    const CMatrix minus = period_propagator(0.0, build_blocks(-kappa, cfg), cfg).matrix;
    EXPECT_LT(check_time_reversal_U(plus, minus, cfg), 1e-7);
    EXPECT_LT(check_time_reversal_U(plus, plus, cfg), 1.0);
    // At kappa = 0 the relation compares U with its own flipped transpose.
    const CMatrix zero = period_propagator(0.0, build_blocks(0.0, cfg), cfg).matrix;
    EXPECT_LT(check_time_reversal_U(zero, zero, cfg), 1e-7);
}

TEST(Symmetry, GeneralTimeReversalFirstOrderExact) {
    LatticeConfig l;
    l.phases = {0.0, 0.0, 0.0};
    TruncationConfig t;
    t.mu_max = 8;
    t.n_max = 6;
    t.n_steps = 32;
    t.p_max = 1;
    t.interior_window = 2;
    const ValidatedConfig cfg = validate(l, t);
    SeriesOptions first;
    first.enforce_convergence = false;
    const BlockSet plus = build_blocks(0.03, cfg, 0.0, first);
    const BlockSet minus = build_blocks(-0.03, cfg, 0.0, first);
    for (auto [a, b] : {std::pair{0, 32}, std::pair{3, 11}, std::pair{7, 30}})
        EXPECT_LT(check_time_reversal_general(a, b, plus, minus, cfg, MirrorConvention::first_order), 1e-12);
}

TEST(Symmetry, GeneralTimeReversalFullOrder) {
    const ValidatedConfig cfg = make_config({0.0, pi, 0.0});
    const BlockSet plus = build_blocks(0.03, cfg);
    const BlockSet minus = build_blocks(-0.03, cfg);
    for (auto [a, b] : {std::pair{0, 64}, std::pair{5, 17}, std::pair{20, 63}})
        EXPECT_LT(check_time_reversal_general(a, b, plus, minus, cfg), 1e-6);
    EXPECT_THROW(check_time_reversal_general(10, 5, plus, minus, cfg), IndexOutOfRange);
}

TEST(Symmetry, ParityComposition) {
    const ValidatedConfig cfg = make_config({0.0, 2.0 * pi / 3.0, 0.0});
    const double chi = scan_hamiltonian_symmetry(cfg).parity_center;
    const double kappa = 0.027;
    const BlockSet plus = build_blocks(kappa, cfg);
    const BlockSet minus = build_blocks(-kappa, cfg);
    const CMatrix full = period_propagator(0.0, plus, cfg).matrix;
    EXPECT_LT(check_parity_composition(half_period_propagator(minus), half_period_propagator(plus), full, kappa, chi,
                                       cfg),
              1e-6);

    const ValidatedConfig broken = make_config({0.0, pi, pi / 4.0});
    const BlockSet bp = build_blocks(kappa, broken);
    const BlockSet bm = build_blocks(-kappa, broken);
    double best = 1e300;
    for (int c = 0; c < 3; ++c)
        best = std::min(best, check_parity_composition(half_period_propagator(bm), half_period_propagator(bp),
                                                       period_propagator(0.0, bp, broken).matrix, kappa,
                                                       c * 10.0, broken));
    EXPECT_GT(best, 1e-3);
}

TEST(Symmetry, ParityCompositionFreeParticle) {
    const ValidatedConfig cfg = make_config({0.0}, 8, 2, 16);
    const double kappa = 0.2;
    auto kinetic = [&](double k, double t) {
        CVector d(cfg.dim());
        for (int r = 0; r < cfg.dim(); ++r) {
            const double w = cfg.wavenumber(cfg.mu_of(r), k);
            d(r) = std::polar(1.0, -0.5 * w * w * t);
        }
        return CMatrix(d.asDiagonal());
    };
    const double T = cfg.period();
    EXPECT_LT(check_parity_composition(kinetic(-kappa, T / 2), kinetic(kappa, T / 2), kinetic(kappa, T), kappa, 0.0,
                                       cfg),
              1e-13);
}

TEST(Symmetry, OddStepCountRejected) {
    const ValidatedConfig cfg = make_config({0.0, 0.0, 0.0}, 4, 2, 9);
    EXPECT_THROW(half_period_propagator(build_blocks(0.0, cfg)), OddStepCount);
}

TEST(Symmetry, StripeStructure) {
    const ValidatedConfig uniform = make_config({0.0, 0.0, 0.0});
    EXPECT_LT(stripe_report(period_propagator(0.0, build_blocks(0.01, uniform), uniform).matrix, 3), 1e-20);
    const ValidatedConfig staggered = make_config({0.0, pi, 0.0});
    EXPECT_GT(stripe_report(period_propagator(0.0, build_blocks(0.01, staggered), staggered).matrix, 3), 1e-4);
    const ValidatedConfig single = make_config({0.0}, 6, 4, 16);
    EXPECT_EQ(stripe_report(period_propagator(0.0, build_blocks(0.0, single), single).matrix, 1), 0.0);
}

TEST(Symmetry, ConstructedRealSymmetricVector) {
    const ValidatedConfig cfg = make_config({0.0}, 4, 2, 8);
    CVector v(cfg.dim());
    for (int r = 0; r < cfg.dim(); ++r) v(r) = 1.0 / (1.0 + std::abs(cfg.mu_of(r)));
    v.normalize();
    const FloquetMode m = constant_mode(v, 0.0, 0.1, cfg);
    const FbmReport r = check_fbm_relation({m}, {m}, FbmKind::time_reversal, 0.0, cfg, 0);
    ASSERT_EQ(r.signs.size(), 1u);
    EXPECT_EQ(r.signs.front(), 1);
    EXPECT_LT(r.residual, 1e-15);

    // A phase convention change of the mode must not change the fitted sign.
    const FloquetMode rotated = constant_mode(std::polar(1.0, 0.7) * v, 0.0, 0.1, cfg);
    const FbmReport rr = check_fbm_relation({rotated}, {m}, FbmKind::time_reversal, 0.0, cfg, 0);
    EXPECT_EQ(rr.signs.front(), 1);
    EXPECT_LT(rr.residual, 1e-15);

    CVector odd = v;
    for (int r = 0; r < cfg.dim(); ++r) odd(r) *= cplx(0.0, cfg.mu_of(r) >= 0 ? 1.0 : -1.0);
    odd(cfg.row_of(0)) = 0.0;
    odd.normalize();
    const FloquetMode mo = constant_mode(odd, 0.0, 0.1, cfg);
    EXPECT_EQ(check_fbm_relation({mo}, {mo}, FbmKind::time_reversal, 0.0, cfg, 0).signs.front(), -1);
}

TEST(Symmetry, FbmRelationsForUniformDriving) {
    const ValidatedConfig cfg = make_config({0.0, 0.0, 0.0});
    const std::vector<FloquetMode> zero = modes_with_trajectories(0.0, cfg);
    ASSERT_FALSE(zero.empty());
    const FbmReport at_t0 = check_fbm_relation(zero, zero, FbmKind::time_reversal, 0.0, cfg, 0);
    EXPECT_LT(at_t0.residual, 1e-6);
    for (int s : at_t0.signs) EXPECT_TRUE(s == 1 || s == -1);

    const std::vector<FloquetMode> plus = modes_with_trajectories(0.02, cfg);
    const std::vector<FloquetMode> minus = modes_with_trajectories(-0.02, cfg);
    EXPECT_LT(check_fbm_relation(plus, minus, FbmKind::time_reversal, 0.0, cfg).residual, 1e-6);
    EXPECT_LT(check_fbm_relation(plus, minus, FbmKind::parity, 0.0, cfg).residual, 1e-6);
    EXPECT_LT(check_fbm_relation(plus, plus, FbmKind::both, 0.0, cfg).residual, 1e-6);
}

TEST(Symmetry, ParityWithoutTimeReversal) {
    const ValidatedConfig cfg = make_config({0.0, pi / 2.0, 0.0});
    const double chi = scan_hamiltonian_symmetry(cfg).parity_center;
    const std::vector<FloquetMode> plus = modes_with_trajectories(0.02, cfg);
    const std::vector<FloquetMode> minus = modes_with_trajectories(-0.02, cfg);
    ASSERT_FALSE(plus.empty());
    EXPECT_LT(check_fbm_relation(plus, minus, FbmKind::parity, chi, cfg).residual, 1e-6);
    EXPECT_GT(check_fbm_relation(plus, minus, FbmKind::time_reversal, 0.0, cfg).residual, 1e-3);
}

TEST(Symmetry, FbmNeedsTrajectories) {
    const ValidatedConfig cfg = make_config({0.0}, 4, 2, 8);
    FloquetMode m;
    m.components = CVector::Ones(cfg.dim());
    EXPECT_THROW(check_fbm_relation({m}, {m}, FbmKind::time_reversal, 0.0, cfg), MissingTrajectory);
}
