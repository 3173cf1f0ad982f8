#include <algorithm>
#include <cmath>

#include "floquet/crossing.hpp"
#include "floquet/errors.hpp"
#include "floquet/modes.hpp"
#include "harness.hpp"

namespace floquet::acceptance {

namespace {

constexpr double crossing_lo = 0.265;
constexpr double crossing_hi = 0.285;
// Low-lying pairs only; above this the crossing partners sit near the truncation edge.
constexpr double max_kinetic = 5.0;

Outcome shift_classes() {
    const ValidatedConfig uni = lattice({0.0, 0.0, 0.0});
    const double L = uni.lattice().barrier_spacing;
    const int np = uni.n_cells();
    int total = 0;
    int matched = 0;
    double worst = 0.0;
    for (double kappa : zone_grid(5, uni)) {
        const Diagonalization d = diagonalize(period_propagator(0.0, build_blocks(kappa, uni), uni).matrix, kappa, uni);
        for (const FloquetMode& m : d.modes) {
            ++total;
            const ShiftClass c = shift_class(m, uni);
            if (!c.q) continue;
            const cplx expected = std::exp(-I * (2.0 * pi * *c.q / np + L * kappa));
            const double dev = std::max(std::abs(c.eigenvalue - expected), c.residual);
            worst = std::max(worst, dev);
            if (dev < 1e-6) ++matched;
        }
    }
    bool ok = matched == total;
    std::string detail = "uniform " + std::to_string(matched) + "/" + std::to_string(total) + " classified, worst " +
                         sci(worst);

    for (double d2 : {pi, 2.0 * pi / 3.0}) {
        const ValidatedConfig cfg = lattice({0.0, d2, 0.0});
        int interior = 0;
        int unclassified = 0;
        for (double kappa : {0.0, 0.4 * cfg.zone_edge()}) {
            const Diagonalization d =
                diagonalize(period_propagator(0.0, build_blocks(kappa, cfg), cfg).matrix, kappa, cfg);
            for (const FloquetMode& m : d.modes) {
                if (edge_weight(m.components, cfg) > 1e-3) continue;
                ++interior;
                if (!shift_class(m, cfg).q) ++unclassified;
            }
        }
        ok = ok && 2 * unclassified > interior;
        detail += std::string(d2 == pi ? "; (0,pi,0)" : "; (0,2pi/3,0)") + " unclassified " +
                  std::to_string(unclassified) + "/" + std::to_string(interior) + " interior";
    }
    return {ok, detail};
}

std::vector<CrossingCandidate> low_lying_crossings(const Spectrum& s, const ValidatedConfig& cfg) {
    std::vector<CrossingCandidate> out;
    for (const CrossingCandidate& c : find_class_crossings(s, crossing_lo, crossing_hi)) {
        const auto [ka, kb] = candidate_kinetic_energy(s, c, cfg);
        if (std::max(ka, kb) < max_kinetic) out.push_back(c);
    }
    return out;
}

Outcome exact_to_avoided() {
    const ValidatedConfig cfg = reduced({0.0, 0.0, 0.0});
    const std::vector<double> grid = zone_grid(33, cfg);
    const double h = grid[1] - grid[0];
    const Spectrum s = band_scan(grid, cfg);
    const std::vector<CrossingCandidate> cands = low_lying_crossings(s, cfg);
    if (cands.empty()) return {false, "no class crossing near 0.275"};

    bool ok = true;
    std::string detail;
    for (const CrossingCandidate& c : cands) {
        const ReferenceCrossing ref = locate_crossing(s, c, cfg);
        double prev = ref.gap;
        bool increasing = ref.gap < 1e-8;
        std::string gaps = sci(ref.gap);
        for (double d2 : {0.1, 0.2, 0.3}) {
            const GapResult g = deformed_gap(ref, reduced({0.0, d2 * pi, 0.0}), h);
            increasing = increasing && g.gap > prev;
            prev = g.gap;
            gaps += " < " + sci(g.gap);
        }
        ok = ok && increasing;
        char head[64];
        std::snprintf(head, sizeof head, "%skappa %+.4f eps %.4f: ", detail.empty() ? "" : "; ", ref.kappa,
                      ref.quasienergy);
        detail += head + gaps;
    }
    return {ok, detail + " (delta2 = 0, 0.1pi, 0.2pi, 0.3pi)"};
}

Outcome amplitude_control() {
    const ValidatedConfig a1 = reduced({0.0, 0.0, 0.0}, 1.0);
    const ValidatedConfig a2 = reduced({0.0, 0.0, 0.0}, 1.25);
    const std::vector<double> grid = zone_grid(33, a1);
    const double h = grid[1] - grid[0];
    const Spectrum s1 = band_scan(grid, a1);
    const Spectrum s2 = band_scan(grid, a2);

    double change = 0.0;
    for (int k = 0; k < s1.points(); ++k)
        change = std::max(change, multiset_distance(s1.energies[k], s2.energies[k], a1.omega()));

    double worst = 0.0;
    int count = 0;
    const LevelProbe p1 = make_level_probe(a1);
    const LevelProbe p2 = make_level_probe(a2);
    for (const CrossingCandidate& c : low_lying_crossings(s1, a1)) {
        worst = std::max(worst, refine_crossing(s1, c, p1).gap);
        const ReferenceCrossing ref = locate_crossing(s1, c, a1);
        worst = std::max(worst, deformed_gap(ref, a2, h).gap);
        ++count;
    }
    for (const CrossingCandidate& c : low_lying_crossings(s2, a2)) {
        worst = std::max(worst, refine_crossing(s2, c, p2).gap);
        ++count;
    }
    const bool ok = change > 1e-3 && count > 0 && worst < 1e-8;
    return {ok, "band shift " + sci(change) + " (need > 1e-3); " + std::to_string(count) +
                    " class crossings, worst gap " + sci(worst) + " (need < 1e-8)"};
}

Outcome spectrum_symmetry() {
    const ValidatedConfig sym = reduced({0.0, 2.0 * pi / 3.0, 0.0});
    const ValidatedConfig brk = reduced({0.0, 2.0 * pi / 3.0, 0.05 * pi});
    const double a = mirror_asymmetry(band_scan(zone_grid(9, sym), sym));
    const double b = mirror_asymmetry(band_scan(zone_grid(9, brk), brk));
    return {a < 1e-8 && b > 1e-4,
            "(0,2pi/3,0) asymmetry " + sci(a) + " (need < 1e-8); delta3 = 0.05pi " + sci(b) + " (need > 1e-4)"};
}

}  // namespace

std::vector<Criterion> spectrum_criteria() {
    return {
        {4, "shift-classes", shift_classes},
        {5, "exact-to-avoided", exact_to_avoided},
        {6, "amplitude-control", amplitude_control},
        {7, "spectrum-mirror", spectrum_symmetry},
    };
}

}  // namespace floquet::acceptance
