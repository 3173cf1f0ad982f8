#include "floquet/crossing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floquet/errors.hpp"

namespace floquet {

namespace {

double signed_difference(double a, double b, double omega) {
    double d = std::remainder(a - b, omega);
    return d;
}

struct Sample {
    double kappa;
    double ea;
    double eb;
};

// Picks the level of a class (or any class when q < 0) nearest to a target.
int nearest_level(const std::vector<Level>& levels, double target, int q, double omega, int skip = -1) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(levels.size()); ++i) {
        if (i == skip || (q >= 0 && levels[i].shift_class != q)) continue;
        const double d = circular_distance(levels[i].quasienergy, target, omega);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

// Successive parabolic interpolation on d^2 with a golden-section fallback,
// starting from a bracket a < b < c. Fills gap, kappa, quasienergy and
// convergence into `result`.
template <class F>
void parabolic_minimum(F&& gap_squared, double a, double b, double c, double centre_b, const GapOptions& options,
                       GapResult& result) {
    double ca = 0, cb = centre_b, cc = 0;
    double fa = gap_squared(a, ca), fb = gap_squared(b, cb), fc = gap_squared(c, cc);
    if (fa < fb || fc < fb) {
        // Fresh evaluations can reorder a shallow minimum; keep the best as centre.
        if (fa < fb && fa <= fc) {
            std::swap(a, b);
            std::swap(fa, fb);
            std::swap(ca, cb);
        } else if (fc < fb) {
            std::swap(c, b);
            std::swap(fc, fb);
            std::swap(cc, cb);
        }
        if (a > c) {
            std::swap(a, c);
            std::swap(fa, fc);
        }
        if (!(a < b && b < c)) throw NoApproach("closest approach lies on the window boundary");
    }
    double previous = std::sqrt(fb);
    constexpr double golden = 0.3819660112501051;
    while (result.evaluations < options.max_evaluations) {
        const double r = (b - a) * (fb - fc), q = (b - c) * (fb - fa);
        double x = b - ((b - a) * r - (b - c) * q) / (2.0 * (r - q));
        const double guard = 1e-9 * (c - a);
        if (!std::isfinite(x) || x <= a || x >= c || std::abs(x - b) < guard)
            x = (c - b > b - a) ? b + golden * (c - b) : b - golden * (b - a);
        double cx = 0;
        const double fx = gap_squared(x, cx);
        if (fx < fb) {
            if (x < b) {
                c = b;
                fc = fb;
            } else {
                a = b;
                fa = fb;
            }
            b = x;
            fb = fx;
            cb = cx;
        } else if (x < b) {
            a = x;
            fa = fx;
        } else {
            c = x;
            fc = fx;
        }
        const double d = std::sqrt(fb);
        if (std::abs(previous - d) < options.tolerance && result.evaluations >= 5) {
            result.converged = true;
            break;
        }
        previous = d;
        if (c - a < 1e-15 * std::max(1.0, std::abs(b))) {
            result.converged = true;
            break;
        }
    }
    result.gap = std::sqrt(fb);
    result.kappa = b;
    result.quasienergy = cb;
}

}  // namespace

LevelProbe make_level_probe(const ValidatedConfig& cfg, double t0) {
    return [cfg, t0](double kappa) {
        const BlockSet blocks = build_blocks(kappa, cfg);
        const CMatrix U = period_propagator(t0, blocks, cfg).matrix;
        const Diagonalization d = diagonalize(U, kappa, cfg, snap_time_index(t0, cfg));
        std::vector<Level> levels;
        levels.reserve(d.modes.size());
        for (const FloquetMode& m : d.modes) levels.push_back({m.quasienergy, shift_class(m, cfg).q.value_or(-1)});
        return levels;
    };
}

GapResult crossing_gap(const Spectrum& spectrum, BandPair pair, KappaWindow window, const LevelProbe& probe,
                       const GapOptions& options) {
    std::vector<int> inside;
    for (int k = 0; k < spectrum.points(); ++k)
        if (spectrum.kappas[k] >= window.lo && spectrum.kappas[k] <= window.hi) inside.push_back(k);
    if (inside.size() < 3) throw NoApproach("window holds fewer than three grid points");
    const int bands = spectrum.bands();
    if (pair.a < 0 || pair.b < 0 || pair.a >= bands || pair.b >= bands)
        throw IndexOutOfRange("band index outside spectrum");

    const double omega = spectrum.omega;
    const int k0 = inside.front();
    const int qa = spectrum.shift_classes[k0][pair.a];
    const int qb = spectrum.shift_classes[k0][pair.b];
    const bool by_class = qa >= 0 && qb >= 0 && qa != qb;

    std::vector<Sample> grid;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < inside.size(); ++i) {
        const int k = inside[i];
        const double ea = spectrum.energies[k][spectrum.follow(pair.a, k0, k)];
        const double eb = spectrum.energies[k][spectrum.follow(pair.b, k0, k)];
        grid.push_back({spectrum.kappas[k], ea, eb});
        const double d = circular_distance(ea, eb, omega);
        if (d < best) {
            best = d;
            best_i = i;
        }
    }
    GapResult result;
    result.kappa = grid[best_i].kappa;
    result.quasienergy = grid[best_i].ea + 0.5 * signed_difference(grid[best_i].eb, grid[best_i].ea, omega);
    if (best == 0.0) {
        result.converged = true;
        return result;
    }
    if (best_i == 0 || best_i + 1 == grid.size())
        throw NoApproach("closest approach lies on the window boundary");

    // Piecewise-linear references through the three grid samples around the minimum.
    const Sample left = grid[best_i - 1], mid = grid[best_i], right = grid[best_i + 1];
    auto unwrap = [&](double v, double around) { return around + signed_difference(v, around, omega); };
    auto reference = [&](double kappa, bool first) {
        const double vm = first ? mid.ea : mid.eb;
        const Sample& other = kappa < mid.kappa ? left : right;
        const double vo = unwrap(first ? other.ea : other.eb, vm);
        const double s = (kappa - mid.kappa) / (other.kappa - mid.kappa);
        return vm + s * (vo - vm);
    };

    auto gap_squared = [&](double kappa, double& centre) {
        const std::vector<Level> levels = probe(kappa);
        ++result.evaluations;
        if (levels.size() < 2) throw NoApproach("probe returned fewer than two levels");
        int ia, ib;
        if (by_class) {
            ia = nearest_level(levels, reference(kappa, true), qa, omega);
            ib = nearest_level(levels, reference(kappa, false), qb, omega);
            if (ia < 0 || ib < 0) throw NoApproach("shift class vanished during refinement");
        } else {
            const double ra = reference(kappa, true);
            const double m = ra + 0.5 * signed_difference(reference(kappa, false), ra, omega);
            ia = nearest_level(levels, m, -1, omega);
            ib = nearest_level(levels, m, -1, omega, ia);
        }
        const double ea = levels[ia].quasienergy, eb = levels[ib].quasienergy;
        centre = ea + 0.5 * signed_difference(eb, ea, omega);
        const double d = circular_distance(ea, eb, omega);
        return d * d;
    };

    parabolic_minimum(gap_squared, left.kappa, mid.kappa, right.kappa, result.quasienergy, options, result);
    return result;
}
std::vector<CrossingCandidate> find_class_crossings(const Spectrum& spectrum, double e_lo, double e_hi) {
    const double omega = spectrum.omega;
    std::vector<CrossingCandidate> out;
    const int bands = spectrum.bands();
    for (int k = 0; k + 1 < spectrum.points(); ++k) {
        const auto& e0 = spectrum.energies[k];
        const auto& e1 = spectrum.energies[k + 1];
        const auto& q0 = spectrum.shift_classes[k];
        for (int a = 0; a < bands; ++a) {
            if (q0[a] < 0) continue;
            const int a1 = spectrum.continuation[k][a];
            for (int b = a + 1; b < bands; ++b) {
                if (q0[b] < 0 || q0[b] == q0[a]) continue;
                const double d0 = signed_difference(e0[a], e0[b], omega);
                if (std::abs(d0) > 0.1 * omega) continue;
                const int b1 = spectrum.continuation[k][b];
                const double d1 = signed_difference(e1[a1], e1[b1], omega);
                if (std::abs(d1) > 0.1 * omega || d0 * d1 > 0.0) continue;
                const double s = d0 / (d0 - d1);
                const double kappa = spectrum.kappas[k] + s * (spectrum.kappas[k + 1] - spectrum.kappas[k]);
                const double energy = e0[a] + s * signed_difference(e1[a1], e0[a], omega);
                if (energy < e_lo || energy > e_hi) continue;
                out.push_back({k, {a, b}, kappa, energy});
            }
        }
    }
    return out;
}

GapResult refine_crossing(const Spectrum& spectrum, const CrossingCandidate& candidate, const LevelProbe& probe,
                          const GapOptions& options) {
    const int k = candidate.grid_index;
    const int lo = std::max(k - 1, 0);
    const int hi = std::min(k + 2, spectrum.points() - 1);
    const BandPair pair{spectrum.follow(candidate.pair.a, k, lo), spectrum.follow(candidate.pair.b, k, lo)};
    return crossing_gap(spectrum, pair, {spectrum.kappas[lo], spectrum.kappas[hi]}, probe, options);
}

namespace {

Diagonalization modes_at(double kappa, const ValidatedConfig& cfg) {
    return diagonalize(period_propagator(0.0, build_blocks(kappa, cfg), cfg).matrix, kappa, cfg);
}

double kinetic_energy(const CVector& v, double kappa, const ValidatedConfig& cfg) {
    double e = 0.0;
    for (int r = 0; r < v.size(); ++r) {
        const double k = cfg.wavenumber(cfg.mu_of(r), kappa);
        e += std::norm(v[r]) * 0.5 * k * k;
    }
    return e / v.squaredNorm();
}

}  // namespace

std::pair<double, double> candidate_kinetic_energy(const Spectrum& spectrum, const CrossingCandidate& candidate,
                                                   const ValidatedConfig& cfg) {
    const double kappa = spectrum.kappas[candidate.grid_index];
    const Diagonalization d = modes_at(kappa, cfg);
    return {kinetic_energy(d.modes[candidate.pair.a].components, kappa, cfg),
            kinetic_energy(d.modes[candidate.pair.b].components, kappa, cfg)};
}

ReferenceCrossing locate_crossing(const Spectrum& spectrum, const CrossingCandidate& candidate,
                                  const ValidatedConfig& cfg, const GapOptions& options) {
    const GapResult g = refine_crossing(spectrum, candidate, make_level_probe(cfg), options);
    ReferenceCrossing out;
    out.kappa = g.kappa;
    out.quasienergy = g.quasienergy;
    out.gap = g.gap;
    out.class_a = spectrum.shift_classes[candidate.grid_index][candidate.pair.a];
    out.class_b = spectrum.shift_classes[candidate.grid_index][candidate.pair.b];

    const Diagonalization d = modes_at(g.kappa, cfg);
    std::vector<Level> levels;
    for (const FloquetMode& m : d.modes) levels.push_back({m.quasienergy, shift_class(m, cfg).q.value_or(-1)});
    const int ia = nearest_level(levels, g.quasienergy, out.class_a, spectrum.omega);
    const int ib = nearest_level(levels, g.quasienergy, out.class_b, spectrum.omega, ia);
    if (ia < 0 || ib < 0) throw NoApproach("crossing modes not found at the refined kappa");
    out.mode_a = d.modes[ia].components;
    out.mode_b = d.modes[ib].components;
    return out;
}

GapResult deformed_gap(const ReferenceCrossing& reference, const ValidatedConfig& target, double half_width,
                       const GapOptions& options) {
    GapResult result;
    const double omega = target.omega();
    auto gap_squared = [&](double kappa, double& centre) {
        const Diagonalization d = modes_at(kappa, target);
        ++result.evaluations;
        int first = -1, second = -1;
        double w1 = -1.0, w2 = -1.0;
        for (int i = 0; i < static_cast<int>(d.modes.size()); ++i) {
            const CVector& v = d.modes[i].components;
            const double w = std::norm(reference.mode_a.dot(v)) + std::norm(reference.mode_b.dot(v));
            if (w > w1) {
                second = first;
                w2 = w1;
                first = i;
                w1 = w;
            } else if (w > w2) {
                second = i;
                w2 = w;
            }
        }
        const double ea = d.modes[first].quasienergy, eb = d.modes[second].quasienergy;
        centre = ea + 0.5 * signed_difference(eb, ea, omega);
        const double dist = circular_distance(ea, eb, omega);
        return dist * dist;
    };

    constexpr int samples = 5;
    std::vector<double> ks(samples), fs(samples);
    std::size_t best = 0;
    for (int i = 0; i < samples; ++i) {
        double centre = 0;
        ks[i] = reference.kappa - half_width + 2.0 * half_width * i / (samples - 1);
        fs[i] = gap_squared(ks[i], centre);
        if (fs[i] < fs[best]) best = i;
    }
    if (best == 0 || best + 1 == samples) throw NoApproach("closest approach lies on the window boundary");
    parabolic_minimum(gap_squared, ks[best - 1], ks[best], ks[best + 1], 0.0, options, result);
    return result;
}

}  // namespace floquet
