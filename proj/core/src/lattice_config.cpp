#include "floquet/lattice_config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "floquet/errors.hpp"
#include "floquet/types.hpp"

namespace floquet {

namespace {

std::string hex_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0)
        throw NonPositiveParameter(std::string(name) + " must be positive and finite");
}

double canonical_phase(double delta) {
    if (!std::isfinite(delta)) throw ConfigError("phase must be finite");
    double r = std::fmod(delta, 2.0 * pi);
    if (r < 0.0) r += 2.0 * pi;
    if (r >= 2.0 * pi) r = 0.0;
    return r;
}

std::string canonical_text(const LatticeConfig& l, const TruncationConfig& t, const Tolerances& tol) {
    std::ostringstream os;
    os << "V0=" << hex_double(l.barrier_height) << ";Delta=" << hex_double(l.barrier_width)
       << ";L=" << hex_double(l.barrier_spacing) << ";A=" << hex_double(l.drive_amplitude)
       << ";omega=" << hex_double(l.drive_frequency) << ";c=" << hex_double(l.overlap_safety_factor)
       << ";phases=";
    for (double d : l.phases) os << hex_double(d) << ',';
    os << ";mu_max=" << t.mu_max << ";n_max=" << t.n_max << ";p_max=" << t.p_max
       << ";N=" << t.n_steps << ";interior=" << t.interior_window
       << ";tol_series=" << hex_double(tol.series) << ";enforce=" << tol.enforce_series_convergence
       << ";tol_unitarity=" << hex_double(tol.unitarity) << ";tol_shift=" << hex_double(tol.shift)
       << ";tol_eig=" << hex_double(tol.eig) << ";tol_boundary=" << hex_double(tol.boundary_mass)
       << ";tol_degeneracy=" << hex_double(tol.degeneracy);
    return os.str();
}

}  // namespace

Tolerances tolerances_for(ToleranceProfile profile) {
    Tolerances t;
    if (profile == ToleranceProfile::fast) {
        t.series = 1e-10;
        t.unitarity = 1e-6;
        t.eig = 1e-5;
        t.boundary_mass = 1e-8;
    }
    return t;
}

ToleranceProfile parse_tolerance_profile(std::string_view name) {
    if (name == "fast") return ToleranceProfile::fast;
    if (name == "accurate") return ToleranceProfile::accurate;
    throw ConfigError("unknown tolerance profile: " + std::string(name));
}

std::string_view to_string(ToleranceProfile profile) {
    return profile == ToleranceProfile::fast ? "fast" : "accurate";
}

double ValidatedConfig::zone_edge() const noexcept { return pi / cell_length_; }

int ValidatedConfig::row_of(int mu) const {
    if (mu < -truncation_.mu_max || mu > truncation_.mu_max)
        throw IndexOutOfRange("mu outside [-mu_max, mu_max]: " + std::to_string(mu));
    return mu + truncation_.mu_max;
}

int ValidatedConfig::mu_of(int row) const {
    if (row < 0 || row >= dim()) throw IndexOutOfRange("row outside basis: " + std::to_string(row));
    return row - truncation_.mu_max;
}

double ValidatedConfig::wavenumber(int mu, double kappa) const noexcept {
    return 2.0 * pi * mu / cell_length_ + kappa;
}

bool ValidatedConfig::interior(int mu) const noexcept {
    return std::abs(mu) <= truncation_.mu_max - truncation_.interior_window;
}

std::string ValidatedConfig::hash_hex() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ValidatedConfig validate(const LatticeConfig& lattice, const TruncationConfig& truncation,
                         const Tolerances& tolerances) {
    require_positive(lattice.barrier_height, "barrier_height");
    require_positive(lattice.barrier_width, "barrier_width");
    require_positive(lattice.barrier_spacing, "barrier_spacing");
    require_positive(lattice.drive_frequency, "drive_frequency");
    require_positive(lattice.overlap_safety_factor, "overlap_safety_factor");
    if (!std::isfinite(lattice.drive_amplitude) || lattice.drive_amplitude < 0.0)
        throw NonPositiveParameter("drive_amplitude must be non-negative and finite");
    if (lattice.phases.empty()) throw PhaseCountMismatch("phases must contain at least one entry");

    const double clearance = lattice.barrier_spacing - 2.0 * lattice.drive_amplitude;
    if (clearance < lattice.overlap_safety_factor * lattice.barrier_width)
        throw BarrierOverlap("L - 2A = " + std::to_string(clearance) + " is below c*Delta = " +
                             std::to_string(lattice.overlap_safety_factor * lattice.barrier_width));

    const auto& t = truncation;
    if (t.mu_max < 0 || t.n_max < 0 || t.p_max < 0)
        throw NonPositiveParameter("mu_max, n_max and p_max must be non-negative");
    if (t.n_steps < 1) throw NonPositiveParameter("n_steps must be at least 1");
    if (t.interior_window < 0 || (t.mu_max > 0 && t.interior_window >= t.mu_max))
        throw ConfigError("interior_window must lie in [0, mu_max)");

    for (double v : {tolerances.series, tolerances.unitarity, tolerances.shift, tolerances.eig,
                     tolerances.boundary_mass, tolerances.degeneracy})
        require_positive(v, "tolerance");

    ValidatedConfig cfg;
    cfg.lattice_ = lattice;
    for (double& d : cfg.lattice_.phases) d = canonical_phase(d);
    cfg.truncation_ = truncation;
    cfg.tolerances_ = tolerances;
    cfg.period_ = 2.0 * pi / lattice.drive_frequency;
    cfg.cell_length_ = lattice.barrier_spacing * static_cast<double>(lattice.phases.size());
    cfg.canonical_ = canonical_text(cfg.lattice_, cfg.truncation_, cfg.tolerances_);
    cfg.hash_ = fnv1a64(cfg.canonical_);
    return cfg;
}

}  // namespace floquet
