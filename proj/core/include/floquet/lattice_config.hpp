#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace floquet {

// Physical parameters, units hbar = m = 1.
struct LatticeConfig {
    double barrier_height = 1.0;   // V0
    double barrier_width = 0.5;    // Delta
    double barrier_spacing = 10.0; // L
    double drive_amplitude = 1.0;  // A
    double drive_frequency = 1.0;  // omega
    std::vector<double> phases{0.0};
    double overlap_safety_factor = 4.0;
};

struct TruncationConfig {
    int mu_max = 48;
    int n_max = 24;
    int p_max = 60;
    int n_steps = 256;
    int interior_window = 8;
};

struct Tolerances {
    double series = 1e-12;           // absolute increment of the exponential series
    bool enforce_series_convergence = true;
    double unitarity = 1e-8;         // interior window of U^dagger U - 1
    double shift = 1e-6;             // shift-class eigen residual
    double eig = 1e-6;               // |lambda| deviation before NonUnitaryWarning
    double boundary_mass = 1e-10;    // harmonic-edge weight before TruncationWarning
    double degeneracy = 1e-8;        // eigenvalue cluster radius
};

enum class ToleranceProfile { fast, accurate };

Tolerances tolerances_for(ToleranceProfile profile);
ToleranceProfile parse_tolerance_profile(std::string_view name);
std::string_view to_string(ToleranceProfile profile);

// Immutable validated configuration with derived quantities and basis indexing.
class ValidatedConfig {
public:
    const LatticeConfig& lattice() const noexcept { return lattice_; }
    const TruncationConfig& truncation() const noexcept { return truncation_; }
    const Tolerances& tolerances() const noexcept { return tolerances_; }

    int n_cells() const noexcept { return static_cast<int>(lattice_.phases.size()); }
    double omega() const noexcept { return lattice_.drive_frequency; }
    double period() const noexcept { return period_; }
    double dt() const noexcept { return period_ / truncation_.n_steps; }
    double cell_length() const noexcept { return cell_length_; }
    double zone_edge() const noexcept;  // pi / cell_length
    double barrier_position(int i) const noexcept { return i * lattice_.barrier_spacing; }
    double time_of(int j) const noexcept { return j * dt(); }

    int mu_max() const noexcept { return truncation_.mu_max; }
    int n_max() const noexcept { return truncation_.n_max; }
    int n_steps() const noexcept { return truncation_.n_steps; }
    int dim() const noexcept { return 2 * truncation_.mu_max + 1; }
    int harmonics() const noexcept { return 2 * truncation_.n_max + 1; }

    int row_of(int mu) const;
    int mu_of(int row) const;
    double wavenumber(int mu, double kappa) const noexcept;
    bool interior(int mu) const noexcept;

    std::uint64_t hash() const noexcept { return hash_; }
    std::string hash_hex() const;
    const std::string& canonical() const noexcept { return canonical_; }

private:
    friend ValidatedConfig validate(const LatticeConfig&, const TruncationConfig&, const Tolerances&);
    ValidatedConfig() = default;

    LatticeConfig lattice_;
    TruncationConfig truncation_;
    Tolerances tolerances_;
    double period_ = 0.0;
    double cell_length_ = 0.0;
    std::string canonical_;
    std::uint64_t hash_ = 0;
};

ValidatedConfig validate(const LatticeConfig& lattice, const TruncationConfig& truncation,
                         const Tolerances& tolerances = {});

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace floquet
