#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "floquet/lattice_config.hpp"

namespace floquet {

struct TransportConfig {
    std::optional<double> packet_width;  // sigma_w, no default
    double packet_center = 0.0;
    int kappa_points = 64;
};

struct RunConfig {
    LatticeConfig lattice;
    TruncationConfig truncation;
    TransportConfig transport;
    ToleranceProfile profile = ToleranceProfile::accurate;

    ValidatedConfig validated() const;
};

// Accepts plain numbers or strings such as "pi/4", "2pi/3", "0.05*pi".
double parse_angle(const nlohmann::json& value);

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace floquet
