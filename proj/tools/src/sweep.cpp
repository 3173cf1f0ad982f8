#include <cmath>
#include <fstream>

#include "floquet/errors.hpp"
#include "floquet_tools/pipeline.hpp"

namespace floquet::tools {

using nlohmann::json;

namespace {

SweepParameter parse_parameter(const std::string& name) {
    if (name == "delta" || name == "phase") return SweepParameter::phase;
    if (name == "amplitude" || name == "A") return SweepParameter::amplitude;
    if (name == "t0") return SweepParameter::start_time;
    if (name == "kappa_points") return SweepParameter::kappa_resolution;
    throw ConfigError("unknown sweep parameter '" + name + "'");
}

OutputKind parse_output(const std::string& name) {
    if (name == "spectrum") return OutputKind::spectrum;
    if (name == "currents") return OutputKind::currents;
    if (name == "husimi") return OutputKind::husimi;
    if (name == "symmetry-report") return OutputKind::symmetry_report;
    throw ConfigError("unknown sweep output '" + name + "'");
}

template <class T>
void read_optional(const json& j, const char* key, T& target) {
    if (!j.contains(key)) return;
    try {
        target = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("sweep field '") + key + "': " + e.what());
    }
}

}  // namespace

bool SweepSpec::wants(OutputKind kind) const {
    for (OutputKind k : outputs)
        if (k == kind) return true;
    return false;
}

SweepSpec parse_sweep(const json& doc) {
    if (!doc.is_object()) throw ConfigError("sweep must be a JSON object");
    if (!doc.contains("parameter")) throw ConfigError("sweep needs a 'parameter'");
    SweepSpec s;
    s.parameter = parse_parameter(doc.at("parameter").get<std::string>());
    read_optional(doc, "index", s.phase_index);

    if (!doc.contains("values") || !doc.at("values").is_array() || doc.at("values").empty())
        throw ConfigError("sweep needs a non-empty 'values' list");
    for (const json& v : doc.at("values")) {
        const double x = (s.parameter == SweepParameter::phase || s.parameter == SweepParameter::start_time)
                             ? parse_angle(v)
                             : v.get<double>();
        if (!std::isfinite(x)) throw ConfigError("sweep values must be finite");
        s.values.push_back(x);
    }

    if (!doc.contains("outputs") || !doc.at("outputs").is_array() || doc.at("outputs").empty())
        throw ConfigError("sweep needs a non-empty 'outputs' list");
    for (const json& o : doc.at("outputs")) s.outputs.push_back(parse_output(o.get<std::string>()));

    if (doc.contains("crossings")) {
        const json& c = doc.at("crossings");
        if (c.contains("window")) {
            const json& w = c.at("window");
            if (!w.is_array() || w.size() != 2) throw ConfigError("crossings.window must be [lo, hi]");
            s.crossings.lo = w.at(0).get<double>();
            s.crossings.hi = w.at(1).get<double>();
            if (!(*s.crossings.lo < *s.crossings.hi)) throw ConfigError("crossings.window must have lo < hi");
            s.crossings.refine = true;
        }
        read_optional(c, "refine", s.crossings.refine);
    }
    if (doc.contains("husimi")) {
        const json& h = doc.at("husimi");
        if (h.contains("kappa")) s.husimi.kappa = h.at("kappa").get<double>();
        read_optional(h, "sigma", s.husimi.sigma);
        read_optional(h, "x_points", s.husimi.x_points);
        read_optional(h, "p_points", s.husimi.p_points);
        read_optional(h, "p_extent", s.husimi.p_extent);
        read_optional(h, "modes", s.husimi.modes);
        if (!(s.husimi.sigma > 0.0) || s.husimi.x_points < 1 || s.husimi.p_points < 2 || s.husimi.modes < 1 ||
            !(s.husimi.p_extent > 0.0))
            throw ConfigError("husimi settings out of range");
    }
    return s;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOFailure("cannot open sweep file: " + path.string());
    try {
        return parse_sweep(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

RunConfig apply_sweep_value(const RunConfig& base, const SweepSpec& sweep, double value) {
    RunConfig rc = base;
    switch (sweep.parameter) {
        case SweepParameter::phase:
            if (sweep.phase_index < 0 || sweep.phase_index >= static_cast<int>(rc.lattice.phases.size()))
                throw ConfigError("sweep index " + std::to_string(sweep.phase_index) + " outside the phase list");
            rc.lattice.phases[static_cast<std::size_t>(sweep.phase_index)] = value;
            break;
        case SweepParameter::amplitude:
            rc.lattice.drive_amplitude = value;
            break;
        case SweepParameter::start_time:
            break;
        case SweepParameter::kappa_resolution:
            if (value != std::floor(value) || value < 2.0) throw ConfigError("kappa_points values must be integers >= 2");
            rc.transport.kappa_points = static_cast<int>(value);
            break;
    }
    (void)rc.validated();
    return rc;
}

}  // namespace floquet::tools
