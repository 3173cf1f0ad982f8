#include "floquet/config_io.hpp"

#include <charconv>
#include <fstream>

#include "floquet/errors.hpp"
#include "floquet/types.hpp"

namespace floquet {

namespace {

using nlohmann::json;

double parse_number(std::string_view s, std::string_view whole) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("cannot parse angle: " + std::string(whole));
    return v;
}

template <class T>
void read_field(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

double parse_angle(const json& value) {
    if (value.is_number()) return value.get<double>();
    if (!value.is_string()) throw ConfigError("angle must be a number or string");
    std::string s = value.get<std::string>();
    std::erase(s, ' ');
    const auto at = s.find("pi");
    if (at == std::string::npos) return parse_number(s, s);

    std::string_view coef(s.data(), at);
    if (!coef.empty() && coef.back() == '*') coef.remove_suffix(1);
    double factor = 1.0;
    if (coef == "-") factor = -1.0;
    else if (!coef.empty()) factor = parse_number(coef, s);

    std::string_view rest(s.data() + at + 2, s.size() - at - 2);
    double denom = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') throw ConfigError("cannot parse angle: " + s);
        rest.remove_prefix(1);
        denom = parse_number(rest, s);
        if (denom == 0.0) throw ConfigError("zero denominator in angle: " + s);
    }
    return factor * pi / denom;
}

ValidatedConfig RunConfig::validated() const {
    return validate(lattice, truncation, tolerances_for(profile));
}

RunConfig parse_run_config(const json& doc) {
    RunConfig cfg;
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");

    if (doc.contains("lattice")) {
        const json& l = doc.at("lattice");
        read_field(l, "barrier_height", cfg.lattice.barrier_height);
        read_field(l, "barrier_width", cfg.lattice.barrier_width);
        read_field(l, "barrier_spacing", cfg.lattice.barrier_spacing);
        read_field(l, "drive_amplitude", cfg.lattice.drive_amplitude);
        read_field(l, "drive_frequency", cfg.lattice.drive_frequency);
        read_field(l, "overlap_safety_factor", cfg.lattice.overlap_safety_factor);
        if (l.contains("phases")) {
            const json& ph = l.at("phases");
            if (!ph.is_array()) throw ConfigError("phases must be a list");
            cfg.lattice.phases.clear();
            for (const json& p : ph) cfg.lattice.phases.push_back(parse_angle(p));
        }
    }
    if (doc.contains("truncation")) {
        const json& t = doc.at("truncation");
        read_field(t, "mu_max", cfg.truncation.mu_max);
        read_field(t, "n_max", cfg.truncation.n_max);
        read_field(t, "p_max", cfg.truncation.p_max);
        read_field(t, "n_steps", cfg.truncation.n_steps);
        read_field(t, "interior_window", cfg.truncation.interior_window);
    }
    if (doc.contains("transport")) {
        const json& tr = doc.at("transport");
        if (tr.contains("packet_width")) {
            double w = 0.0;
            read_field(tr, "packet_width", w);
            cfg.transport.packet_width = w;
        }
        read_field(tr, "packet_center", cfg.transport.packet_center);
        read_field(tr, "kappa_points", cfg.transport.kappa_points);
    }
    if (doc.contains("tolerance_profile"))
        cfg.profile = parse_tolerance_profile(doc.at("tolerance_profile").get<std::string>());
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOFailure("cannot open config file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return parse_run_config(doc);
}

json to_json(const RunConfig& cfg) {
    json doc;
    const auto& l = cfg.lattice;
    doc["lattice"] = {{"barrier_height", l.barrier_height},
                      {"barrier_width", l.barrier_width},
                      {"barrier_spacing", l.barrier_spacing},
                      {"drive_amplitude", l.drive_amplitude},
                      {"drive_frequency", l.drive_frequency},
                      {"overlap_safety_factor", l.overlap_safety_factor},
                      {"phases", l.phases}};
    const auto& t = cfg.truncation;
    doc["truncation"] = {{"mu_max", t.mu_max},
                         {"n_max", t.n_max},
                         {"p_max", t.p_max},
                         {"n_steps", t.n_steps},
                         {"interior_window", t.interior_window}};
    json tr = {{"packet_center", cfg.transport.packet_center},
               {"kappa_points", cfg.transport.kappa_points}};
    if (cfg.transport.packet_width) tr["packet_width"] = *cfg.transport.packet_width;
    doc["transport"] = tr;
    doc["tolerance_profile"] = std::string(to_string(cfg.profile));
    return doc;
}

}  // namespace floquet
