#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "forces.hpp"
#include "freespace.hpp"

namespace ffac {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every tunable of the segmentation and free-space pipelines.
struct Config {
    ForceParams force;
    EvolutionParams evolution;
    ClassifyParams classify;
    int degree = 3;
    int init_patches = 8;
    double init_radius = 0.0;  // 0: pick from the image size
    double init_x = -1.0;      // negative: image centre
    double init_y = -1.0;
    double eps_alt = 0.05;
    double altitude_radius = 2.0;
    double altitude_default = 0.0;
    int snapshot_every = 0;  // 0 disables snapshots
};

namespace detail {

struct ConfigKey {
    std::string name;
    std::function<std::string(const Config&)> get;
    std::function<void(Config&, std::string_view)> set;
};

inline double parse_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("config: key '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    return out;
}

inline int parse_int(std::string_view key, std::string_view v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("config: key '" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
    return out;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: key '" + std::string(key) + "' expects true/false, got '" + std::string(v) + "'");
}

/// Shortest text that parses back to the same double.
inline std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <typename Field>
ConfigKey real_key(std::string name, Field field) {
    return {name, [field](const Config& c) { return fmt(field(const_cast<Config&>(c))); },
            [field, name](Config& c, std::string_view v) { field(c) = parse_double(name, v); }};
}

template <typename Field>
ConfigKey int_key(std::string name, Field field) {
    return {name, [field](const Config& c) { return std::to_string(field(const_cast<Config&>(c))); },
            [field, name](Config& c, std::string_view v) { field(c) = parse_int(name, v); }};
}

template <typename Field>
ConfigKey bool_key(std::string name, Field field) {
    return {name, [field](const Config& c) { return std::string(field(const_cast<Config&>(c)) ? "true" : "false"); },
            [field, name](Config& c, std::string_view v) { field(c) = parse_bool(name, v); }};
}

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        k.push_back(real_key("sigma", [](Config& c) -> double& { return c.force.sigma; }));
        k.push_back(int_key("p", [](Config& c) -> int& { return c.force.p; }));
        k.push_back({"edge_map",
                     [](const Config& c) { return std::string(c.force.kind == EdgeMapKind::canny ? "canny" : "gradient"); },
                     [](Config& c, std::string_view v) {
                         if (v == "gradient") c.force.kind = EdgeMapKind::gradient;
                         else if (v == "canny") c.force.kind = EdgeMapKind::canny;
                         else throw ConfigError("config: edge_map must be gradient or canny");
                     }});
        k.push_back(real_key("canny_low", [](Config& c) -> double& { return c.force.canny_low; }));
        k.push_back(real_key("canny_high", [](Config& c) -> double& { return c.force.canny_high; }));
        k.push_back(real_key("intensity_scale", [](Config& c) -> double& { return c.force.intensity_scale; }));
        k.push_back(real_key("step", [](Config& c) -> double& { return c.evolution.step; }));
        k.push_back(real_key("edge_stop", [](Config& c) -> double& { return c.evolution.edge_stop; }));
        k.push_back(int_key("samples_per_patch", [](Config& c) -> int& { return c.evolution.samples_per_patch; }));
        k.push_back(real_key("move_eps", [](Config& c) -> double& { return c.evolution.move_eps; }));
        k.push_back(real_key("steady_fraction", [](Config& c) -> double& { return c.evolution.steady_fraction; }));
        k.push_back(int_key("max_iters", [](Config& c) -> int& { return c.evolution.max_iters; }));
        k.push_back(real_key("split_epsilon", [](Config& c) -> double& { return c.evolution.split_epsilon; }));
        k.push_back(real_key("merge_epsilon", [](Config& c) -> double& { return c.evolution.merge_epsilon; }));
        k.push_back(bool_key("refine", [](Config& c) -> bool& { return c.evolution.refine; }));
        k.push_back(bool_key("topology", [](Config& c) -> bool& { return c.evolution.topology; }));
        k.push_back(real_key("min_component_area", [](Config& c) -> double& { return c.evolution.min_component_area; }));
        k.push_back(int_key("degree", [](Config& c) -> int& { return c.degree; }));
        k.push_back(int_key("init_patches", [](Config& c) -> int& { return c.init_patches; }));
        k.push_back(real_key("init_radius", [](Config& c) -> double& { return c.init_radius; }));
        k.push_back(real_key("init_x", [](Config& c) -> double& { return c.init_x; }));
        k.push_back(real_key("init_y", [](Config& c) -> double& { return c.init_y; }));
        k.push_back(real_key("harris_sigma_d", [](Config& c) -> double& { return c.classify.harris.sigma_d; }));
        k.push_back(real_key("harris_sigma_i", [](Config& c) -> double& { return c.classify.harris.sigma_i; }));
        k.push_back(real_key("harris_k", [](Config& c) -> double& { return c.classify.harris.k; }));
        k.push_back(real_key("harris_threshold", [](Config& c) -> double& { return c.classify.harris.threshold; }));
        k.push_back(int_key("match_half_window", [](Config& c) -> int& { return c.classify.match.half_window; }));
        k.push_back(real_key("match_max_disp", [](Config& c) -> double& { return c.classify.match.max_disp; }));
        k.push_back(real_key("match_min_ncc", [](Config& c) -> double& { return c.classify.match.min_ncc; }));
        k.push_back(real_key("eps_alt", [](Config& c) -> double& { return c.eps_alt; }));
        k.push_back(real_key("altitude_radius", [](Config& c) -> double& { return c.altitude_radius; }));
        k.push_back(real_key("altitude_default", [](Config& c) -> double& { return c.altitude_default; }));
        k.push_back(int_key("snapshot_every", [](Config& c) -> int& { return c.snapshot_every; }));
        return k;
    }();
    return keys;
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Flat `key = value` text, one key per line, `#` starts a comment. Unknown keys are errors.
inline Config parse_config(std::string_view text, Config base = {}) {
    std::size_t start = 0;
    int lineno = 0;
    bool samples_given = false;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& k : detail::config_keys())
            if (k.name == key) {
                k.set(base, value);
                found = true;
                samples_given = samples_given || key == "samples_per_patch";
                break;
            }
        if (!found) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + std::string(key) + "'");
    }
    if (!samples_given) base.evolution.samples_per_patch = base.degree + 1;
    if (base.degree < 1) throw ConfigError("config: degree must be >= 1");
    if (base.init_patches < 3) throw ConfigError("config: init_patches must be >= 3");
    try {
        base.evolution.validate(base.degree);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return base;
}

inline Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Every key with its current value; parse_config(format_config(c)) == c.
inline std::string format_config(const Config& c) {
    std::string out;
    for (const auto& k : detail::config_keys()) out += k.name + " = " + k.get(c) + "\n";
    return out;
}

}  // namespace ffac
