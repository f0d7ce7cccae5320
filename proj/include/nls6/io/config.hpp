#pragma once

// Run configuration: a strict JSON document. Every object is validated against
// a key whitelist (unknown keys are rejected, so typos fail loudly instead of
// silently falling back to defaults), and every physical parameter must be a
// finite number of the expected JSON type.

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "nls6/dynamics.hpp"

namespace nls6 {

struct GridSpec {
    std::string type;     // "radial" | "tensor"
    int d = 6;
    std::size_t size = 0;  // cells n (radial) or points per axis m (tensor)
    double extent = 0.0;   // r_max (radial) or L (tensor)
};

struct InitSpec {
    std::string kind;  // "cW" | "gaussian" | "snapshot"
    // cW
    double c = 1.0;
    // gaussian
    double amp = 1.0;
    double width = 1.0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> phase_xi{0.0, 0.0, 0.0};
    // snapshot
    std::string path;
};

struct OutputSpec {
    std::string dir = ".";
    bool csv = true;
    bool snapshots = false;
};

struct RunConfig {
    double kappa = 0.5;
    GridSpec grid;
    InitSpec init;
    IntegratorConfig integrator;
    OutputSpec outputs;
};

namespace detail {

using json = nlohmann::json;

inline void require_keys(const json& obj, const char* where, const std::set<std::string>& allowed,
                         const std::set<std::string>& required) {
    if (!obj.is_object()) throw std::invalid_argument(std::string(where) + ": expected an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw std::invalid_argument(std::string(where) + ": unknown key '" + item.key() + "'");
    for (const auto& key : required)
        if (!obj.contains(key))
            throw std::invalid_argument(std::string(where) + ": missing key '" + key + "'");
}

inline double finite_number(const json& obj, const char* where, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number())
        throw std::invalid_argument(std::string(where) + ": '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw std::invalid_argument(std::string(where) + ": '" + key + "' must be finite");
    return x;
}

// Strict integer: JSON floats are rejected even when integral-valued.
inline std::uint64_t nonneg_integer(const json& obj, const char* where, const std::string& key) {
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const std::int64_t s = v.get<std::int64_t>();
        if (s >= 0) return static_cast<std::uint64_t>(s);
    }
    throw std::invalid_argument(std::string(where) + ": '" + key +
                                "' must be a non-negative integer");
}

inline std::size_t positive_integer(const json& obj, const char* where, const std::string& key) {
    const std::uint64_t v = nonneg_integer(obj, where, key);
    if (v == 0)
        throw std::invalid_argument(std::string(where) + ": '" + key +
                                    "' must be a positive integer");
    return static_cast<std::size_t>(v);
}

inline std::array<double, 3> vector3(const json& obj, const char* where, const std::string& key) {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    if (!obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() > 3)
        throw std::invalid_argument(std::string(where) + ": '" + key +
                                    "' must be an array of at most 3 numbers");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw std::invalid_argument(std::string(where) + ": '" + key + "' entries must be numbers");
        out[i] = v[i].get<double>();
        if (!std::isfinite(out[i]))
            throw std::invalid_argument(std::string(where) + ": '" + key + "' entries must be finite");
    }
    return out;
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc) {
    using detail::finite_number;
    using detail::positive_integer;
    using detail::require_keys;

    require_keys(doc, "config", {"kappa", "grid", "init", "integrator", "outputs"},
                 {"kappa", "grid", "init"});
    RunConfig cfg;
    cfg.kappa = finite_number(doc, "config", "kappa");
    if (!(cfg.kappa > 0.0)) throw std::invalid_argument("config: kappa must be positive");

    const auto& grid = doc.at("grid");
    require_keys(grid, "grid", {"type", "d", "n", "m", "r_max", "L"}, {"type", "d"});
    if (!grid.at("type").is_string())
        throw std::invalid_argument("grid: 'type' must be a string");
    cfg.grid.type = grid.at("type").get<std::string>();
    cfg.grid.d = static_cast<int>(positive_integer(grid, "grid", "d"));
    if (cfg.grid.type == "radial") {
        require_keys(grid, "grid", {"type", "d", "n", "r_max"}, {"type", "d", "n", "r_max"});
        cfg.grid.size = positive_integer(grid, "grid", "n");
        cfg.grid.extent = finite_number(grid, "grid", "r_max");
    } else if (cfg.grid.type == "tensor") {
        require_keys(grid, "grid", {"type", "d", "m", "L"}, {"type", "d", "m", "L"});
        cfg.grid.size = positive_integer(grid, "grid", "m");
        cfg.grid.extent = finite_number(grid, "grid", "L");
    } else {
        throw std::invalid_argument("grid: type must be 'radial' or 'tensor'");
    }
    if (!(cfg.grid.extent > 0.0)) throw std::invalid_argument("grid: extent must be positive");

    const auto& init = doc.at("init");
    require_keys(init, "init",
                 {"kind", "c", "amp", "width", "center", "phase_xi", "path"}, {"kind"});
    if (!init.at("kind").is_string()) throw std::invalid_argument("init: 'kind' must be a string");
    cfg.init.kind = init.at("kind").get<std::string>();
    if (cfg.init.kind == "cW") {
        require_keys(init, "init", {"kind", "c"}, {"kind", "c"});
        cfg.init.c = finite_number(init, "init", "c");
        if (!(cfg.init.c > 0.0)) throw std::invalid_argument("init: cW amplitude c must be positive");
    } else if (cfg.init.kind == "gaussian") {
        require_keys(init, "init", {"kind", "amp", "width", "center", "phase_xi"},
                     {"kind", "amp", "width"});
        cfg.init.amp = finite_number(init, "init", "amp");
        cfg.init.width = finite_number(init, "init", "width");
        if (!(cfg.init.width > 0.0)) throw std::invalid_argument("init: gaussian width must be positive");
        cfg.init.center = detail::vector3(init, "init", "center");
        cfg.init.phase_xi = detail::vector3(init, "init", "phase_xi");
    } else if (cfg.init.kind == "snapshot") {
        require_keys(init, "init", {"kind", "path"}, {"kind", "path"});
        if (!init.at("path").is_string())
            throw std::invalid_argument("init: snapshot 'path' must be a string");
        cfg.init.path = init.at("path").get<std::string>();
        if (cfg.init.path.empty()) throw std::invalid_argument("init: snapshot path is empty");
    } else {
        throw std::invalid_argument("init: kind must be 'cW', 'gaussian' or 'snapshot'");
    }

    if (doc.contains("integrator")) {
        const auto& integ = doc.at("integrator");
        require_keys(integ, "integrator",
                     {"dt0", "dt_min", "t_end", "cfl_c", "sponge_width", "sponge_strength",
                      "record_every", "snapshot_every", "blowup_H_factor"},
                     {});
        auto maybe = [&](const char* key, double& slot) {
            if (integ.contains(key)) slot = finite_number(integ, "integrator", key);
        };
        maybe("dt0", cfg.integrator.dt0);
        maybe("dt_min", cfg.integrator.dt_min);
        maybe("t_end", cfg.integrator.t_end);
        maybe("cfl_c", cfg.integrator.cfl_c);
        maybe("sponge_width", cfg.integrator.sponge_width);
        maybe("sponge_strength", cfg.integrator.sponge_strength);
        maybe("blowup_H_factor", cfg.integrator.blowup_H_factor);
        if (integ.contains("record_every"))
            cfg.integrator.record_every = positive_integer(integ, "integrator", "record_every");
        if (integ.contains("snapshot_every"))
            cfg.integrator.snapshot_every = static_cast<std::size_t>(
                detail::nonneg_integer(integ, "integrator", "snapshot_every"));
        cfg.integrator.validate();
    }

    if (doc.contains("outputs")) {
        const auto& out = doc.at("outputs");
        require_keys(out, "outputs", {"dir", "csv", "snapshots"}, {});
        if (out.contains("dir")) {
            if (!out.at("dir").is_string())
                throw std::invalid_argument("outputs: 'dir' must be a string");
            cfg.outputs.dir = out.at("dir").get<std::string>();
        }
        auto maybe_bool = [&](const char* key, bool& slot) {
            if (out.contains(key)) {
                if (!out.at(key).is_boolean())
                    throw std::invalid_argument(std::string("outputs: '") + key + "' must be a boolean");
                slot = out.at(key).get<bool>();
            }
        };
        maybe_bool("csv", cfg.outputs.csv);
        maybe_bool("snapshots", cfg.outputs.snapshots);
    }

    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

}  // namespace nls6
