#pragma once

// Scenario files: flat key = value documents describing one model
// parameterization, optional sweep axes and output options.  '#' starts a
// comment; values are whitespace-separated decimal reals.  Unknown keys are
// rejected and missing required keys are reported by their key path, so a
// typo never silently runs the wrong model.
//
//   n_levels = 2
//   p_w = 0.5
//   p_x = 0.5 0.5
//   alpha.x = 0 1            # per-level vector, entry 0 is the reference
//   gamma.v = 3
//   # alpha.0 = -0.5         # intercepts optional; omitted -> calibrated
//   sweep.axis.alpha_x[1] = linspace 0 3 61
//   output.precision = 6

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "selbias/scm.hpp"
#include "selbias/sweep.hpp"

namespace selbias {

class ScenarioError : public std::runtime_error {
  public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioFile {
    std::string name;
    StructuralParams params;  // calibrated unless intercepts were explicit
    std::vector<SweepAxis> axes;
    int precision = 6;
    std::vector<std::string> measures = {"cor_xr", "cor_xf", "or_xr_a1",
                                         "crr_xr", "crr_xf"};
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline double parse_real(const std::string& tok, const std::string& key) {
    double value = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ScenarioError("key '" + key + "': cannot parse real '" + tok + "'");
    }
    return value;
}

inline std::vector<double> parse_reals(const std::string& text,
                                       const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : tokens(text)) out.push_back(parse_real(tok, key));
    if (out.empty()) {
        throw ScenarioError("key '" + key + "': empty value");
    }
    return out;
}

// Axis value syntax: either an explicit list of reals or
// "linspace <lo> <hi> <count>".
inline std::vector<double> parse_axis_values(const std::string& text,
                                             const std::string& key) {
    const auto toks = tokens(text);
    if (!toks.empty() && toks[0] == "linspace") {
        if (toks.size() != 4) {
            throw ScenarioError("key '" + key +
                                "': linspace wants <lo> <hi> <count>");
        }
        const double lo = parse_real(toks[1], key);
        const double hi = parse_real(toks[2], key);
        const double nd = parse_real(toks[3], key);
        const int n = static_cast<int>(nd);
        if (n < 1 || nd != n) {
            throw ScenarioError("key '" + key + "': linspace count must be a "
                                "positive integer");
        }
        return linspace(lo, hi, n);
    }
    return parse_reals(text, key);
}

}  // namespace detail

inline ScenarioFile parse_scenario(std::istream& in, const std::string& name) {
    // Pass 1: collect raw key/value pairs, preserving sweep-axis order.
    std::map<std::string, std::string> kv;
    std::vector<std::pair<std::string, std::string>> axis_lines;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ScenarioError(name + ":" + std::to_string(lineno) +
                                ": expected key = value");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ScenarioError(name + ":" + std::to_string(lineno) +
                                ": empty key");
        }
        if (key.rfind("sweep.axis.", 0) == 0) {
            axis_lines.emplace_back(key, value);
            continue;
        }
        if (!kv.emplace(key, value).second) {
            throw ScenarioError(name + ": duplicate key '" + key + "'");
        }
    }

    static const std::set<std::string> known = {
        "n_levels", "p_w",      "p_x",      "nu",       "alpha.x",
        "alpha.w",  "alpha.xw", "alpha.0",  "beta.x",   "beta.v",
        "beta.w",   "beta.xv",  "beta.xw",  "beta.vw",  "beta.0",
        "gamma.f",  "gamma.v",  "gamma.w",  "gamma.fv", "gamma.fw",
        "gamma.vw", "gamma.0",  "output.precision", "output.measures"};
    for (const auto& [key, value] : kv) {
        if (!known.count(key)) {
            throw ScenarioError(name + ": unknown key '" + key + "'");
        }
    }
    for (const char* req : {"n_levels", "p_w", "p_x"}) {
        if (!kv.count(req)) {
            throw ScenarioError(name + ": missing required key '" +
                                std::string(req) + "'");
        }
    }

    auto scalar = [&](const char* key, double fallback) {
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        const auto vals = detail::parse_reals(it->second, key);
        if (vals.size() != 1) {
            throw ScenarioError(name + ": key '" + std::string(key) +
                                "' wants a single value");
        }
        return vals[0];
    };
    auto optional_scalar = [&](const char* key) -> std::optional<double> {
        if (!kv.count(key)) return std::nullopt;
        return scalar(key, 0.0);
    };

    const double n_levels_raw = scalar("n_levels", 0.0);
    const int n_levels = static_cast<int>(n_levels_raw);
    if (n_levels < 2 || n_levels_raw != n_levels) {
        throw ScenarioError(name + ": n_levels must be an integer >= 2");
    }

    ScenarioFile sc;
    sc.name = name;
    sc.params = StructuralParams::zeros(n_levels);
    StructuralParams& p = sc.params;

    auto vec = [&](const char* key, std::vector<double>& slot) {
        const auto it = kv.find(key);
        if (it == kv.end()) return;  // keep zeros
        auto vals = detail::parse_reals(it->second, key);
        if (static_cast<int>(vals.size()) != n_levels) {
            throw ScenarioError(name + ": key '" + std::string(key) + "' wants " +
                                std::to_string(n_levels) + " values");
        }
        slot = std::move(vals);
    };

    p.p_w = scalar("p_w", 0.5);
    vec("p_x", p.p_x);
    p.nu = scalar("nu", 13.0);
    vec("alpha.x", p.alpha_x);
    p.alpha_w = scalar("alpha.w", 0.0);
    vec("alpha.xw", p.alpha_xw);
    vec("beta.x", p.beta_x);
    p.beta_v = scalar("beta.v", 0.0);
    p.beta_w = scalar("beta.w", 0.0);
    vec("beta.xv", p.beta_xv);
    vec("beta.xw", p.beta_xw);
    p.beta_vw = scalar("beta.vw", 0.0);
    p.gamma_f = scalar("gamma.f", 0.0);
    p.gamma_v = scalar("gamma.v", 0.0);
    p.gamma_w = scalar("gamma.w", 0.0);
    p.gamma_fv = scalar("gamma.fv", 0.0);
    p.gamma_fw = scalar("gamma.fw", 0.0);
    p.gamma_vw = scalar("gamma.vw", 0.0);

    const auto a0 = optional_scalar("alpha.0");
    const auto b0 = optional_scalar("beta.0");
    const auto g0 = optional_scalar("gamma.0");
    try {
        p = calibrate(p);
    } catch (const std::invalid_argument& err) {
        throw ScenarioError(name + ": " + err.what());
    }
    if (a0) p.alpha_0 = *a0;
    if (b0) p.beta_0 = *b0;
    if (g0) p.gamma_0 = *g0;

    const double precision_raw = scalar("output.precision", 6.0);
    sc.precision = static_cast<int>(precision_raw);
    if (sc.precision < 0 || sc.precision > 17 || precision_raw != sc.precision) {
        throw ScenarioError(name + ": output.precision must be an integer in [0,17]");
    }
    if (kv.count("output.measures")) {
        static const std::set<std::string> valid = {
            "cor_xr", "cor_xf", "or_xr_a1", "crr_xr", "crr_xf"};
        sc.measures = detail::tokens(kv.at("output.measures"));
        if (sc.measures.empty()) {
            throw ScenarioError(name + ": output.measures is empty");
        }
        for (const auto& m : sc.measures) {
            if (!valid.count(m)) {
                throw ScenarioError(name + ": unknown measure '" + m + "'");
            }
        }
    }

    for (const auto& [key, value] : axis_lines) {
        const std::string path = key.substr(std::string("sweep.axis.").size());
        SweepAxis axis;
        axis.paths.push_back(path);
        for (double v : detail::parse_axis_values(value, key)) {
            axis.values.push_back({v});
        }
        StructuralParams probe = p;  // reject unknown paths at parse time
        try {
            apply_path(probe, path, axis.values.front()[0]);
        } catch (const std::invalid_argument& err) {
            throw ScenarioError(name + ": " + err.what());
        }
        sc.axes.push_back(std::move(axis));
    }
    return sc;
}

inline ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open scenario file: " + path);
    }
    std::string stem = path;
    const auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    return parse_scenario(in, stem);
}

/// Sweep spec from a scenario with axes (pre-calibration base: intercepts
/// are recomputed per grid point, so explicit intercepts are ignored here).
inline SweepSpec scenario_sweep(const ScenarioFile& sc) {
    if (sc.axes.empty()) {
        throw ScenarioError(sc.name + ": scenario declares no sweep axes");
    }
    SweepSpec spec;
    spec.name = sc.name;
    spec.base = sc.params;
    spec.axes = sc.axes;
    return spec;
}

}  // namespace selbias
