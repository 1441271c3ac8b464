#pragma once

// Sectioned key-value experiment configs. Format:
//
//   # comment (also ';')
//   [section]          or  [section.subsection]
//   key = value
//   list = [a, b, c]
//
// Parsing never yields a partial config: every problem is collected into a
// single error listing the offending line, the unknown key's nearest valid
// name, or the type mismatch.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "brinkman/common.hpp"

namespace brinkman {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t prev = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t cur = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                               prev + (a[i - 1] == b[j - 1] ? 0 : 1)});
            prev = cur;
        }
    }
    return row[b.size()];
}

}  // namespace detail

/// Raw parse result: dotted "section.key" -> scalar string or string list.
struct RawConfig {
    std::map<std::string, std::string> scalars;
    std::map<std::string, std::vector<std::string>> lists;

    bool has(const std::string& key) const {
        return scalars.count(key) || lists.count(key);
    }
};

inline RawConfig parse_raw_config(std::istream& in) {
    RawConfig raw;
    std::string line, section;
    std::vector<std::string> errors;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": unterminated section header");
                continue;
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section.empty())
                errors.push_back("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        std::string full = section.empty() ? key : section + "." + key;
        if (raw.has(full)) {
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
            continue;
        }
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": unterminated list for '" +
                                 full + "'");
                continue;
            }
            std::vector<std::string> items;
            std::string body = value.substr(1, value.size() - 2);
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = detail::trim(item);
                if (!item.empty()) items.push_back(item);
            }
            raw.lists[full] = std::move(items);
        } else {
            raw.scalars[full] = value;
        }
    }
    if (!errors.empty()) {
        std::string msg = "config parse failed:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw Error(msg);
    }
    return raw;
}

// --- typed experiment config -------------------------------------------------

struct GridSpec {
    int dim = 1;
    int n = 256;
    double length = 8.0;
    std::string boundary = "neumann";  // or "periodic"
};

struct LawSpec {
    std::string family = "power";  // power | log | pme | incompressible
    double gamma = 3.0;
    double nu = 1e-3;
};

struct GrowthSpec {
    double p_H = 1.0;
    double g0 = 1.0;
};

struct InitialSpec {
    std::string shape = "bump";  // bump | two_bumps | plateau | two_species | barenblatt
    double center = 0.5;         // fraction of the domain length
    double width = 0.15;         // fraction of the domain length
    double amplitude = 0.5;
    double bound_B = 0.0;        // 0 -> derived from the amplitude
};

struct RunSpec {
    double T = 0.5;
    double cfl = 0.45;
    double max_dt = 1e-2;
    double reaction_fraction = 0.2;
    bool keep_all = true;
    std::vector<double> observer_times;
};

struct SweepSpec {
    std::string arm = "nu";  // nu | gamma | joint
    std::vector<double> nu;
    std::vector<double> gamma;
    double proxy_gamma = 80.0;  // stiff-law stand-in for the incompressible limit
};

struct DiagnosticsSpec {
    std::vector<std::string> enabled = {"bound_monitor"};
    double V_p = 0.0;      // complementarity threshold
    double margin = 0.0;   // active-set margin, absolute pressure units
    double power_m = 2.0;
    double t0 = 0.0;       // velocity-gap time cutoff
};

struct ExperimentConfig {
    std::string scenario = "default";
    GridSpec grid;
    LawSpec law;
    GrowthSpec growth;
    InitialSpec initial;
    RunSpec run;
    SweepSpec sweep;
    DiagnosticsSpec diagnostics;
    std::string output_dir = "out";
};

namespace detail {

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "scenario",
        "grid.dim", "grid.n", "grid.length", "grid.boundary",
        "law.family", "law.gamma", "law.nu",
        "growth.p_H", "growth.g0",
        "initial.shape", "initial.center", "initial.width", "initial.amplitude",
        "initial.bound_B",
        "run.T", "run.cfl", "run.max_dt", "run.reaction_fraction", "run.keep_all",
        "run.observer_times",
        "sweep.arm", "sweep.nu", "sweep.gamma", "sweep.proxy_gamma",
        "diagnostics.enabled", "diagnostics.V_p", "diagnostics.margin",
        "diagnostics.power_m", "diagnostics.t0",
        "output.directory",
    };
    return keys;
}

inline std::string nearest_key(const std::string& key) {
    std::string best;
    std::size_t dist = static_cast<std::size_t>(-1);
    for (const auto& k : known_keys()) {
        std::size_t d = levenshtein(key, k);
        if (d < dist) {
            dist = d;
            best = k;
        }
    }
    return best;
}

struct ConfigReader {
    const RawConfig& raw;
    std::vector<std::string> errors;
    std::vector<std::string> seen;

    explicit ConfigReader(const RawConfig& r) : raw(r) {}

    double number(const std::string& key, double fallback) {
        seen.push_back(key);
        auto it = raw.scalars.find(key);
        if (it == raw.scalars.end()) {
            if (raw.lists.count(key))
                errors.push_back("key '" + key + "': expected a number, got a list");
            return fallback;
        }
        try {
            std::size_t used = 0;
            double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            errors.push_back("key '" + key + "': expected a number, got '" + it->second + "'");
            return fallback;
        }
    }

    int integer(const std::string& key, int fallback) {
        double v = number(key, fallback);
        if (v != static_cast<int>(v)) {
            errors.push_back("key '" + key + "': expected an integer");
            return fallback;
        }
        return static_cast<int>(v);
    }

    bool boolean(const std::string& key, bool fallback) {
        seen.push_back(key);
        auto it = raw.scalars.find(key);
        if (it == raw.scalars.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        errors.push_back("key '" + key + "': expected true/false, got '" + it->second + "'");
        return fallback;
    }

    std::string text(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed = {}) {
        seen.push_back(key);
        auto it = raw.scalars.find(key);
        std::string v = it == raw.scalars.end() ? fallback : it->second;
        if (!allowed.empty() &&
            std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string opts;
            for (const auto& a : allowed) opts += (opts.empty() ? "" : " | ") + a;
            errors.push_back("key '" + key + "': '" + v + "' not one of " + opts);
        }
        return v;
    }

    std::vector<double> numbers(const std::string& key) {
        seen.push_back(key);
        std::vector<double> out;
        auto it = raw.lists.find(key);
        if (it == raw.lists.end()) {
            if (raw.scalars.count(key))
                errors.push_back("key '" + key + "': expected a list like [1, 2, 3]");
            return out;
        }
        for (const auto& s : it->second) {
            try {
                out.push_back(std::stod(s));
            } catch (const std::exception&) {
                errors.push_back("key '" + key + "': list item '" + s + "' is not a number");
            }
        }
        return out;
    }

    std::vector<std::string> texts(const std::string& key,
                                   const std::vector<std::string>& fallback) {
        seen.push_back(key);
        auto it = raw.lists.find(key);
        if (it == raw.lists.end()) return fallback;
        return it->second;
    }

    void check_unknown() {
        auto flag = [&](const std::string& key) {
            if (std::find(seen.begin(), seen.end(), key) == seen.end())
                errors.push_back("unknown key '" + key + "' (did you mean '" +
                                 nearest_key(key) + "'?)");
        };
        for (const auto& [k, v] : raw.scalars) flag(k);
        for (const auto& [k, v] : raw.lists) flag(k);
    }
};

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
    RawConfig raw = parse_raw_config(in);
    detail::ConfigReader r(raw);
    ExperimentConfig c;

    c.scenario = r.text("scenario", c.scenario);
    c.grid.dim = r.integer("grid.dim", c.grid.dim);
    c.grid.n = r.integer("grid.n", c.grid.n);
    c.grid.length = r.number("grid.length", c.grid.length);
    c.grid.boundary = r.text("grid.boundary", c.grid.boundary, {"neumann", "periodic"});
    c.law.family = r.text("law.family", c.law.family,
                          {"power", "log", "pme", "incompressible"});
    c.law.gamma = r.number("law.gamma", c.law.gamma);
    c.law.nu = r.number("law.nu", c.law.nu);
    c.growth.p_H = r.number("growth.p_H", c.growth.p_H);
    c.growth.g0 = r.number("growth.g0", c.growth.g0);
    c.initial.shape = r.text("initial.shape", c.initial.shape,
                             {"bump", "two_bumps", "plateau", "two_species", "barenblatt"});
    c.initial.center = r.number("initial.center", c.initial.center);
    c.initial.width = r.number("initial.width", c.initial.width);
    c.initial.amplitude = r.number("initial.amplitude", c.initial.amplitude);
    c.initial.bound_B = r.number("initial.bound_B", c.initial.bound_B);
    c.run.T = r.number("run.T", c.run.T);
    c.run.cfl = r.number("run.cfl", c.run.cfl);
    c.run.max_dt = r.number("run.max_dt", c.run.max_dt);
    c.run.reaction_fraction = r.number("run.reaction_fraction", c.run.reaction_fraction);
    c.run.keep_all = r.boolean("run.keep_all", c.run.keep_all);
    if (raw.has("run.observer_times")) c.run.observer_times = r.numbers("run.observer_times");
    else r.seen.push_back("run.observer_times");
    c.sweep.arm = r.text("sweep.arm", c.sweep.arm, {"nu", "gamma", "joint"});
    if (raw.has("sweep.nu")) c.sweep.nu = r.numbers("sweep.nu");
    else r.seen.push_back("sweep.nu");
    if (raw.has("sweep.gamma")) c.sweep.gamma = r.numbers("sweep.gamma");
    else r.seen.push_back("sweep.gamma");
    c.sweep.proxy_gamma = r.number("sweep.proxy_gamma", c.sweep.proxy_gamma);
    c.diagnostics.enabled = r.texts("diagnostics.enabled", c.diagnostics.enabled);
    c.diagnostics.V_p = r.number("diagnostics.V_p", c.diagnostics.V_p);
    c.diagnostics.margin = r.number("diagnostics.margin", c.diagnostics.margin);
    c.diagnostics.power_m = r.number("diagnostics.power_m", c.diagnostics.power_m);
    c.diagnostics.t0 = r.number("diagnostics.t0", c.diagnostics.t0);
    c.output_dir = r.text("output.directory", c.output_dir);

    r.check_unknown();

    // semantic checks
    if (c.grid.dim != 1 && c.grid.dim != 2)
        r.errors.push_back("grid.dim must be 1 or 2");
    if (c.grid.n < 8) r.errors.push_back("grid.n must be at least 8");
    if (!(c.grid.length > 0.0)) r.errors.push_back("grid.length must be positive");
    if (!(c.law.nu >= 0.0)) r.errors.push_back("law.nu must be nonnegative");
    if (c.law.family != "incompressible" && !(c.law.gamma > 0.0))
        r.errors.push_back("law.gamma must be positive");
    if (!(c.run.T >= 0.0)) r.errors.push_back("run.T must be nonnegative");
    static const std::vector<std::string> known_diags = {
        "bound_monitor",    "internal_energy", "h1_energy",       "derivative_budget",
        "complementarity",  "singular_mass",   "flux_swap",       "velocity_gap",
        "power_entropy",    "entropy"};
    for (const auto& d : c.diagnostics.enabled)
        if (std::find(known_diags.begin(), known_diags.end(), d) == known_diags.end()) {
            std::string best;
            std::size_t dist = static_cast<std::size_t>(-1);
            for (const auto& k : known_diags) {
                std::size_t dd = detail::levenshtein(d, k);
                if (dd < dist) { dist = dd; best = k; }
            }
            r.errors.push_back("unknown diagnostic '" + d + "' (did you mean '" + best + "'?)");
        }

    if (!r.errors.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& e : r.errors) msg += "\n  " + e;
        throw Error(msg);
    }
    return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
    std::istringstream ss(text);
    return parse_config(ss);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace brinkman
