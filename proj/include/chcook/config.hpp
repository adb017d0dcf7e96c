// config.hpp — flat key=value run configuration.
//
// The format is INI-like: one `key = value` per line, `#` or `;` comments,
// optional `[section]` headers that are accepted and flattened. Every
// parameter is scalar or a comma-separated list of scalars. Parsing reports
// the first offending line with its number and key.

#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chcook/dynamics.hpp"

namespace chcook {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string experiment;

    // solver block
    int modes = 0;
    int points = 0;
    double dt = 0.0;
    double horizon = 0.0;
    double burn_in = 0.0;
    double lambda = 0.0;
    int n = 0;
    double eps_clip = 1e-12;
    double delta = 0.1;
    double mean_c = 0.0;
    std::uint64_t seed = 0;
    double noise_scale = 1.0;
    unsigned threads = 1;
    std::string x0 = "mean";    // "mean" | "mu_c" | "cos:<mode>:<amplitude>"
    std::string y0 = "mirror";  // same syntax, or "mirror" = x0 with negated modes

    // experiment-specific knobs (defaults are sensible desk-scale choices)
    std::size_t count = 20000;       // importance-sampling ensemble
    std::size_t ensemble = 1024;     // trajectory ensembles
    int replicates = 8;
    int pairs = 5;
    std::vector<int> n_list;
    std::vector<double> lags;
    std::vector<double> t_list;
    std::vector<double> scales;
    std::vector<std::string> observables;
    int reg_order = 4;
    int snapshot_every = 0;  // 0 = auto (about 200 rows)
    int time_bins = 16;
    std::vector<int> p_list;
    int p_ref = 2048;
    double pair_amplitude = 0.25;
    std::size_t steer_runs = 64;

    SolverConfig solver() const {
        SolverConfig s;
        s.modes = modes;
        s.points = points;
        s.dt = dt;
        s.horizon = horizon;
        s.burn_in = burn_in;
        s.pot.lambda = lambda;
        s.pot.n = n;
        s.pot.eps_clip = eps_clip;
        s.pot.delta = delta;
        s.mean_c = mean_c;
        s.noise_scale = noise_scale;
        s.master_seed = seed;
        return s;
    }
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "simulate",  "sample-measure", "invariant-convergence", "reflection", "semigroup",
        "strong-feller", "control",    "mixing",                "energy"};
    return names;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct ConfigLine {
    std::string key;
    std::string value;
    int line = 0;
};

[[noreturn]] inline void fail(int line, const std::string& key, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + " (" + key + "): " + what);
}

inline double parse_real(const ConfigLine& kv) {
    try {
        std::size_t used = 0;
        const double v = std::stod(kv.value, &used);
        if (used != kv.value.size()) fail(kv.line, kv.key, "trailing characters in number");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(kv.line, kv.key, "expected a real number, got '" + kv.value + "'");
    }
}

inline long long parse_int(const ConfigLine& kv) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(kv.value, &used);
        if (used != kv.value.size()) fail(kv.line, kv.key, "trailing characters in integer");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(kv.line, kv.key, "expected an integer, got '" + kv.value + "'");
    }
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace detail

/// Parses and validates a configuration document. Throws ConfigError with the
/// first offending line; cross-field constraints are reported against the
/// line that set the violating key.
inline RunConfig parse_config(const std::string& text) {
    using detail::ConfigLine;
    std::map<std::string, ConfigLine> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') continue;  // flattened section header
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key=value, got '" + detail::trim(raw) + "'");
        ConfigLine kv;
        kv.key = detail::trim(line.substr(0, eq));
        kv.value = detail::trim(line.substr(eq + 1));
        kv.line = lineno;
        if (kv.key.empty()) detail::fail(lineno, "?", "empty key");
        if (seen.count(kv.key)) detail::fail(lineno, kv.key, "duplicate key");
        seen.emplace(kv.key, kv);
    }

    RunConfig cfg;
    auto take = [&](const char* key) -> std::optional<ConfigLine> {
        auto it = seen.find(key);
        if (it == seen.end()) return std::nullopt;
        ConfigLine kv = it->second;
        seen.erase(it);
        return kv;
    };
    auto require = [&](const char* key) -> ConfigLine {
        auto kv = take(key);
        if (!kv) throw ConfigError(std::string("config: missing required key '") + key + "'");
        return *kv;
    };

    {
        const ConfigLine kv = require("experiment");
        cfg.experiment = kv.value;
        bool known = false;
        for (const auto& name : experiment_names()) known = known || name == kv.value;
        if (!known) detail::fail(kv.line, kv.key, "unknown experiment '" + kv.value + "'");
    }

    const ConfigLine kv_m = require("M");
    cfg.modes = static_cast<int>(detail::parse_int(kv_m));
    if (cfg.modes < 1) detail::fail(kv_m.line, "M", "M must be >= 1");

    const ConfigLine kv_p = require("P");
    cfg.points = static_cast<int>(detail::parse_int(kv_p));
    if (cfg.points < 2 * (cfg.modes + 1))
        detail::fail(kv_p.line, "P",
                     "P >= 2*(M+1) violated (P=" + std::to_string(cfg.points) +
                         ", M=" + std::to_string(cfg.modes) + ")");

    const ConfigLine kv_dt = require("dt");
    cfg.dt = detail::parse_real(kv_dt);
    if (!(cfg.dt > 0.0)) detail::fail(kv_dt.line, "dt", "dt must be > 0");

    const ConfigLine kv_t = require("T");
    cfg.horizon = detail::parse_real(kv_t);
    if (cfg.horizon < 0.0) detail::fail(kv_t.line, "T", "T must be >= 0");

    const ConfigLine kv_l = require("lambda");
    cfg.lambda = detail::parse_real(kv_l);

    const ConfigLine kv_n = require("n");
    cfg.n = static_cast<int>(detail::parse_int(kv_n));
    if (cfg.n < 0) detail::fail(kv_n.line, "n", "n must be >= 0");

    const ConfigLine kv_c = require("c");
    cfg.mean_c = detail::parse_real(kv_c);
    if (!(std::abs(cfg.mean_c) < 1.0)) detail::fail(kv_c.line, "c", "need |c| < 1");

    const ConfigLine kv_seed = require("seed");
    cfg.seed = static_cast<std::uint64_t>(detail::parse_int(kv_seed));

    if (auto kv = take("burn_in")) {
        cfg.burn_in = detail::parse_real(*kv);
        if (cfg.burn_in < 0.0) detail::fail(kv->line, "burn_in", "burn_in must be >= 0");
    }
    if (auto kv = take("eps_clip")) {
        cfg.eps_clip = detail::parse_real(*kv);
        if (!(cfg.eps_clip > 0.0 && cfg.eps_clip <= 1e-3))
            detail::fail(kv->line, "eps_clip", "eps_clip must lie in (0, 1e-3]");
    }
    if (auto kv = take("delta")) {
        cfg.delta = detail::parse_real(*kv);
        if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
            detail::fail(kv->line, "delta", "delta must lie in (0,1)");
    }
    if (auto kv = take("noise_scale")) {
        cfg.noise_scale = detail::parse_real(*kv);
        if (cfg.noise_scale < 0.0) detail::fail(kv->line, "noise_scale", "must be >= 0");
    }
    if (auto kv = take("threads")) {
        const long long v = detail::parse_int(*kv);
        if (v < 1) detail::fail(kv->line, "threads", "threads must be >= 1");
        cfg.threads = static_cast<unsigned>(v);
    }
    if (auto kv = take("x0")) cfg.x0 = kv->value;
    if (auto kv = take("y0")) cfg.y0 = kv->value;
    if (auto kv = take("count")) {
        const long long v = detail::parse_int(*kv);
        if (v < 1) detail::fail(kv->line, "count", "count must be >= 1");
        cfg.count = static_cast<std::size_t>(v);
    }
    if (auto kv = take("ensemble")) {
        const long long v = detail::parse_int(*kv);
        if (v < 1) detail::fail(kv->line, "ensemble", "ensemble must be >= 1");
        cfg.ensemble = static_cast<std::size_t>(v);
    }
    if (auto kv = take("replicates")) {
        const long long v = detail::parse_int(*kv);
        if (v < 2) detail::fail(kv->line, "replicates", "replicates must be >= 2");
        cfg.replicates = static_cast<int>(v);
    }
    if (auto kv = take("pairs")) {
        const long long v = detail::parse_int(*kv);
        if (v < 1) detail::fail(kv->line, "pairs", "pairs must be >= 1");
        cfg.pairs = static_cast<int>(v);
    }
    if (auto kv = take("reg_order")) {
        const long long v = detail::parse_int(*kv);
        if (v < 1) detail::fail(kv->line, "reg_order", "reg_order must be >= 1");
        cfg.reg_order = static_cast<int>(v);
    }
    if (auto kv = take("snapshot_every")) {
        const long long v = detail::parse_int(*kv);
        if (v < 0) detail::fail(kv->line, "snapshot_every", "must be >= 0");
        cfg.snapshot_every = static_cast<int>(v);
    }
    if (auto kv = take("time_bins")) {
        const long long v = detail::parse_int(*kv);
        if (v < 1) detail::fail(kv->line, "time_bins", "time_bins must be >= 1");
        cfg.time_bins = static_cast<int>(v);
    }
    if (auto kv = take("p_ref")) {
        const long long v = detail::parse_int(*kv);
        if (v < 4) detail::fail(kv->line, "p_ref", "p_ref must be >= 4");
        cfg.p_ref = static_cast<int>(v);
    }
    if (auto kv = take("pair_amplitude")) cfg.pair_amplitude = detail::parse_real(*kv);
    if (auto kv = take("steer_runs")) {
        const long long v = detail::parse_int(*kv);
        if (v < 1) detail::fail(kv->line, "steer_runs", "steer_runs must be >= 1");
        cfg.steer_runs = static_cast<std::size_t>(v);
    }
    if (auto kv = take("n_list")) {
        for (const auto& item : detail::split_list(kv->value)) {
            ConfigLine e{kv->key, item, kv->line};
            const long long v = detail::parse_int(e);
            if (v < 0) detail::fail(kv->line, "n_list", "entries must be >= 0");
            cfg.n_list.push_back(static_cast<int>(v));
        }
        for (std::size_t i = 1; i < cfg.n_list.size(); ++i)
            if (cfg.n_list[i] <= cfg.n_list[i - 1])
                detail::fail(kv->line, "n_list", "entries must be strictly increasing");
    }
    if (auto kv = take("p_list")) {
        for (const auto& item : detail::split_list(kv->value)) {
            ConfigLine e{kv->key, item, kv->line};
            cfg.p_list.push_back(static_cast<int>(detail::parse_int(e)));
        }
    }
    if (auto kv = take("lags")) {
        for (const auto& item : detail::split_list(kv->value)) {
            ConfigLine e{kv->key, item, kv->line};
            cfg.lags.push_back(detail::parse_real(e));
        }
        for (std::size_t i = 1; i < cfg.lags.size(); ++i)
            if (cfg.lags[i] <= cfg.lags[i - 1])
                detail::fail(kv->line, "lags", "entries must be strictly increasing");
    }
    if (auto kv = take("t_list")) {
        for (const auto& item : detail::split_list(kv->value)) {
            ConfigLine e{kv->key, item, kv->line};
            const double v = detail::parse_real(e);
            if (!(v > 0.0)) detail::fail(kv->line, "t_list", "entries must be > 0");
            cfg.t_list.push_back(v);
        }
    }
    if (auto kv = take("scales")) {
        for (const auto& item : detail::split_list(kv->value)) {
            ConfigLine e{kv->key, item, kv->line};
            const double v = detail::parse_real(e);
            if (v < 0.0) detail::fail(kv->line, "scales", "entries must be >= 0");
            cfg.scales.push_back(v);
        }
    }
    if (auto kv = take("observables")) cfg.observables = detail::split_list(kv->value);

    if (!seen.empty()) {
        const ConfigLine& kv = seen.begin()->second;
        detail::fail(kv.line, kv.key, "unknown key");
    }
    return cfg;
}

namespace detail {
inline SpectralField state_from_spec(const std::string& spec, const RunConfig& cfg,
                                     std::uint64_t stream_index) {
    if (spec == "mean") return SpectralField::constant(cfg.mean_c, cfg.modes);
    if (spec == "mu_c") {
        NoiseStream stream = make_stream(cfg.seed, StreamPurpose::initial, stream_index);
        return sample_mu_c(stream, cfg.mean_c, cfg.modes);
    }
    if (spec.rfind("cos:", 0) == 0) {
        const std::string rest = spec.substr(4);
        const std::size_t colon = rest.find(':');
        if (colon == std::string::npos)
            throw ConfigError("x0/y0: expected cos:<mode>:<amplitude>, got '" + spec + "'");
        int mode = 0;
        double amp = 0.0;
        try {
            mode = std::stoi(rest.substr(0, colon));
            amp = std::stod(rest.substr(colon + 1));
        } catch (...) {
            throw ConfigError("x0/y0: expected cos:<mode>:<amplitude>, got '" + spec + "'");
        }
        if (mode < 1 || mode > cfg.modes) throw ConfigError("x0/y0: mode outside 1..M");
        SpectralField h = SpectralField::constant(cfg.mean_c, cfg.modes);
        h[mode] = amp;
        return h;
    }
    throw ConfigError("x0/y0: unknown spec '" + spec + "'");
}
}  // namespace detail

/// Initial state from the x0 spec string.
inline SpectralField initial_state(const RunConfig& cfg) {
    return detail::state_from_spec(cfg.x0, cfg, 0);
}

/// Companion state for pairwise experiments; "mirror" negates the
/// fluctuating modes of x0, which keeps the mean and the band.
inline SpectralField second_state(const RunConfig& cfg) {
    if (cfg.y0 == "mirror") {
        SpectralField h = initial_state(cfg);
        for (int i = 1; i <= h.modes(); ++i) h[i] = -h[i];
        return h;
    }
    return detail::state_from_spec(cfg.y0, cfg, 1);
}

}  // namespace chcook
