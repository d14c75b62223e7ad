#pragma once

// Flat key = value experiment configuration.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ligep/errors.hpp"
#include "ligep/model.hpp"

namespace ligep::bench {

enum class Method { LigepRom, PodGalerkin };

inline std::string to_string(Method m) {
    return m == Method::LigepRom ? "ligep-rom" : "pod-galerkin";
}

inline Method parse_method(const std::string& s) {
    if (s == "ligep-rom") return Method::LigepRom;
    if (s == "pod-galerkin") return Method::PodGalerkin;
    throw ConfigError("unknown method '" + s + "' (expected ligep-rom or pod-galerkin)");
}

struct ExperimentConfig {
    Model model = Model::Wave;
    double a = 0.0;
    double b = 1.0;
    double dx = 0.0;
    double dt = 0.0;
    double train_horizon = 0.0;
    double final_horizon = 0.0;
    std::vector<long> ranks;
    std::vector<Method> methods{Method::LigepRom, Method::PodGalerkin};
    ModelParams params;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    std::string rom_path = "lifted";
    long state_stride = 0;

    std::size_t train_steps() const { return steps_for(train_horizon); }
    std::size_t final_steps() const { return steps_for(final_horizon); }

    std::size_t steps_for(double horizon) const {
        const double count = horizon / dt;
        const double rounded = std::round(count);
        if (std::abs(count - rounded) > 1e-8 * std::max(1.0, count)) {
            throw ConfigError("horizon " + std::to_string(horizon) + " is not a multiple of dt");
        }
        return static_cast<std::size_t>(rounded);
    }

    void validate() const {
        if (!(b > a)) throw ConfigError("domain: right endpoint must exceed left endpoint");
        if (!(dx > 0.0)) throw ConfigError("dx must be positive");
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(train_horizon > 0.0)) throw ConfigError("train_horizon must be positive");
        if (train_horizon > final_horizon) throw ConfigError("train_horizon must not exceed final_horizon");
        for (long r : ranks)
            if (r < 1) throw ConfigError("ranks must be positive");
        if (rom_path != "lifted" && rom_path != "tensor") {
            throw ConfigError("rom_path must be lifted or tensor");
        }
        if (state_stride < 0) throw ConfigError("state_stride must be non-negative");
        if (train_steps() < 2) throw ConfigError("training window must span at least 2 steps");
        (void)final_steps();
        const double count = (b - a) / dx;
        if (std::abs(count - std::round(count)) > 1e-8 * std::max(1.0, count) || std::round(count) < 3) {
            throw ConfigError("dx must divide the domain into at least 3 cells");
        }
    }

    /// Full-size experiment defaults for each model.
    static ExperimentConfig defaults(Model m) {
        ExperimentConfig c;
        c.model = m;
        switch (m) {
            case Model::Wave:
                c.a = -10.0, c.b = 10.0, c.dx = 0.02, c.dt = 0.01;
                c.train_horizon = 10.0, c.final_horizon = 40.0, c.ranks = {20, 50};
                break;
            case Model::Kdv:
                c.a = 0.0, c.b = 2.0, c.dx = 0.001, c.dt = 0.01;
                c.train_horizon = 3.0, c.final_horizon = 8.0, c.ranks = {70, 120};
                break;
            case Model::Ch:
                c.a = 0.0, c.b = 30.0, c.dx = 0.03, c.dt = 0.005;
                c.train_horizon = 6.0, c.final_horizon = 12.0, c.ranks = {70, 120};
                break;
        }
        return c;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
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

inline double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

inline long to_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
}

}  // namespace detail

inline std::vector<long> parse_ranks(const std::string& text) {
    std::vector<long> out;
    for (const auto& item : detail::split_list(text)) out.push_back(detail::to_long("ranks", item));
    if (out.empty()) throw ConfigError("ranks: empty list");
    return out;
}

/// Parse `key = value` lines; `#` starts a comment. The model key selects the
/// defaults that the remaining keys override.
inline ExperimentConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
    }
    const auto model_it = kv.find("model");
    if (model_it == kv.end()) throw ConfigError("missing required key 'model'");
    ExperimentConfig cfg;
    try {
        cfg = ExperimentConfig::defaults(parse_model(model_it->second));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    for (const auto& [key, value] : kv) {
        if (key == "model") continue;
        if (key == "domain") {
            const auto parts = detail::split_list(value);
            if (parts.size() != 2) throw ConfigError("domain: expected 'a, b'");
            cfg.a = detail::to_double(key, parts[0]);
            cfg.b = detail::to_double(key, parts[1]);
        } else if (key == "dx") {
            cfg.dx = detail::to_double(key, value);
        } else if (key == "dt") {
            cfg.dt = detail::to_double(key, value);
        } else if (key == "train_horizon") {
            cfg.train_horizon = detail::to_double(key, value);
        } else if (key == "final_horizon") {
            cfg.final_horizon = detail::to_double(key, value);
        } else if (key == "ranks") {
            cfg.ranks = parse_ranks(value);
        } else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& m : detail::split_list(value)) cfg.methods.push_back(parse_method(m));
        } else if (key == "eta") {
            cfg.params.kdv.eta = detail::to_double(key, value);
        } else if (key == "gamma") {
            cfg.params.kdv.gamma = detail::to_double(key, value);
        } else if (key == "c") {
            cfg.params.ch.c = detail::to_double(key, value);
        } else if (key == "a") {
            cfg.params.ch.a = detail::to_double(key, value);
        } else if (key == "x0") {
            cfg.params.ch.x0 = detail::to_double(key, value);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(detail::to_long(key, value));
        } else if (key == "rom_path") {
            cfg.rom_path = value;
        } else if (key == "state_stride") {
            cfg.state_stride = detail::to_long(key, value);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

inline ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace ligep::bench
