#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcstar/bench.hpp"

namespace pcstar::config {

/// Malformed experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
}

inline std::vector<std::size_t> size_list(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    std::vector<std::size_t> out;
    if (v.is_array()) {
        for (const auto& x : v) out.push_back(x.get<std::size_t>());
    } else {
        out.push_back(v.get<std::size_t>());
    }
    if (out.empty()) throw ConfigError(std::string("'") + key + "' is empty");
    return out;
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace detail

/// Testing-loop grid: N and N_r may be scalars or lists (cartesian product,
/// N outer).
///
///   {"N": 10, "N_r": [50, 100], "K": 5, "trials": 200, "seed": 1,
///    "alpha": 0.05, "methods": ["pc", "pcstar"], "time_budget": "none"}
inline std::vector<bench::ExperimentConfig> experiments_from_json(const nlohmann::json& j) {
    return detail::guarded([&] {
        detail::check_keys(j, {"N", "N_r", "K", "trials", "seed", "alpha", "pcstar_alpha", "methods", "time_budget", "kl_samples"});
        bench::ExperimentConfig base;
        base.max_parents = detail::get_or(j, "K", 5);
        base.trials = detail::get_or<std::size_t>(j, "trials", 100);
        base.seed = detail::get_or<std::uint64_t>(j, "seed", 1);
        base.alpha = detail::get_or(j, "alpha", 0.05);
        if (j.contains("pcstar_alpha")) base.pcstar_alpha = j.at("pcstar_alpha").get<double>();
        base.kl_samples = detail::get_or<std::size_t>(j, "kl_samples", kDefaultKlSamples);
        if (j.contains("methods")) {
            base.methods.clear();
            for (const auto& m : j.at("methods")) base.methods.push_back(bench::method_from_string(m.get<std::string>()));
        }
        if (!base.uses(bench::Method::pcstar)) base.methods.push_back(bench::Method::pcstar);
        const auto budget = detail::get_or<std::string>(j, "time_budget", "none");
        if (budget == "stall_cutoff") {
            base.stall_budget = true;
        } else if (budget != "none") {
            throw ConfigError("time_budget must be \"none\" or \"stall_cutoff\"");
        }
        std::vector<bench::ExperimentConfig> out;
        for (auto n : detail::size_list(j, "N")) {
            for (auto nr : detail::size_list(j, "N_r")) {
                auto c = base;
                c.nodes = n;
                c.records = nr;
                c.validate();
                out.push_back(c);
            }
        }
        return out;
    });
}

///   {"grid": [[40, 100], [10, 6400]], "K": 5, "trials": 50, "seed": 1,
///    "alpha": 0.05, "unbounded": false, "pcstar_factor": 100}
/// "N"/"N_r" lists may replace "grid".
inline bench::StallConfig stall_from_json(const nlohmann::json& j) {
    return detail::guarded([&] {
        detail::check_keys(j, {"grid", "N", "N_r", "K", "trials", "seed", "alpha", "unbounded", "pcstar_factor"});
        bench::StallConfig c;
        c.max_parents = detail::get_or(j, "K", 5);
        c.trials = detail::get_or<std::size_t>(j, "trials", 50);
        c.seed = detail::get_or<std::uint64_t>(j, "seed", 1);
        c.alpha = detail::get_or(j, "alpha", 0.05);
        c.unbounded = detail::get_or(j, "unbounded", false);
        c.pcstar_factor = detail::get_or(j, "pcstar_factor", 100.0);
        c.grid.clear();
        if (j.contains("grid")) {
            for (const auto& cell : j.at("grid")) c.grid.emplace_back(cell.at(0).get<std::size_t>(), cell.at(1).get<std::size_t>());
        } else {
            for (auto n : detail::size_list(j, "N")) {
                for (auto nr : detail::size_list(j, "N_r")) c.grid.emplace_back(n, nr);
            }
        }
        if (c.grid.empty()) throw ConfigError("stall grid is empty");
        if (!(c.alpha > 0 && c.alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
        if (c.trials < 2) throw ConfigError("stall experiment needs at least two trials");
        return c;
    });
}

///   {"N": 10, "N_r": 100, "alphas": [0.0001, 0.001, 0.01, 0.05, 0.2],
///    "trials": 200, "seed": 1}
inline bench::AlphaSweepConfig alpha_sweep_from_json(const nlohmann::json& j) {
    return detail::guarded([&] {
        detail::check_keys(j, {"N", "N_r", "K", "alphas", "trials", "seed", "pcstar_alpha"});
        bench::AlphaSweepConfig c;
        c.nodes = detail::get_or<std::size_t>(j, "N", 10);
        c.records = detail::get_or<std::size_t>(j, "N_r", 100);
        c.max_parents = detail::get_or(j, "K", 5);
        c.trials = detail::get_or<std::size_t>(j, "trials", 200);
        c.seed = detail::get_or<std::uint64_t>(j, "seed", 1);
        if (j.contains("alphas")) c.alphas = j.at("alphas").get<std::vector<double>>();
        if (j.contains("pcstar_alpha")) c.pcstar_alpha = j.at("pcstar_alpha").get<double>();
        if (c.alphas.empty()) throw ConfigError("alphas is empty");
        for (double a : c.alphas) {
            if (!(a > 0 && a < 1)) throw ConfigError("every alpha must lie in (0, 1)");
        }
        if (c.nodes < 2 || c.trials < 1) throw ConfigError("need N >= 2 and at least one trial");
        return c;
    });
}

}  // namespace pcstar::config
