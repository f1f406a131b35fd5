#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "swdelay/bound.hpp"
#include "swdelay/model.hpp"
#include "swdelay/synth.hpp"
#include "swdelay/types.hpp"

namespace swdelay {

// One problem instance as read from a JSON config file. All tolerances and
// budgets have pinned defaults; CLI flags may override individual fields.
struct ProblemConfig {
    Plant plant;
    DelaySet delays;
    std::optional<Gain> gain;
    Vec e0;                   // defaults to the first standard basis vector
    int tau = 9;
    int eta = 50;
    std::uint64_t seed = 0;
    int restarts = 5;
    BoundOptions bound;
    SynthOptions synth;
    std::string out_dir = ".";
};

namespace detail {

inline Mat parse_matrix(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ConfigError(what + ": expected a nested array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.front().size());
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[static_cast<std::size_t>(r)].size()) != cols)
            throw ConfigError(what + ": ragged rows");
        for (int c = 0; c < cols; ++c) {
            const auto& cell = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (!cell.is_number()) throw ConfigError(what + ": non-numeric entry");
            m(r, c) = cell.get<double>();
            if (!std::isfinite(m(r, c))) throw ConfigError(what + ": non-finite entry");
        }
    }
    return m;
}

}  // namespace detail

inline ProblemConfig parse_config(const nlohmann::json& j) {
    ProblemConfig cfg;
    if (!j.contains("plant") || !j["plant"].contains("a") || !j["plant"].contains("b"))
        throw ConfigError("config: missing plant.a / plant.b");
    cfg.plant.a_p = detail::parse_matrix(j["plant"]["a"], "plant.a");
    cfg.plant.b_p = detail::parse_matrix(j["plant"]["b"], "plant.b");
    cfg.plant.validate();

    if (!j.contains("delays") || !j["delays"].is_array() || j["delays"].empty())
        throw ConfigError("config: missing delay set");
    cfg.delays = DelaySet::from(j["delays"].get<std::vector<int>>());

    if (j.contains("gain") && !j["gain"].is_null()) {
        Gain g;
        for (const auto& block : j["gain"]) g.blocks.push_back(detail::parse_matrix(block, "gain"));
        g.validate(cfg.plant, cfg.delays);
        cfg.gain = std::move(g);
    }

    cfg.e0 = Vec::Zero(cfg.plant.n());
    cfg.e0(0) = 1.0;
    if (j.contains("e0")) {
        const auto v = j["e0"].get<std::vector<double>>();
        if (static_cast<int>(v.size()) != cfg.plant.n())
            throw ConfigError("config: e0 must have the plant dimension");
        for (std::size_t i = 0; i < v.size(); ++i) cfg.e0(static_cast<int>(i)) = v[i];
    }

    cfg.tau = j.value("tau", 9);
    cfg.eta = j.value("eta", 50);
    if (cfg.tau < 0 || cfg.eta < cfg.tau) throw ConfigError("config: need 0 <= tau <= eta");
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.restarts = j.value("restarts", 5);

    cfg.bound.alpha = j.value("alpha", 0.0);
    cfg.bound.beta = j.value("beta", 1.01);
    cfg.bound.strict_alpha_exponent = j.value("strict_alpha_exponent", false);
    if (j.contains("budgets")) {
        const auto& b = j["budgets"];
        cfg.bound.prefix_budget = b.value("prefix", cfg.bound.prefix_budget);
        cfg.bound.jsr.product_budget = b.value("products", cfg.bound.jsr.product_budget);
        cfg.bound.vertex_cap = b.value("vertex_cap", cfg.bound.vertex_cap);
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        cfg.bound.jsr.tol = t.value("jsr", cfg.bound.jsr.tol);
        cfg.bound.prune_tol = t.value("prune", cfg.bound.prune_tol);
    }
    cfg.synth.seed = cfg.seed;
    cfg.synth.restarts = cfg.restarts;
    cfg.synth.jsr = cfg.bound.jsr;
    cfg.out_dir = j.value("out_dir", std::string("."));
    return cfg;
}

inline ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    return parse_config(j);
}

}  // namespace swdelay
