#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "swdelay/runner.hpp"

namespace {

swdelay::Gain parse_gain_flag(const std::string& spec, const swdelay::Plant& plant,
                              const swdelay::DelaySet& delays) {
    if (plant.n() != 1 || plant.m() != 1)
        throw swdelay::ConfigError("--gain shorthand is only available for scalar plants");
    swdelay::Gain g;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ','))
        g.blocks.push_back(swdelay::Mat::Constant(1, 1, std::stod(tok)));
    g.validate(plant, delays);
    return g;
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> tau;
    std::optional<int> eta;
    std::optional<std::string> out_dir;
    std::optional<std::string> gain;
    bool strict_alpha = false;

    void attach(CLI::App* app, bool config_required = true) {
        auto* opt = app->add_option("--config", config_path, "problem configuration file (JSON)");
        if (config_required) opt->required();
        app->add_option("--seed", seed, "random seed override");
        app->add_option("--tau", tau, "exhaustive-prefix horizon override");
        app->add_option("--eta", eta, "propagation horizon override");
        app->add_option("--out", out_dir, "output directory override");
        app->add_option("--gain", gain, "gain override, comma-separated (scalar plants)");
        app->add_flag("--strict-alpha", strict_alpha,
                      "weight the propagation series by alpha^k instead of alpha^(2k)");
    }

    swdelay::ProblemConfig load() const {
        swdelay::ProblemConfig cfg = swdelay::load_config(config_path);
        if (seed) {
            cfg.seed = *seed;
            cfg.synth.seed = *seed;
        }
        if (tau) cfg.tau = *tau;
        if (eta) cfg.eta = *eta;
        if (cfg.tau < 0 || cfg.eta < cfg.tau)
            throw swdelay::ConfigError("need 0 <= tau <= eta");
        if (out_dir) cfg.out_dir = *out_dir;
        if (gain) cfg.gain = parse_gain_flag(*gain, cfg.plant, cfg.delays);
        cfg.bound.strict_alpha_exponent = strict_alpha || cfg.bound.strict_alpha_exponent;
        return cfg;
    }
};

int dispatch(const std::function<int()>& body) {
    try {
        return body();
    } catch (const swdelay::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return swdelay::exit_config;
    } catch (const swdelay::UnsupportedError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return swdelay::exit_config;
    } catch (const swdelay::UnstableError& e) {
        std::cerr << "unstable: " << e.what() << '\n';
        return swdelay::exit_unstable;
    } catch (const swdelay::BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return swdelay::exit_budget;
    } catch (const swdelay::GeometryError& e) {
        std::cerr << "geometry failure: " << e.what() << '\n';
        return swdelay::exit_geometry;
    } catch (const swdelay::LpFailureError& e) {
        std::cerr << "geometry failure: " << e.what() << '\n';
        return swdelay::exit_geometry;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gain synthesis and worst-case L2 bounds for plants with switching actuation delays"};
    app.require_subcommand(1);

    CommonFlags model_flags, jsr_flags, bound_flags, synth_flags;
    std::string repro_out = "repro_out";

    auto* cmd_model = app.add_subcommand("model", "print the switched error family and its transition graph");
    model_flags.attach(cmd_model);
    auto* cmd_jsr = app.add_subcommand("jsr", "estimate the joint spectral radius of the lifted family");
    jsr_flags.attach(cmd_jsr);
    auto* cmd_bound = app.add_subcommand("bound", "evaluate the three-term worst-case L2 bound");
    bound_flags.attach(cmd_bound);
    auto* cmd_synth = app.add_subcommand("synth", "minimize the certified growth rate over the gain");
    synth_flags.attach(cmd_synth);
    auto* cmd_repro = app.add_subcommand("repro", "run the bundled case studies and emit plot data");
    cmd_repro->add_option("--out", repro_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (cmd_model->parsed())
        return dispatch([&] { return swdelay::run_model(model_flags.load(), std::cout); });
    if (cmd_jsr->parsed())
        return dispatch([&] { return swdelay::run_jsr(jsr_flags.load(), std::cout); });
    if (cmd_bound->parsed())
        return dispatch([&] { return swdelay::run_bound(bound_flags.load(), std::cout); });
    if (cmd_synth->parsed())
        return dispatch([&] { return swdelay::run_synth(synth_flags.load(), std::cout, true); });
    if (cmd_repro->parsed())
        return dispatch([&] { return swdelay::run_repro(repro_out, std::cout); });
    return swdelay::exit_config;
}
