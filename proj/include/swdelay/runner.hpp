#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "swdelay/config.hpp"
#include "swdelay/jsr.hpp"
#include "swdelay/synth.hpp"

namespace swdelay {

// Stable exit-code map shared by all subcommands.
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_unstable = 3,
    exit_budget = 4,
    exit_geometry = 5,
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_matrix(std::ostream& os, const Mat& m) {
    for (int r = 0; r < m.rows(); ++r) {
        os << "  [";
        for (int c = 0; c < m.cols(); ++c) os << (c ? ", " : " ") << fmt(m(r, c));
        os << " ]\n";
    }
}

}  // namespace detail

inline void write_series_csv(std::ostream& os, const BoundReport& rep) {
    os << "k,exact_sq_norm,polytope_sq_norm,source\n";
    for (const SeriesEntry& e : rep.series) {
        os << e.k << ',';
        if (std::isfinite(e.exact_sq)) os << detail::fmt(e.exact_sq);
        os << ',';
        if (std::isfinite(e.polytope_sq)) os << detail::fmt(e.polytope_sq);
        os << ',' << e.source << '\n';
    }
}

inline void write_bound_report(std::ostream& os, const BoundReport& rep) {
    os << "tau = " << rep.tau << '\n'
       << "eta = " << rep.eta << '\n'
       << "alpha = " << detail::fmt(rep.alpha) << '\n'
       << "rho_lower = " << detail::fmt(rep.rho_lower) << '\n'
       << "rho_upper = " << detail::fmt(rep.rho_upper) << '\n'
       << "certified = " << (rep.certified ? "true" : "false") << '\n'
       << "equivalence_constant = " << detail::fmt(rep.equiv_c) << '\n'
       << "term_prefix = " << detail::fmt(rep.term_prefix) << '\n'
       << "term_polytope = " << detail::fmt(rep.term_polytope) << '\n'
       << "term_tail = " << detail::fmt(rep.term_tail) << '\n'
       << "total = " << detail::fmt(rep.total) << '\n';
    os << "vertex_count_final = "
       << (rep.vertex_counts.empty() ? 0 : rep.vertex_counts.back()) << '\n';
}

// Parsed CSV row used by the round-trip check and external consumers.
struct CsvRow {
    int k;
    std::optional<double> exact_sq;
    std::optional<double> polytope_sq;
    std::string source;
};

inline std::vector<CsvRow> parse_series_csv(std::istream& is) {
    std::vector<CsvRow> rows;
    std::string line;
    if (!std::getline(is, line) || line != "k,exact_sq_norm,polytope_sq_norm,source")
        throw ConfigError("series csv: bad header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        CsvRow row;
        std::getline(ss, field, ',');
        row.k = std::stoi(field);
        std::getline(ss, field, ',');
        if (!field.empty()) row.exact_sq = std::stod(field);
        std::getline(ss, field, ',');
        if (!field.empty()) row.polytope_sq = std::stod(field);
        std::getline(ss, row.source, ',');
        rows.push_back(std::move(row));
    }
    return rows;
}

inline int run_model(const ProblemConfig& cfg, std::ostream& out) {
    const Gain gain = cfg.gain ? *cfg.gain : Gain::zero(cfg.plant, cfg.delays);
    ExtendedOpenLoop ext = build_extended(cfg.plant, cfg.delays);
    out << "extended open loop (side " << ext.a_ext.rows() << ")\n";
    detail::write_matrix(out, ext.a_ext);
    for (const auto& [sigma, col] : ext.b_ext) {
        out << "input column, delay " << sigma << '\n';
        detail::write_matrix(out, col);
    }

    SwitchedErrorSystem sys = build_error_system(cfg.plant, cfg.delays, gain);
    out << "switched error family: " << sys.matrices.size() << " matrices, dimension "
        << sys.dim() << '\n';
    for (std::size_t i = 0; i < sys.words.size(); ++i) {
        out << "N[" << word_to_string(sys.words[i]) << "]\n";
        detail::write_matrix(out, sys.matrices[i]);
    }
    out << "admissible transitions:\n";
    std::size_t edges = 0;
    for (std::size_t i = 0; i < sys.words.size(); ++i)
        for (int j : sys.successors[i]) {
            out << "  " << word_to_string(sys.words[i]) << " -> "
                << word_to_string(sys.words[static_cast<std::size_t>(j)]) << '\n';
            ++edges;
        }
    out << "edges = " << edges << '\n';
    return exit_ok;
}

inline int run_jsr(const ProblemConfig& cfg, std::ostream& out) {
    const Gain gain = cfg.gain ? *cfg.gain : Gain::zero(cfg.plant, cfg.delays);
    LiftedSet lifted = lift(build_error_system(cfg.plant, cfg.delays, gain));
    JsrEstimate est = jsr(lifted, cfg.bound.jsr);
    out << "rho_lower = " << detail::fmt(est.lower) << '\n'
        << "rho_upper = " << detail::fmt(est.upper) << '\n'
        << "certified = " << (est.certified ? "true" : "false") << '\n'
        << "candidate_word = " << word_to_string(est.candidate_word) << '\n';
    if (est.extremal)
        out << "extremal_vertices = " << est.extremal->vertices.size() << '\n';
    return exit_ok;
}

inline int run_bound(const ProblemConfig& cfg, std::ostream& out) {
    if (!cfg.gain) throw ConfigError("bound: a gain is required (set \"gain\" or use synth)");
    BoundReport rep =
        total_bound(cfg.plant, cfg.delays, *cfg.gain, cfg.e0, cfg.tau, cfg.eta, cfg.bound);
    write_bound_report(out, rep);

    std::filesystem::create_directories(cfg.out_dir);
    const auto report_path = std::filesystem::path(cfg.out_dir) / "bound_report.txt";
    const auto csv_path = std::filesystem::path(cfg.out_dir) / "bound_series.csv";
    std::ofstream rf(report_path);
    write_bound_report(rf, rep);
    std::ofstream cf(csv_path);
    write_series_csv(cf, rep);
    out << "report = " << report_path.string() << '\n'
        << "series = " << csv_path.string() << '\n';
    return exit_ok;
}

inline int run_synth(const ProblemConfig& cfg, std::ostream& out, bool with_bound) {
    const Gain k_init = cfg.gain ? *cfg.gain : Gain::zero(cfg.plant, cfg.delays);
    SynthesisResult res;
    if (with_bound)
        res = synthesize_and_bound(cfg.plant, cfg.delays, k_init, cfg.e0, cfg.tau, cfg.eta,
                                   cfg.synth, cfg.bound);
    else
        res = minimize_rho(cfg.plant, cfg.delays, k_init, cfg.synth);

    out << "seed = " << cfg.seed << '\n';
    out << "restarts = " << res.restarts_used << '\n';
    for (std::size_t j = 0; j < res.gain.blocks.size(); ++j) {
        out << "K" << j << " =\n";
        detail::write_matrix(out, res.gain.blocks[j]);
    }
    out << "rho_lower = " << detail::fmt(res.rho_lower) << '\n'
        << "rho_upper = " << detail::fmt(res.rho_upper) << '\n'
        << "certified = " << (res.certified ? "true" : "false") << '\n';
    if (res.bound) {
        out << "--- bound at the synthesized gain ---\n";
        write_bound_report(out, *res.bound);
    }
    return exit_ok;
}

// Reference configurations for the two bundled case studies.
inline ProblemConfig case_study(double a, double k0, double k1) {
    ProblemConfig cfg;
    cfg.plant.a_p = Mat::Constant(1, 1, a);
    cfg.plant.b_p = Mat::Constant(1, 1, 1.0);
    cfg.delays = DelaySet::from({0, 1});
    Gain g;
    g.blocks = {Mat::Constant(1, 1, k0), Mat::Constant(1, 1, k1)};
    cfg.gain = g;
    cfg.e0 = Vec::Ones(1);
    cfg.tau = 9;
    cfg.eta = 50;
    return cfg;
}

inline int run_repro(const std::string& out_dir, std::ostream& out) {
    struct Case {
        std::string name;
        double a, k0, k1;
        double ref_prefix, ref_polytope;
        double tol_prefix, tol_polytope;
    };
    const std::vector<Case> cases = {
        {"a1.1", 1.1, -0.6085, 0.0941, 33.1, 52.2, 0.20, 0.25},
        {"a1.5", 1.5, -0.9047, 0.1430, 106.9, 163.6, 0.20, 0.25},
    };

    std::filesystem::create_directories(out_dir);
    std::ofstream summary(std::filesystem::path(out_dir) / "summary.csv");
    summary << "case,quantity,computed,reference,rel_error,pass\n";
    bool all_pass = true;

    for (const Case& c : cases) {
        ProblemConfig cfg = case_study(c.a, c.k0, c.k1);
        BoundReport rep =
            total_bound(cfg.plant, cfg.delays, *cfg.gain, cfg.e0, cfg.tau, cfg.eta, cfg.bound);

        std::ofstream cf(std::filesystem::path(out_dir) / ("case_" + c.name + ".csv"));
        write_series_csv(cf, rep);
        std::ofstream rf(std::filesystem::path(out_dir) / ("case_" + c.name + "_report.txt"));
        write_bound_report(rf, rep);

        double poly_0_to_tau = 0.0;
        for (const SeriesEntry& e : rep.series)
            if (e.k <= rep.tau && std::isfinite(e.polytope_sq)) poly_0_to_tau += e.polytope_sq;

        auto emit = [&](const std::string& qty, double got, double ref, double tol) {
            const double rel = std::abs(got - ref) / ref;
            const bool pass = rel <= tol;
            all_pass = all_pass && pass;
            summary << c.name << ',' << qty << ',' << detail::fmt(got) << ',' << detail::fmt(ref)
                    << ',' << detail::fmt(rel) << ',' << (pass ? "true" : "false") << '\n';
            out << c.name << ' ' << qty << ": " << got << " (reference " << ref << ", "
                << (pass ? "pass" : "FAIL") << ")\n";
        };
        emit("prefix_sum_0_tau", rep.term_prefix, c.ref_prefix, c.tol_prefix);
        emit("polytope_sum_0_tau", poly_0_to_tau, c.ref_polytope, c.tol_polytope);
        out << c.name << " rho_upper = " << rep.rho_upper << ", C = " << rep.equiv_c
            << ", tail = " << rep.term_tail << ", total = " << rep.total << '\n';
    }
    out << (all_pass ? "all comparisons passed" : "some comparisons FAILED") << '\n';
    return exit_ok;
}

}  // namespace swdelay
