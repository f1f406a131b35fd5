#pragma once

#include <algorithm>
#include <optional>
#include <random>

#include "swdelay/bound.hpp"
#include "swdelay/jsr.hpp"
#include "swdelay/nelder_mead.hpp"
#include "swdelay/types.hpp"

namespace swdelay {

struct SynthOptions {
    int restarts = 5;           // random restarts in addition to k_init
    int nm_max_evals = 500;
    double nm_diam_tol = 1e-6;
    double nm_edge = 0.1;
    int surrogate_depth = 5;    // product-bound depth during descent
    std::uint64_t seed = 0;
    bool polish_bound = false;  // second descent pass on the full bound
    JsrOptions jsr;
};

struct SynthesisResult {
    Gain gain;
    double rho_lower = 0.0;
    double rho_upper = 0.0;
    bool certified = false;
    std::vector<std::pair<int, double>> objective_history;  // best restart
    int restarts_used = 0;
    std::optional<BoundReport> bound;
};

namespace detail {

inline Gain gain_from_vector(const Vec& x, int m, int n, int d_max) {
    Gain g;
    g.blocks.reserve(static_cast<std::size_t>(d_max) + 1);
    int off = 0;
    for (int j = 0; j <= d_max; ++j) {
        Mat k(m, n);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) k(r, c) = x(off++);
        g.blocks.push_back(std::move(k));
    }
    return g;
}

inline Vec gain_to_vector(const Gain& g) {
    int total = 0;
    for (const Mat& k : g.blocks) total += static_cast<int>(k.size());
    Vec x(total);
    int off = 0;
    for (const Mat& k : g.blocks)
        for (int r = 0; r < k.rows(); ++r)
            for (int c = 0; c < k.cols(); ++c) x(off++) = k(r, c);
    return x;
}

}  // namespace detail

// Minimize the growth-rate estimate over the gain entries: Nelder-Mead on a
// fast product-bound surrogate, with random restarts, then polytope
// certification of the surviving candidates.
inline SynthesisResult minimize_rho(const Plant& plant, const DelaySet& delays,
                                    const Gain& k_init, const SynthOptions& opts = {}) {
    plant.validate();
    delays.validate();
    k_init.validate(plant, delays);
    const int n = plant.n();
    const int m = plant.m();
    const int d = delays.d_max;

    auto surrogate = [&](const Vec& x) {
        Gain g = detail::gain_from_vector(x, m, n, d);
        SwitchedErrorSystem sys = build_error_system(plant, delays, g);
        LiftedSet lifted = lift(sys);
        // the geometric mean of the product bounds tracks the true growth rate
        // far better than the norm-based upper bound alone
        auto [lo, up] = bounds_by_products(lifted, opts.surrogate_depth, opts.jsr.product_budget);
        return std::sqrt(lo * up);
    };

    std::mt19937_64 rng(opts.seed);
    const double amp = spectral_radius(plant.a_p) + 1.0;
    std::uniform_real_distribution<double> dist(-amp, amp);

    struct Candidate {
        Vec x;
        double surrogate_val;
        std::vector<std::pair<int, double>> history;
    };
    std::vector<Candidate> candidates;
    for (int r = 0; r <= opts.restarts; ++r) {
        Vec x0 = r == 0 ? detail::gain_to_vector(k_init)
                        : Vec::NullaryExpr(detail::gain_to_vector(k_init).size(),
                                           [&](Eigen::Index) { return dist(rng); });
        NelderMeadResult nm =
            nelder_mead(surrogate, x0, opts.nm_edge, opts.nm_max_evals, opts.nm_diam_tol);
        candidates.push_back({nm.x, nm.fval, std::move(nm.history)});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.surrogate_val < b.surrogate_val; });

    SynthesisResult best;
    best.restarts_used = opts.restarts;
    bool have = false;
    std::size_t certified_budget = 3;  // certify the top few candidates only
    for (std::size_t ci = 0; ci < candidates.size() && ci < certified_budget; ++ci) {
        const Candidate& c = candidates[ci];
        Gain g = detail::gain_from_vector(c.x, m, n, d);
        JsrEstimate est = jsr(lift(build_error_system(plant, delays, g)), opts.jsr);
        const bool better =
            !have || (est.certified && !best.certified) ||
            (est.certified == best.certified && est.upper < best.rho_upper);
        if (better) {
            best.gain = g;
            best.rho_lower = est.lower;
            best.rho_upper = est.upper;
            best.certified = est.certified;
            best.objective_history = c.history;
            have = true;
        }
        // keep certifying while candidates stay close to the best surrogate
        if (ci + 1 < candidates.size() &&
            candidates[ci + 1].surrogate_val < c.surrogate_val + 0.05)
            certified_budget = std::min<std::size_t>(6, std::max(certified_budget, ci + 2));
    }

    // never return a gain worse than the certified start
    {
        JsrEstimate init_est = jsr(lift(build_error_system(plant, delays, k_init)), opts.jsr);
        if (init_est.certified &&
            (!best.certified || init_est.upper < best.rho_upper)) {
            best.gain = k_init;
            best.rho_lower = init_est.lower;
            best.rho_upper = init_est.upper;
            best.certified = init_est.certified;
        }
    }

    if (best.rho_upper >= 1.0)
        throw UnstableError("synthesis: no stabilizing gain found (best growth-rate estimate " +
                            std::to_string(best.rho_upper) + ")");
    return best;
}

inline SynthesisResult synthesize_and_bound(const Plant& plant, const DelaySet& delays,
                                            const Gain& k_init, const Vec& e0, int tau, int eta,
                                            const SynthOptions& opts = {},
                                            const BoundOptions& bound_opts = {}) {
    SynthesisResult res = minimize_rho(plant, delays, k_init, opts);
    res.bound = total_bound(plant, delays, res.gain, e0, tau, eta, bound_opts);
    return res;
}

}  // namespace swdelay
