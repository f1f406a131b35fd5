#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "swdelay/jsr.hpp"
#include "swdelay/lift.hpp"
#include "swdelay/model.hpp"
#include "swdelay/polytope.hpp"
#include "swdelay/types.hpp"

namespace swdelay {

struct BoundOptions {
    double alpha = 0.0;              // 0 => rho_lower / beta
    double beta = 1.01;
    bool strict_alpha_exponent = false;  // use alpha^k instead of alpha^{2k}
    long long prefix_budget = 1LL << 24;
    int vertex_cap = 2000;
    double prune_tol = 1e-9;
    int dual_dim_cap = 8;
    JsrOptions jsr;
};

struct SeriesEntry {
    int k = 0;
    double exact_sq = std::numeric_limits<double>::quiet_NaN();
    double polytope_sq = std::numeric_limits<double>::quiet_NaN();
    std::string source;  // "exact" for k <= tau, "polytope" beyond
};

struct BoundReport {
    int tau = 0;
    int eta = 0;
    double alpha = 0.0;
    double rho_lower = 0.0;
    double rho_upper = 0.0;
    bool certified = false;
    double equiv_c = 0.0;
    double term_prefix = 0.0;
    double term_polytope = 0.0;
    double term_tail = 0.0;
    double total = 0.0;
    std::vector<SeriesEntry> series;
    std::vector<int> vertex_counts;  // per propagation step 0..eta
};

// Exact maximum of sum_{k=0}^{tau} ||eps(k)||^2 over all admissible delay
// prefixes, by depth-first enumeration from every initial word. Also returns
// the per-step maxima of ||eps(k)||^2.
inline std::pair<double, std::vector<double>> prefix_term(const SwitchedErrorSystem& sys,
                                                          const Vec& eps0, int tau,
                                                          long long budget = 1LL << 24) {
    if (eps0.size() != sys.dim()) throw ConfigError("prefix_term: eps0 dimension mismatch");
    const int nd = static_cast<int>(sys.delays.size());
    double paths = static_cast<double>(sys.words.size());
    for (int k = 0; k < tau; ++k) paths *= nd;
    if (paths > static_cast<double>(budget))
        throw BudgetError("prefix enumeration: |D|^(tau+d_max+1) exceeds the budget; lower tau");

    std::vector<double> per_k(static_cast<std::size_t>(tau) + 1, 0.0);
    per_k[0] = eps0.squaredNorm();
    double best_sum = per_k[0];
    if (tau == 0) return {best_sum, per_k};

    std::function<void(int, int, const Vec&, double)> dfs = [&](int word_idx, int k, const Vec& eps,
                                                                double acc) {
        const Vec next = sys.matrices[static_cast<std::size_t>(word_idx)] * eps;
        const double sq = next.squaredNorm();
        per_k[static_cast<std::size_t>(k + 1)] =
            std::max(per_k[static_cast<std::size_t>(k + 1)], sq);
        const double acc2 = acc + sq;
        if (k + 1 == tau) {
            best_sum = std::max(best_sum, acc2);
            return;
        }
        for (int j : sys.successors[static_cast<std::size_t>(word_idx)]) dfs(j, k + 1, next, acc2);
    };
    // the delay history before time zero is unobservable; enumerate all
    // initial words and take the worst case
    for (std::size_t i = 0; i < sys.words.size(); ++i)
        dfs(static_cast<int>(i), 0, eps0, per_k[0]);
    return {best_sum, per_k};
}

struct PolytopeTermResult {
    double value = 0.0;               // sum over k in (tau, eta]
    std::vector<double> per_k;        // alpha-weighted estimate for k = 0..eta
    std::vector<int> vertex_counts;   // pruned vertex count per step
};

// Propagate pruned symmetric vertex sets under the scaled lifted family and
// accumulate the weighted per-step maxima.
inline PolytopeTermResult polytope_term(const LiftedSet& lifted, const Vec& eps0, int tau, int eta,
                                        double alpha, bool strict_alpha_exponent = false,
                                        int vertex_cap = 2000, double prune_tol = 1e-9) {
    if (tau > eta) throw ConfigError("polytope_term: tau must not exceed eta");
    if (!(alpha > 0.0)) throw ConfigError("polytope_term: alpha must be positive");

    if (eps0.size() != lifted.block_dim)
        throw ConfigError("polytope_term: eps0 must have the block dimension");

    LiftedSet scaled = lifted;
    for (auto& m : scaled.matrices) m.block /= alpha;

    // every propagated vertex is supported in a single lifted block, so the
    // vertex sets are maintained per state and pruned blockwise
    const int ns = lifted.num_states();
    std::vector<SymPolytope> blocks(static_cast<std::size_t>(ns));
    for (int r = 0; r < ns; ++r) blocks[static_cast<std::size_t>(r)] = prune({eps0}, prune_tol);

    PolytopeTermResult res;
    const double exponent = strict_alpha_exponent ? 1.0 : 2.0;
    for (int k = 0; k <= eta; ++k) {
        double max_sq = 0.0;
        int total = 0;
        for (const SymPolytope& b : blocks) {
            for (const Vec& v : b.vertices) max_sq = std::max(max_sq, v.squaredNorm());
            total += static_cast<int>(b.vertices.size());
        }
        const double est = std::pow(alpha, exponent * k) * max_sq;
        res.per_k.push_back(est);
        res.vertex_counts.push_back(total);
        if (k > tau) res.value += est;
        if (k == eta || total == 0) break;

        std::vector<std::vector<Vec>> images(static_cast<std::size_t>(ns));
        for (const auto& m : scaled.matrices)
            for (const Vec& v : blocks[static_cast<std::size_t>(m.col_state)].vertices) {
                Vec w = m.block * v;
                if (w.norm() > 1e-14)
                    images[static_cast<std::size_t>(m.row_state)].push_back(std::move(w));
            }
        total = 0;
        for (int r = 0; r < ns; ++r) {
            auto& im = images[static_cast<std::size_t>(r)];
            blocks[static_cast<std::size_t>(r)] =
                im.empty() ? SymPolytope{lifted.block_dim, {}} : prune(std::move(im), prune_tol);
            total += static_cast<int>(blocks[static_cast<std::size_t>(r)].vertices.size());
        }
        if (total > vertex_cap)
            throw GeometryError("polytope propagation: vertex count exceeds the cap");
    }
    return res;
}

// Geometric tail beyond step eta: c^2 * rho^{2 eta + 2} / (1 - rho^2) * ||eps0||^2.
inline double tail_term(const EquivalenceConstant& c, double rho_upper, int eta,
                        const Vec& eps0) {
    if (rho_upper >= 1.0)
        throw UnstableError("tail: certified growth rate " + std::to_string(rho_upper) +
                            " is not below 1; the series diverges");
    return c.c * c.c * std::pow(rho_upper, 2.0 * eta + 2.0) / (1.0 - rho_upper * rho_upper) *
           eps0.squaredNorm();
}

// Full three-term bound on the worst-case L2 cost, normalized by 2*d_max+1.
inline BoundReport total_bound(const Plant& plant, const DelaySet& delays, const Gain& gain,
                               const Vec& e0, int tau, int eta, const BoundOptions& opts = {}) {
    if (tau > eta) throw ConfigError("total_bound: tau must not exceed eta");
    SwitchedErrorSystem sys = build_error_system(plant, delays, gain);
    LiftedSet lifted = lift(sys);

    Vec eps0 = Vec::Zero(sys.dim());
    eps0.head(sys.n) = e0;

    JsrEstimate est = jsr(lifted, opts.jsr);
    BoundReport rep;
    rep.tau = tau;
    rep.eta = eta;
    rep.rho_lower = est.lower;
    rep.rho_upper = est.upper;
    rep.certified = est.certified;
    if (est.upper >= 1.0)
        throw UnstableError("total_bound: growth-rate upper estimate " +
                            std::to_string(est.upper) + " is not below 1");
    if (!est.certified || !est.extremal)
        throw GeometryError("total_bound: growth rate could not be certified by a polytope norm");

    rep.equiv_c = est.extremal_blocks.empty()
                      ? equivalence_constant(*est.extremal, opts.dual_dim_cap).c
                      : equivalence_constant_blocks(est.extremal_blocks, opts.dual_dim_cap).c;
    rep.alpha = opts.alpha > 0.0 ? opts.alpha : est.lower / opts.beta;

    auto [prefix, per_k_exact] = prefix_term(sys, eps0, tau, opts.prefix_budget);
    PolytopeTermResult poly = polytope_term(lifted, eps0, tau, eta, rep.alpha,
                                            opts.strict_alpha_exponent, opts.vertex_cap,
                                            opts.prune_tol);
    rep.term_prefix = prefix;
    rep.term_polytope = poly.value;
    // the tail decays at the rate the invariant polytope certifies, which may
    // sit slightly above the tightest upper estimate
    const double tail_rate = est.cert_rate > 0.0 ? est.cert_rate : est.upper;
    rep.term_tail = tail_term(EquivalenceConstant{rep.equiv_c, 0, 0}, tail_rate, eta, eps0);
    rep.total = (rep.term_prefix + rep.term_polytope + rep.term_tail) /
                static_cast<double>(2 * sys.d_max + 1);

    for (int k = 0; k <= eta; ++k) {
        SeriesEntry entry;
        entry.k = k;
        if (k <= tau) {
            entry.exact_sq = per_k_exact[static_cast<std::size_t>(k)];
            entry.source = "exact";
        } else {
            entry.source = "polytope";
        }
        if (k < static_cast<int>(poly.per_k.size()))
            entry.polytope_sq = poly.per_k[static_cast<std::size_t>(k)];
        else
            entry.polytope_sq = 0.0;
        rep.series.push_back(std::move(entry));
    }
    rep.vertex_counts = poly.vertex_counts;
    return rep;
}

}  // namespace swdelay
