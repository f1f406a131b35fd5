#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "swdelay/lift.hpp"
#include "swdelay/polytope.hpp"
#include "swdelay/types.hpp"

namespace swdelay {

struct JsrOptions {
    int depth_start = 4;
    int depth_max = 8;
    double tol = 1e-8;
    int max_iter = 200;           // polytope sweeps per certification attempt
    long long product_budget = 2'000'000;
    double growth_cap = 1e6;      // vertex-norm blowup => candidate is not an s.m.p.
    int vertex_cap = 5000;
    // scaling inflation ladder tried when the exact extremal norm does not
    // close; a certificate at margin m proves rho <= rho_t * (1+m) * (1+tol)
    std::vector<double> margins = {0.0, 1e-3, 3e-3, 1e-2, 3e-2, 0.1};
};

struct JsrEstimate {
    double lower = 0.0;
    double upper = 0.0;
    // rate the invariant-polytope certificate actually proves: every matrix
    // has polytope operator norm <= cert_rate; may exceed `upper` when the
    // product bound is tighter than the certificate
    double cert_rate = 0.0;
    Word candidate_word;                   // matrix indices, first applied first
    std::optional<SymPolytope> extremal;   // full-dimension embedding
    std::vector<SymPolytope> extremal_blocks;  // one polytope per lifted state
    bool certified = false;
};

namespace detail {

// Running admissible product: block of the product plus its block position.
struct BlockProduct {
    int row = 0;
    int col = 0;
    Mat block;
};

inline long long count_products(const LiftedSet& set, int depth,
                                const std::vector<std::vector<int>>& succ) {
    std::vector<long long> cnt(set.matrices.size(), 1);
    long long total = static_cast<long long>(set.matrices.size());
    for (int len = 2; len <= depth; ++len) {
        std::vector<long long> next(set.matrices.size(), 0);
        for (std::size_t i = 0; i < set.matrices.size(); ++i)
            for (int j : succ[i]) next[static_cast<std::size_t>(j)] += cnt[i];
        long long level = 0;
        for (long long c : next) level += c;
        total += level;
        cnt = std::move(next);
        if (total < 0) return std::numeric_limits<long long>::max();
    }
    return total;
}

// Depth-first walk over all admissible products up to `depth`, invoking the
// visitor with (index word, product) at every node.
inline void enumerate_products(
    const LiftedSet& set, int depth, long long budget,
    const std::function<void(const Word&, const BlockProduct&)>& visit) {
    if (depth < 1) throw ConfigError("product enumeration: depth must be >= 1");

    // matrix j may left-multiply a product ending in row state r iff col(j) == r
    std::vector<std::vector<int>> succ(set.matrices.size());
    for (std::size_t i = 0; i < set.matrices.size(); ++i)
        for (std::size_t j = 0; j < set.matrices.size(); ++j)
            if (set.matrices[j].col_state == set.matrices[i].row_state)
                succ[i].push_back(static_cast<int>(j));

    const long long total = count_products(set, depth, succ);
    if (total > budget)
        throw BudgetError("product enumeration: " + std::to_string(total) +
                          " admissible products exceed the budget " + std::to_string(budget));

    Word word;
    std::function<void(int, const BlockProduct&)> dfs = [&](int last, const BlockProduct& prod) {
        visit(word, prod);
        if (static_cast<int>(word.size()) >= depth) return;
        for (int j : succ[static_cast<std::size_t>(last)]) {
            BlockProduct next;
            next.row = set.matrices[static_cast<std::size_t>(j)].row_state;
            next.col = prod.col;
            next.block = set.matrices[static_cast<std::size_t>(j)].block * prod.block;
            word.push_back(j);
            dfs(j, next);
            word.pop_back();
        }
    };
    for (std::size_t i = 0; i < set.matrices.size(); ++i) {
        BlockProduct prod{set.matrices[i].row_state, set.matrices[i].col_state,
                          set.matrices[i].block};
        word.push_back(static_cast<int>(i));
        dfs(static_cast<int>(i), prod);
        word.pop_back();
    }
}

inline Mat product_along(const LiftedSet& set, const Word& word) {
    Mat p = set.matrices[static_cast<std::size_t>(word.front())].block;
    int row = set.matrices[static_cast<std::size_t>(word.front())].row_state;
    for (std::size_t i = 1; i < word.size(); ++i) {
        const auto& m = set.matrices[static_cast<std::size_t>(word[i])];
        if (m.col_state != row) throw ConfigError("product_along: inadmissible word");
        p = m.block * p;
        row = m.row_state;
    }
    return p;
}

// Embed per-state block polytopes into the full lifted dimension.
inline SymPolytope embed_blocks(const std::vector<SymPolytope>& blocks, int block_dim) {
    SymPolytope full;
    full.dim = block_dim * static_cast<int>(blocks.size());
    for (std::size_t r = 0; r < blocks.size(); ++r)
        for (const Vec& v : blocks[r].vertices) {
            Vec x = Vec::Zero(full.dim);
            x.segment(static_cast<int>(r) * block_dim, block_dim) = v;
            full.vertices.push_back(std::move(x));
        }
    return full;
}

}  // namespace detail

// Lower bound: max averaged spectral radius over closed admissible products.
// Upper bound: min over lengths of the max product 2-norm, averaged.
inline std::pair<double, double> bounds_by_products(const LiftedSet& set, int depth,
                                                    long long budget = 2'000'000) {
    double lower = 0.0;
    std::vector<double> max_norm(static_cast<std::size_t>(depth) + 1, 0.0);
    detail::enumerate_products(set, depth, budget,
                               [&](const Word& word, const detail::BlockProduct& prod) {
                                   const int len = static_cast<int>(word.size());
                                   if (prod.row == prod.col) {
                                       const double sr = spectral_radius(prod.block);
                                       if (sr > 0.0)
                                           lower = std::max(lower, std::pow(sr, 1.0 / len));
                                   }
                                   max_norm[static_cast<std::size_t>(len)] = std::max(
                                       max_norm[static_cast<std::size_t>(len)],
                                       operator_norm2(prod.block));
                               });
    double upper = std::numeric_limits<double>::infinity();
    for (int len = 1; len <= depth; ++len)
        upper = std::min(upper, std::pow(max_norm[static_cast<std::size_t>(len)], 1.0 / len));
    if (!std::isfinite(upper)) upper = 0.0;
    return {lower, std::max(upper, lower)};
}

// Word maximizing the averaged spectral radius among closed admissible
// products; ties prefer shorter, then lexicographically smaller words.
inline Word find_smp_candidate(const LiftedSet& set, int depth, long long budget = 2'000'000) {
    Word best;
    double best_avg = -1.0;
    detail::enumerate_products(
        set, depth, budget, [&](const Word& word, const detail::BlockProduct& prod) {
            if (prod.row != prod.col) return;
            const double sr = spectral_radius(prod.block);
            if (sr <= 0.0) return;
            const double avg = std::pow(sr, 1.0 / static_cast<double>(word.size()));
            const bool better =
                avg > best_avg * (1.0 + 1e-12) ||
                (avg > best_avg * (1.0 - 1e-12) &&
                 (word.size() < best.size() || (word.size() == best.size() && word < best)));
            if (best.empty() || better) {
                best = word;
                best_avg = avg;
            }
        });
    if (best.empty())
        throw ConfigError("smp candidate: no nonzero closed product up to the given depth");
    return best;
}

// Build an invariant symmetric polytope for the set scaled by
// rho_t * (1 + margin), where rho_t is the candidate's averaged spectral
// radius. Convergence of a full sweep certifies the upper bound
// rho_t * (1 + margin) * (1 + tol). Vertices stay supported in single lifted
// blocks, so the polytope is maintained per state.
inline JsrEstimate extremal_polytope(const LiftedSet& set, const Word& candidate,
                                     double tol = 1e-8, int max_iter = 200,
                                     double growth_cap = 1e6, int vertex_cap = 5000,
                                     double margin = 0.0) {
    Mat pc = detail::product_along(set, candidate);
    const auto& first = set.matrices[static_cast<std::size_t>(candidate.front())];
    const auto& last = set.matrices[static_cast<std::size_t>(candidate.back())];
    if (last.row_state != first.col_state)
        throw ConfigError("extremal polytope: candidate word is not a closed product");
    const int home = first.col_state;
    const int ns = set.num_states();

    Eigen::EigenSolver<Mat> es(pc);
    int lead = 0;
    for (int i = 1; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(lead))) lead = i;
    const double sr = std::abs(es.eigenvalues()(lead));
    if (sr <= 0.0)
        throw ConfigError("extremal polytope: candidate product has zero spectral radius");
    const double rho_t = std::pow(sr, 1.0 / static_cast<double>(candidate.size()));
    const double rho_scale = rho_t * (1.0 + margin);

    LiftedSet scaled = set;
    for (auto& m : scaled.matrices) m.block /= rho_scale;

    // seed with the leading eigenvector, real and imaginary parts separately
    std::vector<std::vector<Vec>> verts(static_cast<std::size_t>(ns));
    {
        Eigen::VectorXcd ev = es.eigenvectors().col(lead);
        for (int part = 0; part < 2; ++part) {
            Vec b = part == 0 ? Vec(ev.real()) : Vec(ev.imag());
            if (b.norm() < 1e-12) continue;
            verts[static_cast<std::size_t>(home)].push_back(b / b.norm());
        }
    }
    std::vector<SymPolytope> blocks(static_cast<std::size_t>(ns));
    for (int r = 0; r < ns; ++r) {
        blocks[static_cast<std::size_t>(r)].dim = set.block_dim;
        if (!verts[static_cast<std::size_t>(r)].empty())
            blocks[static_cast<std::size_t>(r)] = prune(verts[static_cast<std::size_t>(r)], tol);
    }

    JsrEstimate est;
    est.candidate_word = candidate;
    est.lower = rho_t;
    est.upper = rho_scale * (1.0 + tol);
    est.cert_rate = est.upper;

    for (int sweep = 0; sweep < max_iter; ++sweep) {
        std::vector<std::vector<Vec>> added(static_cast<std::size_t>(ns));
        for (std::size_t k = 0; k < scaled.matrices.size(); ++k) {
            const auto& m = scaled.matrices[k];
            for (const Vec& v : blocks[static_cast<std::size_t>(m.col_state)].vertices) {
                Vec w = m.block * v;
                const double nw = w.norm();
                if (nw < 1e-14) continue;
                if (nw > growth_cap)
                    throw NotSmpError("extremal polytope: vertex growth exceeds the cap; "
                                      "candidate underestimates the growth rate");
                SymPolytope current = blocks[static_cast<std::size_t>(m.row_state)];
                for (const Vec& a : added[static_cast<std::size_t>(m.row_state)])
                    current.vertices.push_back(a);
                if (!contains(current, w, tol))
                    added[static_cast<std::size_t>(m.row_state)].push_back(std::move(w));
            }
        }
        bool any = false;
        int total = 0;
        for (int r = 0; r < ns; ++r) {
            auto& add_r = added[static_cast<std::size_t>(r)];
            if (!add_r.empty()) {
                any = true;
                std::vector<Vec> all = blocks[static_cast<std::size_t>(r)].vertices;
                for (Vec& a : add_r) all.push_back(std::move(a));
                blocks[static_cast<std::size_t>(r)] = prune(std::move(all), tol);
            }
            total += static_cast<int>(blocks[static_cast<std::size_t>(r)].vertices.size());
        }
        if (!any) {
            est.certified = true;
            est.extremal_blocks = blocks;
            est.extremal = detail::embed_blocks(blocks, set.block_dim);
            return est;
        }
        if (total > vertex_cap)
            throw GeometryError("extremal polytope: vertex count exceeds the cap");
    }
    throw NotSmpError("extremal polytope: no fixed point within the sweep limit");
}

// Norm-equivalence factor for a block-structured polytope. The unit ball is
// the symmetric hull of per-block polytopes, so the dual ball is their
// Cartesian product: R(P) = max_r R(P_r), R(P*)^2 = sum_r R(P_r*)^2.
inline EquivalenceConstant equivalence_constant_blocks(const std::vector<SymPolytope>& blocks,
                                                       int dim_cap = 8) {
    if (blocks.empty()) throw GeometryError("equivalence constant: no blocks");
    EquivalenceConstant ec;
    double dual_sq = 0.0;
    for (const SymPolytope& b : blocks) {
        EquivalenceConstant e = equivalence_constant(b, dim_cap);
        ec.r_primal = std::max(ec.r_primal, e.r_primal);
        dual_sq += e.r_dual * e.r_dual;
    }
    ec.r_dual = std::sqrt(dual_sq);
    ec.c = ec.r_primal * ec.r_dual;
    return ec;
}

// Full pipeline: product bounds, candidate selection, polytope certification
// with depth and margin escalation; falls back to the product bounds when no
// certificate closes.
inline JsrEstimate jsr(const LiftedSet& set, const JsrOptions& opts = {}) {
    JsrEstimate est;

    bool all_zero = true;
    for (const auto& m : set.matrices)
        if (m.block.cwiseAbs().maxCoeff() > 0.0) all_zero = false;
    if (all_zero) return est;  // lower = upper = 0

    // a single self-loop matrix: the growth rate is its spectral radius,
    // exactly; the polytope (when it closes) is attached for norm-equivalence
    // consumers only
    if (set.matrices.size() == 1 && set.matrices[0].row_state == set.matrices[0].col_state) {
        const double sr = spectral_radius(set.matrices[0].block);
        est.lower = est.upper = sr;
        est.certified = true;
        est.candidate_word = {0};
        if (sr > 0.0) {
            for (double margin : opts.margins) {
                try {
                    JsrEstimate cert = extremal_polytope(set, {0}, opts.tol, opts.max_iter,
                                                         opts.growth_cap, opts.vertex_cap, margin);
                    est.cert_rate = cert.cert_rate;
                    est.extremal = std::move(cert.extremal);
                    est.extremal_blocks = std::move(cert.extremal_blocks);
                    break;
                } catch (const NotSmpError&) {
                } catch (const GeometryError&) {
                }
            }
        }
        return est;
    }

    // product bounds at the deepest depth the budget allows
    int depth = opts.depth_max;
    std::pair<double, double> bounds{0.0, std::numeric_limits<double>::infinity()};
    while (depth >= 1) {
        try {
            bounds = bounds_by_products(set, depth, opts.product_budget);
            break;
        } catch (const BudgetError&) {
            if (depth == 1) throw;
            --depth;
        }
    }
    est.lower = bounds.first;
    est.upper = bounds.second;

    // a certificate cannot push the upper bound below the lower bound; when
    // the cycles already prove instability, certification is pointless
    if (est.lower >= 1.0) return est;

    std::vector<int> depths = {std::min(opts.depth_start, depth), depth};
    if (depths[1] == depths[0]) depths.pop_back();
    for (double margin : opts.margins) {
        for (int d : depths) {
            Word cand;
            try {
                cand = find_smp_candidate(set, d, opts.product_budget);
            } catch (const BudgetError&) {
                continue;
            }
            try {
                JsrEstimate cert =
                    extremal_polytope(set, cand, opts.tol, opts.max_iter, opts.growth_cap,
                                      opts.vertex_cap, margin);
                cert.lower = std::max(cert.lower, est.lower);
                cert.upper = std::min(cert.upper, est.upper);
                return cert;
            } catch (const NotSmpError&) {
                continue;
            } catch (const GeometryError&) {
                continue;
            }
        }
    }
    return est;  // uncertified product bounds
}

}  // namespace swdelay
