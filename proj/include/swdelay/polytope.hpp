#pragma once

#include <algorithm>
#include <iterator>
#include <optional>

#include "swdelay/linprog.hpp"
#include "swdelay/types.hpp"

namespace swdelay {

// Centrally symmetric polytope in V-representation: the convex hull of
// {+v, -v} over the stored vertices (one representative per antipodal pair).
struct SymPolytope {
    int dim = 0;
    std::vector<Vec> vertices;

    bool full_dimensional(double tol = 1e-10) const {
        if (vertices.empty()) return false;
        Mat v(static_cast<int>(vertices.size()), dim);
        for (std::size_t i = 0; i < vertices.size(); ++i) v.row(static_cast<int>(i)) = vertices[i];
        Eigen::FullPivLU<Mat> lu(v);
        lu.setThreshold(tol);
        return lu.rank() == dim;
    }
};

struct EquivalenceConstant {
    double c = 0.0;
    double r_primal = 0.0;  // circumradius of P
    double r_dual = 0.0;    // circumradius of the polar dual
};

namespace detail {

// Minkowski gauge of x w.r.t. conv(±vertices), or nullopt when x is outside
// the span of the vertices. Solved as min sum(lambda) with
// [V, -V] lambda = x, lambda >= 0.
inline std::optional<double> gauge(const SymPolytope& p, const Vec& x, int max_iter = 50000) {
    if (x.size() != p.dim) throw ConfigError("polytope: dimension mismatch");
    const double scale = x.norm();
    if (scale == 0.0) return 0.0;
    if (p.vertices.empty()) return std::nullopt;

    const int nv = static_cast<int>(p.vertices.size());
    Mat a(p.dim, 2 * nv);
    for (int j = 0; j < nv; ++j) {
        a.col(j) = p.vertices[static_cast<std::size_t>(j)];
        a.col(nv + j) = -p.vertices[static_cast<std::size_t>(j)];
    }
    const Vec b = x / scale;
    const Vec c = Vec::Ones(2 * nv);
    lp::Result r = lp::solve(a, b, c, max_iter);
    if (r.status == lp::Status::Infeasible) return std::nullopt;
    if (r.status != lp::Status::Optimal)
        throw LpFailureError("polytope gauge: LP did not terminate");
    return r.objective * scale;
}

}  // namespace detail

// Membership test x in (1+tol) * conv(±vertices), as a pure linear
// feasibility problem: V lp - V lm = x, sum(lp+lm) + s = 1+tol, all >= 0.
inline bool contains(const SymPolytope& p, const Vec& x, double tol) {
    if (x.size() != p.dim) throw ConfigError("polytope: dimension mismatch");
    const double scale = x.norm();
    if (scale == 0.0) return true;
    if (p.vertices.empty()) return false;

    const int nv = static_cast<int>(p.vertices.size());
    const int d = p.dim;
    Mat a = Mat::Zero(d + 1, 2 * nv + 1);
    for (int j = 0; j < nv; ++j) {
        a.col(j).head(d) = p.vertices[static_cast<std::size_t>(j)];
        a.col(nv + j).head(d) = -p.vertices[static_cast<std::size_t>(j)];
        a(d, j) = 1.0;
        a(d, nv + j) = 1.0;
    }
    a(d, 2 * nv) = 1.0;  // slack on the budget row
    Vec b = Vec::Zero(d + 1);
    b.head(d) = x;
    b(d) = 1.0 + tol;
    lp::Result r = lp::solve(a, b, Vec::Zero(2 * nv + 1));
    if (r.status == lp::Status::IterLimit)
        throw LpFailureError("polytope membership: LP did not terminate");
    return r.status == lp::Status::Optimal;
}

// Minkowski gauge min{ t >= 0 : x in t*P }.
inline double polytope_norm(const SymPolytope& p, const Vec& x) {
    auto g = detail::gauge(p, x);
    if (!g)
        throw GeometryError("polytope norm: point outside the span of a degenerate polytope");
    return *g;
}

// Operator norm induced by the polytope gauge: max over vertices v of the
// gauge of a*v.
inline double polytope_operator_norm(const SymPolytope& p, const Mat& a) {
    double best = 0.0;
    for (const Vec& v : p.vertices) best = std::max(best, polytope_norm(p, a * v));
    return best;
}

// Minimal symmetric vertex representation: drops duplicates (up to sign) and
// any point inside the symmetric hull of the others.
inline SymPolytope prune(std::vector<Vec> vertices, double tol = 1e-9) {
    if (vertices.empty()) throw ConfigError("prune: empty vertex list");
    SymPolytope p;
    p.dim = static_cast<int>(vertices.front().size());

    // dedupe antipodal/coincident points first
    std::vector<Vec> unique;
    for (const Vec& v : vertices) {
        if (static_cast<int>(v.size()) != p.dim) throw ConfigError("prune: dimension mismatch");
        bool dup = false;
        for (const Vec& u : unique) {
            const double s = tol * (1.0 + u.norm());
            if ((u - v).norm() < s || (u + v).norm() < s) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(v);
    }

    std::vector<bool> keep(unique.size(), true);
    for (std::size_t i = 0; i < unique.size(); ++i) {
        SymPolytope rest;
        rest.dim = p.dim;
        for (std::size_t j = 0; j < unique.size(); ++j)
            if (j != i && keep[j]) rest.vertices.push_back(unique[j]);
        if (!rest.vertices.empty() && contains(rest, unique[i], tol)) keep[i] = false;
    }
    for (std::size_t i = 0; i < unique.size(); ++i)
        if (keep[i]) p.vertices.push_back(unique[i]);
    return p;
}

namespace detail {

// Double-description step bookkeeping: vertex of the intermediate dual
// polytope plus the indices of its active constraints.
struct DualVertex {
    Vec y;
    std::vector<int> active;
};

inline std::vector<int> intersect_sorted(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline int normals_rank(const std::vector<Vec>& normals, const std::vector<int>& idx,
                        double tol) {
    if (idx.empty()) return 0;
    Mat m(static_cast<int>(idx.size()), normals.front().size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        m.row(static_cast<int>(i)) = normals[static_cast<std::size_t>(idx[i])];
    Eigen::FullPivLU<Mat> lu(m);
    lu.setThreshold(tol);
    return static_cast<int>(lu.rank());
}

}  // namespace detail

// Polar dual P* = { y : |<v,y>| <= 1 for all vertices v }, returned in vertex
// representation. Incremental double description over the halfspace list,
// with the algebraic adjacency test; exact up to the pivot tolerance.
inline SymPolytope dual_vertices(const SymPolytope& p, int dim_cap = 8, double tol = 1e-9) {
    const int d = p.dim;
    if (d > dim_cap)
        throw GeometryError("dual enumeration: dimension " + std::to_string(d) +
                            " exceeds the cap " + std::to_string(dim_cap));
    if (!p.full_dimensional())
        throw GeometryError("dual enumeration: polytope is not full-dimensional");

    // constraint normals, both signs per stored vertex
    std::vector<Vec> normals;

    // seed with d independent vertices -> a parallelotope with 2^d corners
    std::vector<int> seed;
    {
        Mat basis(d, d);
        int have = 0;
        for (std::size_t i = 0; i < p.vertices.size() && have < d; ++i) {
            basis.row(have) = p.vertices[i];
            Eigen::FullPivLU<Mat> lu(basis.topRows(have + 1));
            lu.setThreshold(1e-12);
            if (lu.rank() == have + 1) {
                seed.push_back(static_cast<int>(i));
                ++have;
            }
        }
        Mat m(d, d);
        for (int i = 0; i < d; ++i) {
            m.row(i) = p.vertices[static_cast<std::size_t>(seed[static_cast<std::size_t>(i)])];
            normals.push_back(m.row(i));
            normals.push_back(-m.row(i));
        }
        Eigen::PartialPivLU<Mat> lu(m);
        std::vector<detail::DualVertex> verts;
        for (int mask = 0; mask < (1 << d); ++mask) {
            Vec s(d);
            std::vector<int> active(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) {
                const bool plus = (mask >> i) & 1;
                s(i) = plus ? 1.0 : -1.0;
                active[static_cast<std::size_t>(i)] = 2 * i + (plus ? 0 : 1);
            }
            std::sort(active.begin(), active.end());
            verts.push_back({lu.solve(s), std::move(active)});
        }

        // insert the remaining constraints one at a time
        std::vector<int> rest;
        for (std::size_t i = 0; i < p.vertices.size(); ++i)
            if (std::find(seed.begin(), seed.end(), static_cast<int>(i)) == seed.end())
                rest.push_back(static_cast<int>(i));
        std::sort(rest.begin(), rest.end(), [&](int a, int b) {
            return p.vertices[static_cast<std::size_t>(a)].norm() >
                   p.vertices[static_cast<std::size_t>(b)].norm();
        });

        for (int vi : rest) {
            for (int sign = 0; sign < 2; ++sign) {
                const Vec normal = sign == 0 ? Vec(p.vertices[static_cast<std::size_t>(vi)])
                                             : Vec(-p.vertices[static_cast<std::size_t>(vi)]);
                const int cid = static_cast<int>(normals.size());
                normals.push_back(normal);

                std::vector<int> inside, on, outside;
                for (std::size_t k = 0; k < verts.size(); ++k) {
                    const double val = normal.dot(verts[k].y);
                    const double eps = tol * (1.0 + std::abs(val));
                    if (val > 1.0 + eps)
                        outside.push_back(static_cast<int>(k));
                    else if (val > 1.0 - eps)
                        on.push_back(static_cast<int>(k));
                    else
                        inside.push_back(static_cast<int>(k));
                }
                if (outside.empty()) {
                    for (int k : on) {
                        verts[static_cast<std::size_t>(k)].active.push_back(cid);
                        std::sort(verts[static_cast<std::size_t>(k)].active.begin(),
                                  verts[static_cast<std::size_t>(k)].active.end());
                    }
                    continue;
                }

                std::vector<detail::DualVertex> next;
                for (int k : inside) next.push_back(verts[static_cast<std::size_t>(k)]);
                for (int k : on) {
                    detail::DualVertex v = verts[static_cast<std::size_t>(k)];
                    v.active.push_back(cid);
                    std::sort(v.active.begin(), v.active.end());
                    next.push_back(std::move(v));
                }
                for (int ki : inside) {
                    for (int ko : outside) {
                        const auto& vin = verts[static_cast<std::size_t>(ki)];
                        const auto& vout = verts[static_cast<std::size_t>(ko)];
                        auto common = detail::intersect_sorted(vin.active, vout.active);
                        if (static_cast<int>(common.size()) < d - 1) continue;
                        if (detail::normals_rank(normals, common, 1e-10) < d - 1) continue;
                        const double a_in = normal.dot(vin.y);
                        const double a_out = normal.dot(vout.y);
                        const double t = (1.0 - a_in) / (a_out - a_in);
                        Vec w = vin.y + t * (vout.y - vin.y);
                        bool dup = false;
                        for (const auto& nv : next)
                            if ((nv.y - w).norm() < tol * (1.0 + w.norm())) {
                                dup = true;
                                break;
                            }
                        if (dup) continue;
                        // recompute the full active set against processed constraints
                        std::vector<int> active;
                        for (int j = 0; j <= cid; ++j) {
                            const double val = normals[static_cast<std::size_t>(j)].dot(w);
                            if (std::abs(val - 1.0) <= tol * (1.0 + std::abs(val)))
                                active.push_back(j);
                        }
                        next.push_back({std::move(w), std::move(active)});
                    }
                }
                verts = std::move(next);
                if (verts.empty())
                    throw GeometryError("dual enumeration: vertex set collapsed (inconsistent input)");
            }
        }

        // collapse antipodal pairs into the symmetric representation
        SymPolytope dual;
        dual.dim = d;
        for (const auto& v : verts) {
            Vec y = v.y;
            for (int i = 0; i < d; ++i) {
                if (std::abs(y(i)) > tol * (1.0 + y.norm())) {
                    if (y(i) < 0) y = -y;
                    break;
                }
            }
            bool dup = false;
            for (const Vec& u : dual.vertices)
                if ((u - y).norm() < tol * (1.0 + y.norm())) {
                    dup = true;
                    break;
                }
            if (!dup) dual.vertices.push_back(std::move(y));
        }
        return dual;
    }
}

// Norm-equivalence factor between the 2-norm and the polytope operator norm:
// ||A||_2 <= c * ||A||_P with c = R(P) * R(P*).
inline EquivalenceConstant equivalence_constant(const SymPolytope& p, int dim_cap = 8) {
    EquivalenceConstant ec;
    for (const Vec& v : p.vertices) ec.r_primal = std::max(ec.r_primal, v.norm());
    SymPolytope dual = dual_vertices(p, dim_cap);
    for (const Vec& y : dual.vertices) ec.r_dual = std::max(ec.r_dual, y.norm());
    ec.c = ec.r_primal * ec.r_dual;
    return ec;
}

}  // namespace swdelay
