#pragma once

#include "swdelay/types.hpp"

namespace swdelay::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterLimit };

struct Result {
    Status status = Status::IterLimit;
    double objective = 0.0;
    Vec x;
};

// Dense two-phase simplex with Bland's rule for
//   min c'x  s.t.  A x = b,  x >= 0.
// Sized for small problems: a handful of rows, up to a few hundred columns.
class SimplexSolver {
  public:
    explicit SimplexSolver(int max_iter = 50000, double tol = 1e-10)
        : max_iter_(max_iter), tol_(tol) {}

    Result solve(const Mat& a, const Vec& b, const Vec& c) const {
        const int m = static_cast<int>(a.rows());
        const int n = static_cast<int>(a.cols());
        if (b.size() != m || c.size() != n)
            throw ConfigError("lp: inconsistent problem dimensions");

        // tableau columns: n structural + m artificial + rhs
        Mat t(m, n + m + 1);
        t.leftCols(n) = a;
        t.block(0, n, m, m) = Mat::Identity(m, m);
        t.col(n + m) = b;
        for (int i = 0; i < m; ++i)
            if (t(i, n + m) < 0) t.row(i) = -t.row(i);

        std::vector<int> basis(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

        // phase 1: minimize the sum of artificials
        Vec cost1 = Vec::Zero(n + m);
        cost1.tail(m).setOnes();
        Status s = run(t, basis, cost1, n + m, m);
        if (s != Status::Optimal) return {s, 0.0, Vec()};
        double infeas = 0.0;
        for (int i = 0; i < m; ++i)
            if (basis[static_cast<std::size_t>(i)] >= n) infeas += t(i, n + m);
        if (infeas > feas_tol(b)) return {Status::Infeasible, infeas, Vec()};

        // drive remaining artificials out of the basis where possible
        for (int i = 0; i < m; ++i) {
            if (basis[static_cast<std::size_t>(i)] < n) continue;
            int enter = -1;
            for (int j = 0; j < n; ++j)
                if (std::abs(t(i, j)) > tol_) {
                    enter = j;
                    break;
                }
            if (enter >= 0) pivot(t, basis, i, enter);
            // otherwise the row is redundant; the artificial stays basic at zero
        }

        // phase 2: original objective, artificial columns barred from entering
        Vec cost2 = Vec::Zero(n + m);
        cost2.head(n) = c;
        s = run(t, basis, cost2, n, m);
        if (s != Status::Optimal) return {s, 0.0, Vec()};

        Vec x = Vec::Zero(n);
        double obj = 0.0;
        for (int i = 0; i < m; ++i) {
            const int j = basis[static_cast<std::size_t>(i)];
            if (j < n) {
                x(j) = t(i, n + m);
                obj += c(j) * t(i, n + m);
            }
        }
        return {Status::Optimal, obj, std::move(x)};
    }

  private:
    double feas_tol(const Vec& b) const {
        return 1e-7 * (1.0 + b.cwiseAbs().maxCoeff());
    }

    static void pivot(Mat& t, std::vector<int>& basis, int row, int col) {
        t.row(row) /= t(row, col);
        for (int i = 0; i < t.rows(); ++i) {
            if (i == row) continue;
            const double f = t(i, col);
            if (f != 0.0) t.row(i) -= f * t.row(row);
        }
        basis[static_cast<std::size_t>(row)] = col;
    }

    // Bland's rule: smallest eligible entering index, smallest basic leaving
    // index on ratio ties. `n_enter` bounds the columns allowed to enter.
    Status run(Mat& t, std::vector<int>& basis, const Vec& cost, int n_enter, int m) const {
        const int rhs = static_cast<int>(t.cols()) - 1;
        for (int iter = 0; iter < max_iter_; ++iter) {
            // reduced costs from the basic cost multipliers
            Vec y = Vec::Zero(m);
            for (int i = 0; i < m; ++i) y(i) = cost(basis[static_cast<std::size_t>(i)]);

            int enter = -1;
            for (int j = 0; j < n_enter; ++j) {
                const double rc = cost(j) - y.dot(t.col(j));
                if (rc < -tol_) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return Status::Optimal;

            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                if (t(i, enter) > tol_) {
                    const double ratio = t(i, rhs) / t(i, enter);
                    if (leave < 0 || ratio < best_ratio - tol_ ||
                        (std::abs(ratio - best_ratio) <= tol_ &&
                         basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]))
                    {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) return Status::Unbounded;
            pivot(t, basis, leave, enter);
        }
        return Status::IterLimit;
    }

    int max_iter_;
    double tol_;
};

inline Result solve(const Mat& a, const Vec& b, const Vec& c, int max_iter = 50000,
                    double tol = 1e-10) {
    return SimplexSolver(max_iter, tol).solve(a, b, c);
}

}  // namespace swdelay::lp
