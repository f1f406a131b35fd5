#pragma once

#include <algorithm>
#include <functional>
#include <utility>

#include "swdelay/types.hpp"

namespace swdelay {

struct NelderMeadResult {
    Vec x;
    double fval = 0.0;
    int evaluations = 0;
    std::vector<std::pair<int, double>> history;  // (evaluation count, best so far)
};

// Downhill simplex with the standard coefficients: reflection 1, expansion 2,
// contraction 0.5, shrink 0.5. Stops when the simplex diameter falls below
// `diam_tol` or the evaluation budget runs out.
inline NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                                    double edge = 0.1, int max_evals = 500,
                                    double diam_tol = 1e-6) {
    const int n = static_cast<int>(x0.size());
    NelderMeadResult res;

    std::vector<Vec> pts(static_cast<std::size_t>(n) + 1, x0);
    for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)](i) += edge;
    std::vector<double> fv(pts.size());
    int evals = 0;
    auto eval = [&](const Vec& x) {
        ++evals;
        const double v = f(x);
        if (res.history.empty() || v < res.history.back().second)
            res.history.emplace_back(evals, v);
        return v;
    };
    for (std::size_t i = 0; i < pts.size(); ++i) fv[i] = eval(pts[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(pts.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<Vec> p2;
        std::vector<double> f2;
        for (std::size_t i : idx) {
            p2.push_back(pts[i]);
            f2.push_back(fv[i]);
        }
        pts = std::move(p2);
        fv = std::move(f2);
    };

    while (evals < max_evals) {
        order();
        double diam = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            diam = std::max(diam, (pts[i] - pts[0]).norm());
        if (diam < diam_tol) break;

        Vec centroid = Vec::Zero(n);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) centroid += pts[i];
        centroid /= static_cast<double>(n);

        const Vec& worst = pts.back();
        Vec xr = centroid + (centroid - worst);
        const double fr = eval(xr);
        if (fr < fv[0]) {
            Vec xe = centroid + 2.0 * (centroid - worst);
            const double fe = eval(xe);
            if (fe < fr) {
                pts.back() = xe;
                fv.back() = fe;
            } else {
                pts.back() = xr;
                fv.back() = fr;
            }
        } else if (fr < fv[fv.size() - 2]) {
            pts.back() = xr;
            fv.back() = fr;
        } else {
            Vec xc = centroid + 0.5 * ((fr < fv.back() ? xr : worst) - centroid);
            const double fc = eval(xc);
            if (fc < std::min(fr, fv.back())) {
                pts.back() = xc;
                fv.back() = fc;
            } else {
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    fv[i] = eval(pts[i]);
                    if (evals >= max_evals) break;
                }
            }
        }
    }
    order();
    res.x = pts[0];
    res.fval = fv[0];
    res.evaluations = evals;
    return res;
}

}  // namespace swdelay
