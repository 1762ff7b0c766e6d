#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace ebt {

// Derivative-free simplex minimizer (Nelder-Mead with the standard
// reflection/expansion/contraction/shrink coefficients). Objectives may return
// +inf outside their feasible region; the simplex backs away on its own.

struct NelderMeadResult {
    std::vector<double> x;
    double fval = 0.0;
    int evals = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    double ftol = 1e-8;       // stop when the simplex f-spread falls below this
    double xtol = 1e-9;       // and its edge lengths fall below this
    int max_evals = 20000;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0,
                                    const std::vector<double>& step,
                                    const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    NelderMeadResult res;
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(pts[i]);

    auto order = [&]() {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> p2;
        std::vector<double> f2;
        p2.reserve(n + 1);
        f2.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            p2.push_back(pts[idx[i]]);
            f2.push_back(fv[idx[i]]);
        }
        pts.swap(p2);
        fv.swap(f2);
    };

    while (evals < opt.max_evals) {
        order();

        double spread = fv[n] - fv[0];
        double width = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 1; j <= n; ++j)
                width = std::max(width, std::fabs(pts[j][i] - pts[0][i]));
        if (std::isfinite(fv[0]) && spread < opt.ftol && width < opt.xtol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[j][i] / double(n);

        auto blend = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = centroid[i] + t * (pts[n][i] - centroid[i]);
            return x;
        };

        std::vector<double> xr = blend(-1.0);
        double fr = eval(xr);
        if (fr < fv[0]) {
            std::vector<double> xe = blend(-2.0);
            double fe = eval(xe);
            if (fe < fr) {
                pts[n] = xe;
                fv[n] = fe;
            } else {
                pts[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
        } else {
            bool outside = fr < fv[n];
            std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            double fc = eval(xc);
            if (fc < std::min(fr, fv[n])) {
                pts[n] = xc;
                fv[n] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t j = 1; j <= n; ++j) {
                    for (std::size_t i = 0; i < n; ++i)
                        pts[j][i] = pts[0][i] + 0.5 * (pts[j][i] - pts[0][i]);
                    fv[j] = eval(pts[j]);
                }
            }
        }
    }
    order();
    res.x = pts[0];
    res.fval = fv[0];
    res.evals = evals;
    return res;
}

} // namespace ebt
