#include "ebt/betting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ebt/errors.hpp"

namespace ebt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mean log-wealth over the histogram; -1e300 once a factor hits zero or below
// so the golden-section search backs off the boundary.
double mean_log_wealth(const std::map<double, std::size_t>& hist, double lambda) {
    double acc = 0.0;
    for (const auto& [g, count] : hist) {
        double factor = 1.0 + lambda * g;
        if (factor <= 0.0) return -1e300;
        acc += double(count) * std::log1p(lambda * g);
    }
    return acc;
}

double golden_max(const std::map<double, std::size_t>& hist, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = mean_log_wealth(hist, x1);
    double f2 = mean_log_wealth(hist, x2);
    for (int it = 0; it < 120 && b - a > 1e-12 * (1.0 + b); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = mean_log_wealth(hist, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = mean_log_wealth(hist, x1);
        }
    }
    double mid = 0.5 * (a + b);
    // Never return a maximizer worse than not betting at all.
    if (mean_log_wealth(hist, mid) < 0.0) return 0.0;
    return mid;
}

} // namespace

double gamma_bound(double inf_factor) {
    if (inf_factor >= 1.0) return kInf;
    return -1.0 / (inf_factor - 1.0);
}

double TaylorAccumulator::lambda(double cap) const {
    if (n_ == 0 || !(cap > 0.0)) return 0.0;
    if (sum_ <= 0.0) return 0.0;
    if (sumsq_ <= 0.0) return 0.0;
    return std::min(sum_ / sumsq_, cap);
}

double ExactAccumulator::lambda(double cap, double search_upper) const {
    if (n_ == 0 || !(cap > 0.0)) return 0.0;
    double upper = std::min(cap, search_upper);
    if (!(upper > 0.0)) return 0.0;
    if (!std::isfinite(upper)) upper = search_upper;
    return golden_max(hist_, 0.0, upper);
}

double grel_taylor(const std::vector<double>& payoffs, double cap) {
    TaylorAccumulator acc;
    for (double g : payoffs) acc.add(g);
    return acc.lambda(cap);
}

double grel_exact(const std::vector<double>& payoffs, double cap, double search_upper) {
    ExactAccumulator acc;
    for (double g : payoffs) acc.add(g);
    return acc.lambda(cap, search_upper);
}

} // namespace ebt
