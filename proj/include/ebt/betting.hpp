#pragma once

#include <cstddef>
#include <map>
#include <vector>

namespace ebt {

// Betting-process selection. A day's wealth update multiplies by
// 1 + lambda_t * g_t where g_t is the payoff (e-factor minus one) and
// lambda_t is chosen from the payoff history strictly before t, so it stays
// predictable. Histories are re-evaluated at the latest forecasts by default;
// the cached variant freezes each day's payoff at its own forecast.

struct BettingConfig {
    enum class Scheme { Taylor, Exact };
    Scheme scheme = Scheme::Taylor;

    // Fraction c of the admissible cap gamma_t actually bet.
    double fraction = 1.0;

    // lambda_t = 0 for t <= warmup (t counts days from 1).
    int warmup = 1;

    // Evaluate historical payoffs at their own day's forecasts instead of the
    // latest ones. Cheaper, slightly different path.
    bool cached_payoffs = false;

    // Search bound for the exact maximizer when gamma_t is infinite.
    double search_upper = 1e3;
};

// Cap gamma_t from the infimum of the e-factor over the loss domain:
// no constraint (+inf) when the factor cannot drop below 1, else -1/(inf-1).
double gamma_bound(double inf_factor);

// Truncated first-order approximation of the log-wealth maximizer:
// clamp(sum(g) / sum(g^2), 0, cap).
double grel_taylor(const std::vector<double>& payoffs, double cap);

// Empirical log-wealth maximizer over lambda in [0, min(cap, search_upper)].
double grel_exact(const std::vector<double>& payoffs, double cap,
                  double search_upper = 1e3);

// Incremental running sums for the Taylor rule.
class TaylorAccumulator {
  public:
    void add(double g) {
        sum_ += g;
        sumsq_ += g * g;
        ++n_;
    }
    void reset() {
        sum_ = sumsq_ = 0.0;
        n_ = 0;
    }
    double lambda(double cap) const;
    std::size_t size() const { return n_; }

  private:
    double sum_ = 0.0;
    double sumsq_ = 0.0;
    std::size_t n_ = 0;
};

// Payoff histogram for the exact rule. Payoffs with few distinct values
// (indicator kernels under constant forecasts) collapse to a handful of bins,
// making the per-day maximization cheap.
class ExactAccumulator {
  public:
    void add(double g) {
        ++hist_[g];
        ++n_;
    }
    void reset() {
        hist_.clear();
        n_ = 0;
    }
    double lambda(double cap, double search_upper = 1e3) const;
    std::size_t size() const { return n_; }

  private:
    std::map<double, std::size_t> hist_;
    std::size_t n_ = 0;
};

} // namespace ebt
