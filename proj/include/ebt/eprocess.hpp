#pragma once

#include <utility>
#include <vector>

namespace ebt {

// Wealth processes for sequential backtests. Wealth is carried in log space
// (one log-product per mixture component) so thousand-step runs never see
// cumulative rounding; an exactly zero factor absorbs the component for good.
// Rejection anywhere uses the closed inequality M_t >= threshold.

struct RestartPolicy {
    enum class Kind { None, AtFixedTimes, AtRejection };
    Kind kind = Kind::None;

    // AtFixedTimes: wealth resets to 1 right after each listed day (1-based,
    // strictly increasing). Days past the end of the run never fire.
    std::vector<int> times;

    // AtRejection: reset right after any day with wealth >= 1/alpha.
    double alpha = 0.05;

    // Restarts also clear the betting history, so each segment is a
    // self-contained test. Disable to keep accumulating across segments.
    bool reset_betting = true;
};

// One-sided standard update M' = M (1 + lambda V); lambda in [0, 1].
double step_standard(double m, double lambda, double v);

// Two-sided component update: products a' = a (1 + lambda v_lower),
// b' = b (1 - lambda v_upper); the wealth is (a + b) / 2.
std::pair<double, double> step_two_sided(double prod_lower, double prod_upper,
                                         double lambda, double v_lower,
                                         double v_upper);

struct SegmentStats {
    int begin = 0; // first day of the segment (1-based, inclusive)
    int end = 0;   // last day (inclusive)
    double sup = 1.0;
    // First day wealth reached each registered threshold, -1 if never.
    std::vector<int> first_hit;
};

struct StepRecord {
    int t = 0;
    double lambda = 0.0;
    double payoff = 0.0; // first component's payoff
    double wealth = 1.0;
    int segment = 0;
};

class EProcessRunner {
  public:
    EProcessRunner(RestartPolicy policy, std::vector<double> thresholds,
                   int components = 1);

    // Advance one day. payoffs has one entry per component; the factor for
    // component k is 1 + lambda * payoffs[k]. Negative factors raise
    // InvalidStep, exact zeros absorb the component.
    void step(double lambda, const std::vector<double>& payoffs);
    void step(double lambda, double payoff);
    // Two-sided convenience: components (v_lower, -v_upper).
    void step2(double lambda, double v_lower, double v_upper);

    // True exactly once after a restart fired; callers clear betting history
    // when it returns true and the policy asks for it.
    bool take_restart();

    // Close the trailing segment. Idempotent; called automatically by the
    // segment and statistics accessors.
    void finish();

    double wealth() const;
    int day() const { return t_; }
    int segment_index() const { return segment_; }

    const std::vector<SegmentStats>& segments();
    double global_sup() const { return global_sup_; }
    int first_hit(double threshold);        // -1 if never reached
    int cross_count(double threshold);      // segments whose sup reached it
    int rejection_count() const { return rejections_; }

    const RestartPolicy& policy() const { return policy_; }

    void enable_trace() { tracing_ = true; }
    const std::vector<StepRecord>& trace() const { return trace_; }

  private:
    int threshold_index(double threshold) const;
    void close_segment();

    RestartPolicy policy_;
    std::vector<double> thresholds_;
    std::vector<double> log_prod_;
    std::vector<bool> absorbed_;
    int t_ = 0;
    int segment_ = 0;
    int seg_begin_ = 1;
    double seg_sup_ = 1.0;
    std::vector<int> seg_first_hit_;
    double global_sup_ = 1.0;
    int rejections_ = 0;
    std::size_t next_fixed_ = 0;
    bool restart_flag_ = false;
    bool finished_ = false;
    std::vector<SegmentStats> segments_;
    bool tracing_ = false;
    std::vector<StepRecord> trace_;
};

} // namespace ebt
