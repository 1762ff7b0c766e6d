#pragma once

#include <string>
#include <vector>

#include "ebt/betting.hpp"
#include "ebt/eprocess.hpp"
#include "ebt/kernels.hpp"

namespace ebt {

// Run-level drivers tying kernels, betting and wealth together.
//
// Standard backtests test H: R_t is at least the true conditional functional
// (one-sided, wealth grows on underestimation); two-sided runs add the mirror
// component. Comparative backtests run the score-gap e-process pair (M-, M+)
// for internal-vs-standard forecasts and classify the outcome into zones.

struct BacktestInput {
    std::vector<double> losses;
    std::vector<double> r;          // regulatory forecast per day
    std::vector<double> z;          // statistic forecast; empty for 1-dim functionals
};

struct StandardConfig {
    IdentificationKernel kernel;
    BettingConfig betting;
    RestartPolicy restart;
    std::vector<double> thresholds = {2.0, 5.0, 10.0, 20.0};
    bool two_sided = false;
};

struct StandardRunResult {
    std::vector<double> lambda;
    std::vector<double> payoff;  // realized e-factor minus one (lower component)
    std::vector<double> wealth;
    std::vector<int> segment;
    double sup = 1.0;
    std::vector<double> thresholds;
    std::vector<int> first_hit;   // per threshold, -1 if never
    std::vector<int> cross_count; // per threshold, segments that crossed
    int rejection_count = 0;      // AtRejection restarts
    std::vector<SegmentStats> segments;
};

StandardRunResult run_standard(const BacktestInput& in, const StandardConfig& cfg);

enum class Zone { Green, Red, Orange, Yellow };
std::string to_string(Zone z);

struct ZoneVerdict {
    Zone zone = Zone::Yellow;
    bool minus_rejected = false;
    bool plus_rejected = false;
    double sup_minus = 1.0;
    double sup_plus = 1.0;
    int tau_minus = -1; // first day M- >= 1/alpha, -1 if never
    int tau_plus = -1;
    // Weak dominance of the internal model: +1 dominates, -1 dominated, 0 tie.
    int magnitude = 0;
    int speed = 0;
};

// Pure classification from the four summary statistics. Red: only H- is
// rejected. Green: only H+. Orange: both, and sup M- strictly exceeds sup M+.
// Yellow: everything else, ties included.
ZoneVerdict classify_zone(double sup_minus, double sup_plus, int tau_minus,
                          int tau_plus, double threshold);

struct ComparativePair {
    std::vector<double> losses;
    std::vector<double> r, z;           // internal forecasts
    std::vector<double> r_star, z_star; // standard forecasts
};

struct ComparativeConfig {
    ScoringKernel kernel;
    BettingConfig betting{.fraction = 0.5};
    RestartPolicy restart;
    double alpha = 0.5; // rejection threshold 1/alpha drives the verdict
    std::vector<double> extra_thresholds;
};

struct ComparativeRunResult {
    std::vector<double> lambda_minus, lambda_plus;
    std::vector<double> gap; // realized score gap S(L, R) - S(L, R*) per day
    std::vector<double> wealth_minus, wealth_plus;
    std::vector<int> segment;
    double sup_minus = 1.0, sup_plus = 1.0;
    int tau_minus = -1, tau_plus = -1;
    ZoneVerdict verdict;
    std::vector<SegmentStats> segments_minus, segments_plus;
    // Filled when both processes share segment boundaries (fixed restarts).
    std::vector<ZoneVerdict> per_segment;
};

ComparativeRunResult run_comparative(const ComparativePair& in,
                                     const ComparativeConfig& cfg);

struct ModelForecasts {
    std::string name;
    std::vector<double> r, z;
};

struct HeatmapResult {
    std::vector<std::string> models;
    // grid[standard][internal]; the diagonal compares a model against itself.
    std::vector<std::vector<ZoneVerdict>> grid;
};

// All ordered pairs. Cells are independent; with parallel=true they are
// distributed over OpenMP threads, bit-identical to the serial path.
HeatmapResult heatmap(const std::vector<double>& losses,
                      const std::vector<ModelForecasts>& models,
                      const ComparativeConfig& cfg, bool parallel = true);

} // namespace ebt
