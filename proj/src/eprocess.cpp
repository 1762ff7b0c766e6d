#include "ebt/eprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ebt/errors.hpp"

namespace ebt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_lambda_unit(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw InvalidStep("standard backtest lambda " + std::to_string(lambda) +
                          " outside [0, 1]");
}

} // namespace

double step_standard(double m, double lambda, double v) {
    check_lambda_unit(lambda);
    if (!(m >= 0.0)) throw InvalidStep("wealth must be nonnegative");
    double factor = 1.0 + lambda * v;
    if (factor < 0.0)
        throw InvalidStep("wealth factor below zero; payoff " + std::to_string(v) +
                          " breaks the e-variable bound");
    return m * factor;
}

std::pair<double, double> step_two_sided(double prod_lower, double prod_upper,
                                         double lambda, double v_lower,
                                         double v_upper) {
    check_lambda_unit(lambda);
    double fa = 1.0 + lambda * v_lower;
    double fb = 1.0 - lambda * v_upper;
    if (fa < 0.0 || fb < 0.0)
        throw InvalidStep("two-sided wealth factor below zero");
    return {prod_lower * fa, prod_upper * fb};
}

EProcessRunner::EProcessRunner(RestartPolicy policy, std::vector<double> thresholds,
                               int components)
    : policy_(std::move(policy)), thresholds_(std::move(thresholds)) {
    if (components < 1) throw ConfigError("e-process needs at least one component");
    for (double thr : thresholds_)
        if (!(thr > 1.0)) throw ConfigError("rejection thresholds must exceed 1");
    for (std::size_t i = 1; i < policy_.times.size(); ++i)
        if (policy_.times[i] <= policy_.times[i - 1])
            throw ConfigError("restart times must be strictly increasing");
    if (!policy_.times.empty() && policy_.times.front() < 1)
        throw ConfigError("restart times are 1-based day indices");
    if (policy_.kind == RestartPolicy::Kind::AtRejection &&
        !(policy_.alpha > 0.0 && policy_.alpha < 1.0))
        throw ConfigError("restart-at-rejection needs alpha in (0, 1)");
    log_prod_.assign(components, 0.0);
    absorbed_.assign(components, false);
    seg_first_hit_.assign(thresholds_.size(), -1);
}

double EProcessRunner::wealth() const {
    double acc = 0.0;
    double w = 1.0 / double(log_prod_.size());
    for (std::size_t k = 0; k < log_prod_.size(); ++k)
        if (!absorbed_[k]) acc += w * std::exp(log_prod_[k]);
    return acc;
}

void EProcessRunner::step(double lambda, const std::vector<double>& payoffs) {
    if (finished_) throw InvalidStep("e-process already finished");
    if (payoffs.size() != log_prod_.size())
        throw InvalidStep("payoff count does not match component count");
    if (!(lambda >= 0.0)) throw InvalidStep("lambda must be nonnegative");
    ++t_;
    for (std::size_t k = 0; k < log_prod_.size(); ++k) {
        if (absorbed_[k]) continue;
        double factor = 1.0 + lambda * payoffs[k];
        if (factor < 0.0)
            throw InvalidStep("wealth factor below zero at day " + std::to_string(t_));
        if (factor == 0.0) {
            absorbed_[k] = true;
            log_prod_[k] = kNegInf;
        } else {
            log_prod_[k] += std::log1p(lambda * payoffs[k]);
        }
    }
    double m = wealth();
    seg_sup_ = std::max(seg_sup_, m);
    global_sup_ = std::max(global_sup_, m);
    for (std::size_t j = 0; j < thresholds_.size(); ++j)
        if (seg_first_hit_[j] < 0 && m >= thresholds_[j]) seg_first_hit_[j] = t_;
    if (tracing_)
        trace_.push_back({t_, lambda, payoffs.empty() ? 0.0 : payoffs[0], m, segment_});

    bool restart = false;
    if (policy_.kind == RestartPolicy::Kind::AtFixedTimes) {
        if (next_fixed_ < policy_.times.size() && t_ == policy_.times[next_fixed_]) {
            ++next_fixed_;
            restart = true;
        }
    } else if (policy_.kind == RestartPolicy::Kind::AtRejection) {
        if (m >= 1.0 / policy_.alpha) {
            ++rejections_;
            restart = true;
        }
    }
    if (restart) {
        close_segment();
        std::fill(log_prod_.begin(), log_prod_.end(), 0.0);
        std::fill(absorbed_.begin(), absorbed_.end(), false);
        ++segment_;
        seg_begin_ = t_ + 1;
        seg_sup_ = 1.0;
        std::fill(seg_first_hit_.begin(), seg_first_hit_.end(), -1);
        restart_flag_ = true;
    }
}

void EProcessRunner::step(double lambda, double payoff) {
    step(lambda, std::vector<double>{payoff});
}

void EProcessRunner::step2(double lambda, double v_lower, double v_upper) {
    step(lambda, std::vector<double>{v_lower, -v_upper});
}

bool EProcessRunner::take_restart() {
    bool out = restart_flag_;
    restart_flag_ = false;
    return out;
}

void EProcessRunner::close_segment() {
    SegmentStats s;
    s.begin = seg_begin_;
    s.end = t_;
    s.sup = seg_sup_;
    s.first_hit = seg_first_hit_;
    segments_.push_back(std::move(s));
}

void EProcessRunner::finish() {
    if (finished_) return;
    finished_ = true;
    // An empty trailing segment (restart fired on the last day) is not a
    // segment of its own.
    if (seg_begin_ <= t_ || segments_.empty()) close_segment();
}

const std::vector<SegmentStats>& EProcessRunner::segments() {
    finish();
    return segments_;
}

int EProcessRunner::threshold_index(double threshold) const {
    for (std::size_t j = 0; j < thresholds_.size(); ++j)
        if (thresholds_[j] == threshold) return int(j);
    throw ConfigError("threshold " + std::to_string(threshold) +
                      " was not registered with the e-process");
}

int EProcessRunner::first_hit(double threshold) {
    finish();
    int j = threshold_index(threshold);
    for (const auto& s : segments_)
        if (s.first_hit[j] >= 0) return s.first_hit[j];
    return -1;
}

int EProcessRunner::cross_count(double threshold) {
    finish();
    int j = threshold_index(threshold);
    int n = 0;
    for (const auto& s : segments_)
        if (s.first_hit[j] >= 0) ++n;
    return n;
}

} // namespace ebt
