#include "ebt/backtests.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ebt/errors.hpp"

namespace ebt {

namespace {

// ---- validation helpers ----

void check_betting(const BettingConfig& b) {
    if (!(b.fraction > 0.0 && b.fraction <= 1.0))
        throw ConfigError("betting fraction must lie in (0, 1], got " +
                          std::to_string(b.fraction));
    if (b.warmup < 0) throw ConfigError("betting warmup must be nonnegative");
    if (!(b.search_upper > 0.0))
        throw ConfigError("betting search upper bound must be positive");
}

void check_series(const char* name, std::size_t got, std::size_t want) {
    if (got != want)
        throw AlignmentError(std::string(name) + " has " + std::to_string(got) +
                             " rows, loss series has " + std::to_string(want));
}

// One GREL selector hiding the Taylor/exact switch. History payoffs are fed
// through add(); lambda() solves for the bet under the current cap.
class GrelAccumulator {
  public:
    explicit GrelAccumulator(const BettingConfig& b)
        : exact_(b.scheme == BettingConfig::Scheme::Exact),
          search_upper_(b.search_upper) {}

    void add(double g) {
        if (exact_)
            exact_acc_.add(g);
        else
            taylor_acc_.add(g);
    }
    void reset() {
        if (exact_)
            exact_acc_.reset();
        else
            taylor_acc_.reset();
    }
    double lambda(double cap) const {
        return exact_ ? exact_acc_.lambda(cap, search_upper_)
                      : taylor_acc_.lambda(cap);
    }

  private:
    bool exact_;
    double search_upper_;
    TaylorAccumulator taylor_acc_;
    ExactAccumulator exact_acc_;
};

} // namespace

// ---- standard backtest ----

StandardRunResult run_standard(const BacktestInput& in, const StandardConfig& cfg) {
    const IdentificationKernel& k = cfg.kernel;
    if (in.losses.empty()) throw DataError("empty loss series");
    check_series("forecast series r", in.r.size(), in.losses.size());
    const bool dim2 = functional_dim(k.functional) == 2;
    if (dim2)
        check_series("forecast series z", in.z.size(), in.losses.size());
    else if (!in.z.empty())
        check_series("forecast series z", in.z.size(), in.losses.size());
    check_betting(cfg.betting);
    if (cfg.two_sided && !supports_two_sided(k))
        throw ConfigError("two-sided run needs payoffs bounded on both sides "
                          "(var, or bounded-form mean/expectile)");

    const std::size_t T = in.losses.size();
    EProcessRunner runner(cfg.restart, cfg.thresholds, cfg.two_sided ? 2 : 1);
    runner.enable_trace();
    GrelAccumulator acc(cfg.betting);

    // Betting history: losses since hist_start, re-priced at the latest
    // forecasts. A forecast change forces a rebuild; a betting reset after a
    // restart advances hist_start so old days drop out of every rebuild.
    std::size_t hist_start = 0;
    double prev_r = 0.0, prev_z = 0.0;
    bool have_prev = false;

    for (std::size_t i = 0; i < T; ++i) {
        const int t = static_cast<int>(i) + 1;
        const double rt = in.r[i];
        const double zt = dim2 ? in.z[i] : kNoForecast;

        if (runner.take_restart() && cfg.restart.reset_betting) {
            acc.reset();
            hist_start = i;
            have_prev = false;
        }

        if (!cfg.betting.cached_payoffs) {
            const bool changed =
                !have_prev || rt != prev_r || (dim2 && zt != prev_z);
            if (changed) {
                acc.reset();
                for (std::size_t s = hist_start; s < i; ++s)
                    acc.add(standard_payoff(k, in.losses[s], rt, zt));
            } else if (i > hist_start) {
                acc.add(standard_payoff(k, in.losses[i - 1], rt, zt));
            }
        }

        const double gamma = h_bound(standard_payoff_infimum(k, rt, zt));
        const double cap = std::min(cfg.betting.fraction * gamma, 1.0);
        const double lam = t <= cfg.betting.warmup ? 0.0 : acc.lambda(cap);

        if (cfg.two_sided) {
            const TwoSidedPayoff p = two_sided_payoff(k, in.losses[i], rt);
            runner.step2(lam, p.lower, p.upper);
            if (cfg.betting.cached_payoffs) acc.add(p.lower);
        } else {
            const double g = standard_payoff(k, in.losses[i], rt, zt);
            runner.step(lam, g);
            if (cfg.betting.cached_payoffs) acc.add(g);
        }

        prev_r = rt;
        prev_z = zt;
        have_prev = true;
    }
    runner.finish();

    StandardRunResult out;
    out.lambda.resize(T);
    out.payoff.resize(T);
    out.wealth.resize(T);
    out.segment.resize(T);
    const std::vector<StepRecord>& tr = runner.trace();
    for (std::size_t i = 0; i < T; ++i) {
        out.lambda[i] = tr[i].lambda;
        out.payoff[i] = tr[i].payoff;
        out.wealth[i] = tr[i].wealth;
        out.segment[i] = tr[i].segment;
    }
    out.sup = runner.global_sup();
    out.thresholds = cfg.thresholds;
    for (double thr : cfg.thresholds) {
        out.first_hit.push_back(runner.first_hit(thr));
        out.cross_count.push_back(runner.cross_count(thr));
    }
    out.rejection_count = runner.rejection_count();
    out.segments = runner.segments();
    return out;
}

// ---- zone classification ----

std::string to_string(Zone z) {
    switch (z) {
        case Zone::Green: return "green";
        case Zone::Red: return "red";
        case Zone::Orange: return "orange";
        case Zone::Yellow: return "yellow";
    }
    return "yellow";
}

ZoneVerdict classify_zone(double sup_minus, double sup_plus, int tau_minus,
                          int tau_plus, double threshold) {
    if (!(threshold > 1.0))
        throw ConfigError("rejection threshold must exceed 1");
    ZoneVerdict v;
    v.sup_minus = sup_minus;
    v.sup_plus = sup_plus;
    v.tau_minus = tau_minus;
    v.tau_plus = tau_plus;
    v.minus_rejected = sup_minus >= threshold;
    v.plus_rejected = sup_plus >= threshold;
    if (v.minus_rejected && !v.plus_rejected)
        v.zone = Zone::Red;
    else if (v.plus_rejected && !v.minus_rejected)
        v.zone = Zone::Green;
    else if (v.minus_rejected && v.plus_rejected)
        v.zone = sup_minus > sup_plus ? Zone::Orange : Zone::Yellow;
    else
        v.zone = Zone::Yellow;

    if (sup_minus < sup_plus)
        v.magnitude = 1;
    else if (sup_minus > sup_plus)
        v.magnitude = -1;

    // A later (or never) hit against the internal model means it dominates.
    const auto eff = [](int tau) {
        return tau < 0 ? std::numeric_limits<int>::max() : tau;
    };
    if (eff(tau_minus) > eff(tau_plus))
        v.speed = 1;
    else if (eff(tau_minus) < eff(tau_plus))
        v.speed = -1;
    return v;
}

// ---- comparative backtest ----

ComparativeRunResult run_comparative(const ComparativePair& in,
                                     const ComparativeConfig& cfg) {
    const ScoringKernel& k = cfg.kernel;
    validate(k);
    if (in.losses.empty()) throw DataError("empty loss series");
    const std::size_t T = in.losses.size();
    check_series("internal forecast series r", in.r.size(), T);
    check_series("standard forecast series r*", in.r_star.size(), T);
    const bool dim2 = functional_dim(k.functional) == 2;
    if (dim2) {
        check_series("internal forecast series z", in.z.size(), T);
        check_series("standard forecast series z*", in.z_star.size(), T);
    } else {
        if (!in.z.empty()) check_series("internal forecast series z", in.z.size(), T);
        if (!in.z_star.empty())
            check_series("standard forecast series z*", in.z_star.size(), T);
    }
    check_betting(cfg.betting);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw ConfigError("alpha must lie in (0, 1)");

    const double thr0 = 1.0 / cfg.alpha;
    std::vector<double> thresholds{thr0};
    for (double e : cfg.extra_thresholds)
        if (std::find(thresholds.begin(), thresholds.end(), e) == thresholds.end())
            thresholds.push_back(e);

    EProcessRunner run_minus(cfg.restart, thresholds, 1);
    EProcessRunner run_plus(cfg.restart, thresholds, 1);
    run_minus.enable_trace();
    run_plus.enable_trace();
    GrelAccumulator acc_minus(cfg.betting);
    GrelAccumulator acc_plus(cfg.betting);

    const auto gap_at = [&](double x, double rt, double zt, double rst,
                            double zst) {
        return eval_score(k, x, rt, zt) - eval_score(k, x, rst, zst);
    };

    ComparativeRunResult out;
    out.gap.resize(T);

    std::size_t hist_minus = 0, hist_plus = 0;
    double prev[4] = {0.0, 0.0, 0.0, 0.0};
    bool have_prev = false;

    for (std::size_t i = 0; i < T; ++i) {
        const int t = static_cast<int>(i) + 1;
        const double rt = in.r[i];
        const double zt = dim2 ? in.z[i] : kNoForecast;
        const double rst = in.r_star[i];
        const double zst = dim2 ? in.z_star[i] : kNoForecast;

        // With AtRejection restarts the two sides can reset independently.
        if (run_minus.take_restart() && cfg.restart.reset_betting) {
            acc_minus.reset();
            hist_minus = i;
            have_prev = false;
        }
        if (run_plus.take_restart() && cfg.restart.reset_betting) {
            acc_plus.reset();
            hist_plus = i;
            have_prev = false;
        }

        if (!cfg.betting.cached_payoffs) {
            const bool changed = !have_prev || rt != prev[0] || rst != prev[2] ||
                                 (dim2 && (zt != prev[1] || zst != prev[3]));
            if (changed) {
                acc_minus.reset();
                acc_plus.reset();
                const std::size_t lo = std::min(hist_minus, hist_plus);
                for (std::size_t s = lo; s < i; ++s) {
                    const double g = gap_at(in.losses[s], rt, zt, rst, zst);
                    if (s >= hist_minus) acc_minus.add(g);
                    if (s >= hist_plus) acc_plus.add(-g);
                }
            } else if (i > 0 && (i - 1 >= hist_minus || i - 1 >= hist_plus)) {
                const double g = gap_at(in.losses[i - 1], rt, zt, rst, zst);
                if (i - 1 >= hist_minus) acc_minus.add(g);
                if (i - 1 >= hist_plus) acc_plus.add(-g);
            }
        }

        // Caps c * gamma in each direction; comparative bets may exceed 1.
        const double cap_minus =
            cfg.betting.fraction * h_bound(score_gap_infimum(k, rt, zt, rst, zst));
        const double cap_plus =
            cfg.betting.fraction * h_bound(score_gap_infimum(k, rst, zst, rt, zt));
        const bool warm = t <= cfg.betting.warmup;
        const double lam_minus = warm ? 0.0 : acc_minus.lambda(cap_minus);
        const double lam_plus = warm ? 0.0 : acc_plus.lambda(cap_plus);

        const double g = gap_at(in.losses[i], rt, zt, rst, zst);
        run_minus.step(lam_minus, g);
        run_plus.step(lam_plus, -g);
        if (cfg.betting.cached_payoffs) {
            acc_minus.add(g);
            acc_plus.add(-g);
        }

        out.gap[i] = g;
        prev[0] = rt;
        prev[1] = zt;
        prev[2] = rst;
        prev[3] = zst;
        have_prev = true;
    }
    run_minus.finish();
    run_plus.finish();

    out.lambda_minus.resize(T);
    out.lambda_plus.resize(T);
    out.wealth_minus.resize(T);
    out.wealth_plus.resize(T);
    out.segment.resize(T);
    const std::vector<StepRecord>& tm = run_minus.trace();
    const std::vector<StepRecord>& tp = run_plus.trace();
    for (std::size_t i = 0; i < T; ++i) {
        out.lambda_minus[i] = tm[i].lambda;
        out.lambda_plus[i] = tp[i].lambda;
        out.wealth_minus[i] = tm[i].wealth;
        out.wealth_plus[i] = tp[i].wealth;
        out.segment[i] = tm[i].segment;
    }
    out.sup_minus = run_minus.global_sup();
    out.sup_plus = run_plus.global_sup();
    out.tau_minus = run_minus.first_hit(thr0);
    out.tau_plus = run_plus.first_hit(thr0);
    out.verdict = classify_zone(out.sup_minus, out.sup_plus, out.tau_minus,
                                out.tau_plus, thr0);
    out.segments_minus = run_minus.segments();
    out.segments_plus = run_plus.segments();

    bool aligned = out.segments_minus.size() == out.segments_plus.size();
    for (std::size_t s = 0; aligned && s < out.segments_minus.size(); ++s)
        aligned = out.segments_minus[s].begin == out.segments_plus[s].begin &&
                  out.segments_minus[s].end == out.segments_plus[s].end;
    if (aligned) {
        for (std::size_t s = 0; s < out.segments_minus.size(); ++s) {
            const SegmentStats& sm = out.segments_minus[s];
            const SegmentStats& sp = out.segments_plus[s];
            out.per_segment.push_back(classify_zone(
                sm.sup, sp.sup, sm.first_hit[0], sp.first_hit[0], thr0));
        }
    }
    return out;
}

// ---- heatmap over ordered model pairs ----

HeatmapResult heatmap(const std::vector<double>& losses,
                      const std::vector<ModelForecasts>& models,
                      const ComparativeConfig& cfg, bool parallel) {
    if (models.empty()) throw ConfigError("heatmap needs at least one model");
    const std::size_t n = models.size();

    HeatmapResult out;
    out.models.reserve(n);
    for (const ModelForecasts& m : models) out.models.push_back(m.name);
    out.grid.assign(n, std::vector<ZoneVerdict>(n));

    const int cells = static_cast<int>(n * n);
    std::exception_ptr err;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int c = 0; c < cells; ++c) {
        try {
            const std::size_t std_i = static_cast<std::size_t>(c) / n;
            const std::size_t int_j = static_cast<std::size_t>(c) % n;
            ComparativePair pair;
            pair.losses = losses;
            pair.r = models[int_j].r;
            pair.z = models[int_j].z;
            pair.r_star = models[std_i].r;
            pair.z_star = models[std_i].z;
            out.grid[std_i][int_j] = run_comparative(pair, cfg).verdict;
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    (void)parallel;
    return out;
}

} // namespace ebt
