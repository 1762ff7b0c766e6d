#include "ebt/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ebt/errors.hpp"
#include "ebt/optim.hpp"

namespace ebt {

namespace {

// rng stream purposes owned by this module
constexpr std::uint32_t kPurposeFhs = 3;
constexpr std::uint32_t kPurposeFitRestart = 4;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- fast innovation log-density ----
//
// The likelihood loop runs hundreds of times per optimizer call, so the
// per-observation density avoids the virtual InnovationDist interface and
// hoists every parameter-only constant out of the loop.

struct InnovLogPdf {
    InnovationKind kind = InnovationKind::Normal;
    double nu = 0.0;
    double half_nup1 = 0.0; // (nu + 1) / 2
    double cst = 0.0;       // additive constant per observation
    double rescale = 1.0;   // t: divide by the standardizing scale
    double m = 0.0, sd = 1.0, gamma = 1.0; // skewed-t standardization

    double operator()(double z) const {
        switch (kind) {
            case InnovationKind::Normal:
                return -0.5 * z * z - 0.91893853320467274178;
            case InnovationKind::StudentT: {
                const double u = z * rescale;
                return cst - half_nup1 * std::log1p(u * u / nu);
            }
            case InnovationKind::SkewedT: {
                const double x = m + sd * z;
                const double u = x >= 0.0 ? x / gamma : gamma * x;
                return cst - half_nup1 * std::log1p(u * u / nu);
            }
        }
        return 0.0;
    }
};

InnovLogPdf make_log_pdf(InnovationKind kind, double nu, double gamma) {
    InnovLogPdf lp;
    lp.kind = kind;
    if (kind == InnovationKind::Normal) return lp;
    lp.nu = nu;
    lp.half_nup1 = 0.5 * (nu + 1.0);
    const double c_t = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                       0.5 * std::log(nu * 3.14159265358979323846);
    if (kind == InnovationKind::StudentT) {
        const double scale = std::sqrt((nu - 2.0) / nu); // z = scale * t
        lp.rescale = 1.0 / scale;
        lp.cst = c_t - std::log(scale);
    } else {
        double mean = 0.0, sd = 1.0;
        skewed_t_moments(nu, gamma, mean, sd);
        lp.m = mean;
        lp.sd = sd;
        lp.gamma = gamma;
        lp.cst = c_t + std::log(2.0 / (gamma + 1.0 / gamma)) + std::log(sd);
    }
    return lp;
}

double sample_variance(const std::vector<double>& w) {
    const double n = static_cast<double>(w.size());
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : w) ss += (x - mean) * (x - mean);
    return ss / (n - 1.0);
}

// Negative log-likelihood; +inf for any infeasible parametrization. Kept in
// lockstep with garch_filter below (a test pins the two together).
double garch_nll(const std::vector<double>& w, const GarchParams& p,
                 InnovationKind kind, double s2_init) {
    if (!(p.alpha0 > 0.0) || p.alpha1 < 0.0 || p.beta1 < 0.0) return kInf;
    InnovLogPdf lp;
    try {
        lp = make_log_pdf(kind, p.nu, p.gamma);
    } catch (const std::exception&) {
        return kInf;
    }
    if (kind != InnovationKind::Normal && !std::isfinite(lp.cst)) return kInf;

    double ll = 0.0;
    double eps_prev = 0.0;
    double s2 = s2_init;
    const std::size_t n = w.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double mu = p.phi0 + p.phi1 * w[i - 1];
        s2 = p.alpha0 + p.alpha1 * eps_prev * eps_prev + p.beta1 * s2;
        if (!(s2 > 0.0) || !std::isfinite(s2)) return kInf;
        const double eps = w[i] - mu;
        ll += lp(eps / std::sqrt(s2)) - 0.5 * std::log(s2);
        eps_prev = eps;
    }
    return std::isfinite(ll) ? -ll : kInf;
}

// ---- unconstrained reparametrization for the simplex search ----
//
// phi1 through tanh, alpha0 through exp, (alpha1, beta1) through a softmax
// with the leftover share so alpha1 + beta1 < 1, nu = 2 + exp, gamma = exp.

int param_dim(InnovationKind kind) {
    switch (kind) {
        case InnovationKind::Normal: return 5;
        case InnovationKind::StudentT: return 6;
        case InnovationKind::SkewedT: return 7;
    }
    return 5;
}

GarchParams unpack(const std::vector<double>& u, InnovationKind kind) {
    GarchParams p;
    p.phi0 = u[0];
    p.phi1 = std::tanh(u[1]);
    p.alpha0 = std::exp(std::min(u[2], 40.0));
    const double hi = std::max({0.0, u[3], u[4]});
    const double d0 = std::exp(-hi);
    const double d1 = std::exp(u[3] - hi);
    const double d2 = std::exp(u[4] - hi);
    const double den = d0 + d1 + d2;
    p.alpha1 = d1 / den;
    p.beta1 = d2 / den;
    if (kind != InnovationKind::Normal) p.nu = 2.0 + std::exp(std::min(u[5], 30.0));
    if (kind == InnovationKind::SkewedT)
        p.gamma = std::exp(std::clamp(u[6], -20.0, 20.0));
    return p;
}

std::vector<double> pack(const GarchParams& p, InnovationKind kind) {
    std::vector<double> u(static_cast<std::size_t>(param_dim(kind)));
    u[0] = p.phi0;
    u[1] = std::atanh(std::clamp(p.phi1, -1.0 + 1e-9, 1.0 - 1e-9));
    u[2] = std::log(std::max(p.alpha0, 1e-300));
    const double a1 = std::clamp(p.alpha1, 1e-10, 1.0);
    const double b1 = std::clamp(p.beta1, 1e-10, 1.0);
    const double s0 = std::max(1.0 - a1 - b1, 1e-10);
    u[3] = std::log(a1 / s0);
    u[4] = std::log(b1 / s0);
    if (kind != InnovationKind::Normal) u[5] = std::log(std::max(p.nu - 2.0, 1e-8));
    if (kind == InnovationKind::SkewedT) u[6] = std::log(std::max(p.gamma, 1e-12));
    return u;
}

GarchParams default_start(const std::vector<double>& w) {
    GarchParams p;
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
    const double var = sample_variance(w);
    p.phi1 = 0.1;
    p.phi0 = mean * (1.0 - p.phi1);
    p.alpha1 = 0.05;
    p.beta1 = 0.90;
    p.alpha0 = var * (1.0 - p.alpha1 - p.beta1);
    return p;
}

// Near-constant volatility; its likelihood is the floor every fit must clear.
GarchParams constant_vol_start(const std::vector<double>& w) {
    GarchParams p;
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
    const double var = sample_variance(w);
    p.phi0 = mean;
    p.phi1 = 0.0;
    p.alpha1 = 1e-4;
    p.beta1 = 1e-4;
    p.alpha0 = var * (1.0 - 2e-4);
    return p;
}

std::shared_ptr<const InnovationDist> make_dist(InnovationKind kind,
                                                const GarchParams& p) {
    switch (kind) {
        case InnovationKind::Normal: return make_normal();
        case InnovationKind::StudentT: return make_student_t(p.nu);
        case InnovationKind::SkewedT: return make_skewed_t(p.nu, p.gamma);
    }
    return make_normal();
}

// ---- empirical risk of a sample (FHS backend) ----

double empirical_quantile(std::vector<double>& v, double level) {
    const std::size_t n = v.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
    return v[k - 1];
}

RiskValue empirical_risk(std::vector<double>& v, RiskFunctional f, double level) {
    RiskValue out;
    switch (f) {
        case RiskFunctional::VaR:
            out.r = empirical_quantile(v, level);
            return out;
        case RiskFunctional::EsVar: {
            const std::size_t n = v.size();
            std::size_t k =
                static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
            k = std::clamp<std::size_t>(k, 1, n);
            if (k >= n) throw DataError("tail holds no draws at this level");
            std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1),
                             v.end());
            out.z = v[k - 1];
            // tail mean over the draws strictly above the var order statistic
            double s = 0.0;
            for (std::size_t j = k; j < n; ++j) s += v[j];
            out.r = s / static_cast<double>(n - k);
            return out;
        }
        case RiskFunctional::Expectile: {
            // piecewise-linear first-order condition, solved exactly segment
            // by segment on the sorted sample
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            const double total = std::accumulate(v.begin(), v.end(), 0.0);
            const double p = level;
            double cum = 0.0; // sum of the i smallest values
            for (std::size_t i = 0; i <= n; ++i) {
                const double nup = static_cast<double>(n - i);
                const double sup_sum = total - cum;
                const double den = p * nup + (1.0 - p) * static_cast<double>(i);
                if (den > 0.0) {
                    const double a = (p * sup_sum + (1.0 - p) * cum) / den;
                    const double lo = i == 0 ? -kInf : v[i - 1];
                    const double hi = i == n ? kInf : v[i];
                    if (a >= lo && a <= hi) {
                        out.r = a;
                        return out;
                    }
                }
                if (i < n) cum += v[i];
            }
            throw NumericError("empirical expectile root not bracketed");
        }
        default:
            break;
    }
    throw ConfigError("no sample-based forecaster for functional " + to_string(f));
}

} // namespace

// ---- filter ----

GarchFilter garch_filter(const std::vector<double>& w, const GarchParams& p,
                         InnovationKind kind) {
    if (w.size() < 2) throw DataError("filter needs at least two observations");
    const std::size_t n = w.size();
    const double s2_init = sample_variance(w);
    if (!(s2_init > 0.0)) throw DataError("window has zero variance");
    const InnovLogPdf lp = make_log_pdf(kind, p.nu, p.gamma);

    GarchFilter f;
    f.mu.resize(n);
    f.sigma2.resize(n);
    f.mu[0] = w[0];
    f.sigma2[0] = s2_init;
    double eps_prev = 0.0;
    double ll = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        f.mu[i] = p.phi0 + p.phi1 * w[i - 1];
        f.sigma2[i] = p.alpha0 + p.alpha1 * eps_prev * eps_prev + p.beta1 * f.sigma2[i - 1];
        if (!(f.sigma2[i] > 0.0) || !std::isfinite(f.sigma2[i]))
            throw NumericError("volatility recursion left the positive domain");
        const double eps = w[i] - f.mu[i];
        ll += lp(eps / std::sqrt(f.sigma2[i])) - 0.5 * std::log(f.sigma2[i]);
        eps_prev = eps;
    }
    f.loglik = ll;
    f.mu_next = p.phi0 + p.phi1 * w[n - 1];
    f.sigma2_next = p.alpha0 + p.alpha1 * eps_prev * eps_prev + p.beta1 * f.sigma2[n - 1];
    return f;
}

// ---- fitting ----

GarchFit fit_garch(const std::vector<double>& window, InnovationKind kind,
                   FitPolicy policy, const GarchParams* warm_start,
                   std::uint64_t seed, std::uint32_t substream) {
    if (window.size() < 20) throw DataError("fit window needs at least 20 observations");
    const double s2_init = sample_variance(window);
    if (!(s2_init > 0.0)) throw DataError("fit window has zero variance");
    const int dim = param_dim(kind);

    const auto obj = [&](const std::vector<double>& u) {
        return garch_nll(window, unpack(u, kind), kind, s2_init);
    };

    std::vector<double> cold_step(static_cast<std::size_t>(dim), 0.5);
    cold_step[0] = 0.1;
    cold_step[1] = 0.3;
    if (dim > 5) cold_step[5] = 0.4;
    if (dim > 6) cold_step[6] = 0.25;

    const std::vector<double> fall_u = pack(constant_vol_start(window), kind);
    const double fall_nll = obj(fall_u);

    std::vector<double> best_u = fall_u;
    double best_nll = fall_nll;
    const auto search = [&](const std::vector<double>& u0,
                            const std::vector<double>& st, int max_evals,
                            double ftol) {
        NelderMeadOptions o;
        o.ftol = ftol;
        o.xtol = 1e-4;
        o.max_evals = max_evals;
        const NelderMeadResult r = nelder_mead(obj, u0, st, o);
        if (r.fval < best_nll) {
            best_nll = r.fval;
            best_u = r.x;
        }
    };

    bool warm_failed = false;
    bool done = false;
    if (policy == FitPolicy::Warm && warm_start != nullptr) {
        const std::vector<double> warm_step(static_cast<std::size_t>(dim), 0.06);
        search(pack(*warm_start, kind), warm_step, 500, 1e-6);
        // the guard: a warm refit may never land below the constant-vol floor
        if (best_nll <= fall_nll) done = true;
        else warm_failed = true;
    }
    if (!done) {
        const std::vector<double> def_u = pack(default_start(window), kind);
        search(def_u, cold_step, 2000, 1e-7);
        search(fall_u, cold_step, 2000, 1e-7);
        Philox rng(seed, kPurposeFitRestart, substream);
        for (int k = 0; k < 3; ++k) {
            std::vector<double> u = def_u;
            for (double& x : u) x += 0.5 * rng.normal();
            search(u, cold_step, 2000, 1e-7);
        }
    }
    if (!std::isfinite(best_nll))
        throw FitError("no feasible parametrization for the fit window");

    GarchFit fit;
    fit.params = unpack(best_u, kind);
    fit.loglik = -best_nll;
    fit.used_fallback = warm_failed;
    const GarchFilter f = garch_filter(window, fit.params, kind);
    fit.mu_next = f.mu_next;
    fit.sigma_next = std::sqrt(f.sigma2_next);
    fit.residuals.resize(window.size() - 1);
    for (std::size_t i = 1; i < window.size(); ++i)
        fit.residuals[i - 1] = (window[i] - f.mu[i]) / std::sqrt(f.sigma2[i]);
    return fit;
}

// ---- innovation risk estimators ----

RiskValue innovation_risk(const InnovationDist& d, RiskFunctional f, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw ConfigError("risk level must lie in (0, 1)");
    RiskValue v;
    switch (f) {
        case RiskFunctional::VaR:
            v.r = d.quantile(level);
            return v;
        case RiskFunctional::EsVar:
            v.z = d.quantile(level);
            v.r = d.es(level);
            return v;
        case RiskFunctional::Expectile:
            v.r = d.expectile(level);
            return v;
        default:
            break;
    }
    throw ConfigError("no innovation forecaster for functional " + to_string(f));
}

RiskValue fhs_risk(const std::vector<double>& residuals, RiskFunctional f,
                   double level, int draws, Philox& rng) {
    if (residuals.empty()) throw DataError("no residuals to resample");
    if (draws < 100) throw ConfigError("bootstrap needs at least 100 draws");
    if (!(level > 0.0 && level < 1.0))
        throw ConfigError("risk level must lie in (0, 1)");
    std::vector<double> v(static_cast<std::size_t>(draws));
    for (double& x : v) x = residuals[rng.below(residuals.size())];
    return empirical_risk(v, f, level);
}

RiskValue evt_risk(const std::vector<double>& residuals, RiskFunctional f,
                   double level) {
    if (residuals.size() < 50) throw DataError("too few residuals for a tail fit");
    if (!(level > 0.0 && level < 1.0))
        throw ConfigError("risk level must lie in (0, 1)");
    std::vector<double> sorted = residuals;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t ku =
        static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n)));
    const double u = sorted[ku - 1];
    std::vector<double> exc;
    for (std::size_t j = ku - 1; j < n; ++j)
        if (sorted[j] > u) exc.push_back(sorted[j] - u);
    const double zeta = static_cast<double>(exc.size()) / static_cast<double>(n);
    const GpdParams g = gpd_fit(exc);

    const auto var_at = [&](double p) {
        if (p < 1.0 - zeta - 1e-9)
            throw ConfigError("evt level sits below the tail threshold");
        const double ratio = (1.0 - p) / zeta;
        if (std::abs(g.xi) < 1e-12) return u - g.beta * std::log(ratio);
        return u + g.beta / g.xi * (std::pow(ratio, -g.xi) - 1.0);
    };

    RiskValue out;
    switch (f) {
        case RiskFunctional::VaR:
            out.r = var_at(level);
            return out;
        case RiskFunctional::EsVar: {
            if (g.xi >= 1.0)
                throw NumericError("tail index too heavy for a finite es");
            out.z = var_at(level);
            out.r = (out.z + g.beta - g.xi * u) / (1.0 - g.xi);
            return out;
        }
        case RiskFunctional::Expectile: {
            if (g.xi >= 1.0)
                throw NumericError("tail index too heavy for a finite mean");
            // spliced law: empirical mass 1/n per residual at or below u,
            // generalized Pareto tail carrying mass zeta above u
            double body_sum = 0.0;
            for (double x : sorted) {
                if (x > u) break;
                body_sum += x;
            }
            const double tail_mean = u + g.beta / (1.0 - g.xi);
            const double mean_all =
                body_sum / static_cast<double>(n) + zeta * tail_mean;
            const auto eplus = [&](double a) {
                if (a >= u) {
                    const double y = a - u;
                    const double t = 1.0 + g.xi * y / g.beta;
                    if (t <= 0.0) return 0.0; // past the finite endpoint
                    const double surv = std::abs(g.xi) < 1e-12
                                            ? std::exp(-y / g.beta)
                                            : std::pow(t, -1.0 / g.xi);
                    return zeta * surv * (g.beta + g.xi * y) / (1.0 - g.xi);
                }
                double s = 0.0;
                for (double x : sorted) {
                    if (x > u) break;
                    if (x > a) s += x - a;
                }
                return s / static_cast<double>(n) +
                       zeta * ((u - a) + g.beta / (1.0 - g.xi));
            };
            const double p = level;
            const auto gfun = [&](double a) {
                const double ep = eplus(a);
                return p * ep - (1.0 - p) * (a - mean_all + ep);
            };
            double lo = sorted.front();
            if (gfun(lo) <= 0.0) {
                out.r = lo;
                return out;
            }
            double span = std::max(1.0, g.beta);
            double hi = u + span;
            int guard = 0;
            while (gfun(hi) > 0.0 && guard++ < 200) hi = u + (hi - u) * 2.0;
            if (gfun(hi) > 0.0)
                throw NumericError("expectile bracket expansion failed");
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (gfun(mid) > 0.0)
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo <= 1e-13 * (1.0 + std::abs(hi))) break;
            }
            out.r = 0.5 * (lo + hi);
            return out;
        }
        default:
            break;
    }
    throw ConfigError("no evt forecaster for functional " + to_string(f));
}

// ---- string names ----

std::string to_string(ForecastMethod m) {
    switch (m) {
        case ForecastMethod::FP: return "fp";
        case ForecastMethod::FHS: return "fhs";
        case ForecastMethod::EVT: return "evt";
        case ForecastMethod::Opt: return "opt";
    }
    return "fp";
}

std::string to_string(InnovationKind k) {
    switch (k) {
        case InnovationKind::Normal: return "n";
        case InnovationKind::StudentT: return "t";
        case InnovationKind::SkewedT: return "st";
    }
    return "n";
}

ForecastMethod forecast_method_from_string(const std::string& s) {
    if (s == "fp") return ForecastMethod::FP;
    if (s == "fhs") return ForecastMethod::FHS;
    if (s == "evt") return ForecastMethod::EVT;
    if (s == "opt") return ForecastMethod::Opt;
    throw ConfigError("unknown forecast method '" + s + "'");
}

InnovationKind innovation_from_string(const std::string& s) {
    if (s == "n" || s == "normal") return InnovationKind::Normal;
    if (s == "t" || s == "student-t") return InnovationKind::StudentT;
    if (s == "st" || s == "skewed-t") return InnovationKind::SkewedT;
    throw ConfigError("unknown innovation kind '" + s + "'");
}

// ---- rolling drivers ----

std::vector<RollingResult> rolling_forecast_multi(
    const std::vector<double>& losses, const RollingConfig& base,
    const std::vector<RollingRequest>& requests, const OracleState* oracle) {
    const int W = base.window;
    if (W < 20) throw ConfigError("rolling window needs at least 20 observations");
    if (static_cast<int>(losses.size()) <= W)
        throw DataError("loss series not longer than the rolling window");
    if (requests.empty()) throw ConfigError("no forecast requests");

    bool need_fit = false, need_boot = false;
    for (const RollingRequest& rq : requests) {
        if (!(rq.level > 0.0 && rq.level < 1.0))
            throw ConfigError("risk level must lie in (0, 1)");
        if (rq.functional != RiskFunctional::VaR &&
            rq.functional != RiskFunctional::EsVar &&
            rq.functional != RiskFunctional::Expectile)
            throw ConfigError("no rolling forecaster for functional " +
                              to_string(rq.functional));
        if (rq.method == ForecastMethod::Opt) {
            if (oracle == nullptr)
                throw ConfigError("oracle forecasts need generator state");
            if (oracle->mu.size() != losses.size() ||
                oracle->sigma.size() != losses.size() ||
                oracle->regime.size() != losses.size())
                throw AlignmentError("oracle state length does not match losses");
        } else {
            need_fit = true;
            if (rq.method == ForecastMethod::FHS) need_boot = true;
        }
    }
    if (need_boot && base.fhs_draws < 100)
        throw ConfigError("bootstrap needs at least 100 draws");

    const int T = static_cast<int>(losses.size());
    const int days = T - W;
    std::vector<RollingResult> out(requests.size());
    for (std::size_t q = 0; q < requests.size(); ++q) {
        out[q].first_index = W;
        out[q].r.assign(static_cast<std::size_t>(days), 0.0);
        if (functional_dim(requests[q].functional) == 2)
            out[q].z.assign(static_cast<std::size_t>(days), 0.0);
    }

    const auto run_day = [&](int i, FitPolicy pol, const GarchParams* warm,
                             GarchParams* fitted, int* fell) {
        GarchFit fit;
        std::shared_ptr<const InnovationDist> fp_dist;
        std::vector<double> boot;
        if (need_fit) {
            const std::vector<double> window(losses.begin() + (i - W),
                                             losses.begin() + i);
            fit = fit_garch(window, base.innovation, pol, warm, base.seed,
                            static_cast<std::uint32_t>(i));
            if (fitted != nullptr) *fitted = fit.params;
            if (fell != nullptr && fit.used_fallback) ++(*fell);
        }
        for (std::size_t q = 0; q < requests.size(); ++q) {
            const RollingRequest& rq = requests[q];
            RiskValue rv;
            double mu = 0.0, sd = 1.0;
            if (rq.method == ForecastMethod::Opt) {
                const std::size_t reg =
                    static_cast<std::size_t>(oracle->regime[static_cast<std::size_t>(i)]);
                rv = innovation_risk(*oracle->innovations.at(reg), rq.functional,
                                     rq.level);
                mu = oracle->mu[static_cast<std::size_t>(i)];
                sd = oracle->sigma[static_cast<std::size_t>(i)];
            } else {
                mu = fit.mu_next;
                sd = fit.sigma_next;
                switch (rq.method) {
                    case ForecastMethod::FP: {
                        if (!fp_dist) fp_dist = make_dist(base.innovation, fit.params);
                        rv = innovation_risk(*fp_dist, rq.functional, rq.level);
                        break;
                    }
                    case ForecastMethod::FHS: {
                        if (boot.empty()) {
                            Philox rng(base.seed, kPurposeFhs,
                                       static_cast<std::uint32_t>(i));
                            boot.resize(static_cast<std::size_t>(base.fhs_draws));
                            for (double& x : boot)
                                x = fit.residuals[rng.below(fit.residuals.size())];
                        }
                        std::vector<double> copy = boot;
                        rv = empirical_risk(copy, rq.functional, rq.level);
                        break;
                    }
                    case ForecastMethod::EVT:
                        rv = evt_risk(fit.residuals, rq.functional, rq.level);
                        break;
                    default:
                        break;
                }
            }
            const std::size_t d = static_cast<std::size_t>(i - W);
            out[q].r[d] = mu + sd * rv.r;
            if (!out[q].z.empty()) out[q].z[d] = mu + sd * rv.z;
        }
    };

    int fell = 0;
    if (!need_fit) {
        for (int i = W; i < T; ++i) run_day(i, base.policy, nullptr, nullptr, nullptr);
    } else if (base.policy == FitPolicy::Warm) {
        if (base.parallel)
            throw ConfigError("parallel refits need the cold fit policy");
        GarchParams warm;
        bool have = false;
        for (int i = W; i < T; ++i) {
            GarchParams fitted;
            run_day(i, have ? FitPolicy::Warm : FitPolicy::Cold,
                    have ? &warm : nullptr, &fitted, &fell);
            warm = fitted;
            have = true;
        }
    } else {
        std::exception_ptr err;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : fell) if (base.parallel)
#endif
        for (int i = W; i < T; ++i) {
            try {
                int f1 = 0;
                run_day(i, FitPolicy::Cold, nullptr, nullptr, &f1);
                fell += f1;
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    }
    for (RollingResult& r : out) r.fallbacks = fell;
    return out;
}

RollingResult rolling_forecast(const std::vector<double>& losses,
                               const RollingConfig& cfg,
                               const OracleState* oracle) {
    const std::vector<RollingRequest> one{{cfg.method, cfg.functional, cfg.level}};
    return rolling_forecast_multi(losses, cfg, one, oracle)[0];
}

} // namespace ebt
