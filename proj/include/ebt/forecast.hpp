#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ebt/dist.hpp"
#include "ebt/kernels.hpp"
#include "ebt/rng.hpp"

namespace ebt {

// Rolling one-step-ahead risk forecasting from an AR(1)-GARCH(1,1) filter:
//   X_t = mu_t + eps_t,  mu_t = phi0 + phi1 X_{t-1},
//   eps_t = sigma_t Z_t, sigma_t^2 = alpha0 + alpha1 eps_{t-1}^2 + beta1 sigma_{t-1}^2,
// with iid standardized innovations Z_t. The filter seeds sigma_1^2 with the
// window's sample variance and mu_1 with the first observation (eps_1 = 0).

struct GarchParams {
    double phi0 = 0.0, phi1 = 0.0;
    double alpha0 = 1.0, alpha1 = 0.0, beta1 = 0.0;
    double nu = 8.0;    // shape, t and skewed-t innovations only
    double gamma = 1.0; // skewness, skewed-t innovations only
};

// Filter pass at fixed parameters. loglik sums days two onward; day one has
// no innovation term by construction (eps_1 = 0).
struct GarchFilter {
    std::vector<double> mu, sigma2;
    double loglik = 0.0;
    double mu_next = 0.0, sigma2_next = 0.0;
};

GarchFilter garch_filter(const std::vector<double>& window, const GarchParams& p,
                         InnovationKind kind);

struct GarchFit {
    GarchParams params;
    double loglik = -std::numeric_limits<double>::infinity();
    double mu_next = 0.0, sigma_next = 1.0;
    // Standardized residuals eps_t / sigma_t for t >= 2 (day one is zero by
    // construction and carries no information).
    std::vector<double> residuals;
    bool used_fallback = false;
};

// Warm: one local search from the supplied start (fall back to the cold
// protocol when it underperforms the constant-volatility parametrization).
// Cold: searches from a default start, the constant-volatility start and
// three seeded perturbations; best log-likelihood wins.
enum class FitPolicy { Warm, Cold };

GarchFit fit_garch(const std::vector<double>& window, InnovationKind kind,
                   FitPolicy policy = FitPolicy::Cold,
                   const GarchParams* warm_start = nullptr,
                   std::uint64_t seed = 0, std::uint32_t substream = 0);

// ---- innovation risk estimators ----

struct RiskValue {
    double r = 0.0;         // regulatory forecast of the standardized innovation
    double z = kNoForecast; // statistic forecast for two-dim functionals
};

// Fully parametric: closed-form risk of the fitted innovation distribution.
// Supported functionals: VaR (r = quantile), EsVar (r = ES, z = VaR),
// Expectile (r = expectile).
RiskValue innovation_risk(const InnovationDist& dist, RiskFunctional functional,
                          double level);

// Filtered historical simulation: iid bootstrap of the standardized
// residuals; empirical risk of the resampled set.
RiskValue fhs_risk(const std::vector<double>& residuals, RiskFunctional functional,
                   double level, int draws, Philox& rng);

// Semiparametric tail: generalized Pareto exceedances over the residuals'
// 90th percentile, empirical body below it.
RiskValue evt_risk(const std::vector<double>& residuals, RiskFunctional functional,
                   double level);

// ---- rolling drivers ----

enum class ForecastMethod { FP, FHS, EVT, Opt };

std::string to_string(ForecastMethod m);    // "fp", "fhs", "evt", "opt"
std::string to_string(InnovationKind k);    // "n", "t", "st"
ForecastMethod forecast_method_from_string(const std::string& s);
InnovationKind innovation_from_string(const std::string& s);

// Generator-side truth for the oracle forecaster: conditional mean and
// volatility per day plus the innovation law in force (regime-indexed so a
// distributional break keeps both laws around).
struct OracleState {
    std::vector<double> mu, sigma;
    std::vector<int> regime;
    std::vector<std::shared_ptr<const InnovationDist>> innovations;
};

struct RollingConfig {
    InnovationKind innovation = InnovationKind::Normal;
    ForecastMethod method = ForecastMethod::FP;
    RiskFunctional functional = RiskFunctional::VaR;
    double level = 0.99;
    int window = 500;
    int fhs_draws = 10000;
    FitPolicy policy = FitPolicy::Warm;
    bool parallel = false; // cold-policy refits spread over threads
    std::uint64_t seed = 0;
};

struct RollingResult {
    int first_index = 0;      // losses index of the first forecast day
    std::vector<double> r, z; // one entry per forecast day
    int fallbacks = 0; // days the warm search failed its guard, redone cold
};

// Forecasts day i from losses[i - window .. i - 1] for each
// i = window .. size-1. Forecast of the loss: mu_next + sigma_next * rho(Z).
// method Opt ignores the window and reads the oracle state at day i.
RollingResult rolling_forecast(const std::vector<double>& losses,
                               const RollingConfig& cfg,
                               const OracleState* oracle = nullptr);

// Several method/functional/level requests served off one fit chain per day
// (the innovation assumption and window come from the base config; its
// method/functional/level fields are ignored). FHS requests on the same day
// share one bootstrap resample.
struct RollingRequest {
    ForecastMethod method = ForecastMethod::FP;
    RiskFunctional functional = RiskFunctional::VaR;
    double level = 0.99;
};

std::vector<RollingResult> rolling_forecast_multi(
    const std::vector<double>& losses, const RollingConfig& base,
    const std::vector<RollingRequest>& requests,
    const OracleState* oracle = nullptr);

} // namespace ebt
