#pragma once

#include <limits>
#include <string>

namespace ebt {

// Identification and scoring kernels for the supported risk functionals.
// One-dimensional functionals carry a single forecast r; two-dimensional ones
// carry (r, z) where r is the regulatory component (variance, ES, variantile)
// and z the auxiliary statistic (mean, VaR, expectile).

enum class RiskFunctional {
    Mean,
    MeanVariance,
    VaR,
    EsVar,
    Expectile,
    ExpectileVariantile,
};

// Identification flavor for Mean and Expectile: Ratio works on nonnegative
// losses and is scale free; Bounded works on losses confined to [-M, M] and
// needs the support bound to stay a valid e-factor.
enum class KernelForm { Ratio, Bounded };

// Selects the scoring family: H2 quadratic kernels (mean, mean-variance,
// expectile), H1 the linear VaR kernel, HHalf the square-root (ES, VaR)
// kernel, H0 the scale-free log kernels (VaR, (ES, VaR), expectile).
enum class Homogeneity { H0, HHalf, H1, H2 };

int functional_dim(RiskFunctional f);
bool functional_has_level(RiskFunctional f);

std::string to_string(RiskFunctional f);
std::string to_string(Homogeneity h);
std::string to_string(KernelForm f);
RiskFunctional functional_from_string(const std::string& s);
Homogeneity homogeneity_from_string(const std::string& s);

inline constexpr double kNoForecast = std::numeric_limits<double>::quiet_NaN();

struct IdentificationKernel {
    RiskFunctional functional = RiskFunctional::Mean;
    double level = 0.5;                 // p; ignored by Mean and MeanVariance
    KernelForm form = KernelForm::Ratio; // Mean and Expectile only
    double support_bound = 0.0;          // M; required by Bounded forms
};

// Raw identification value V(x, r[, z]). Zero conditional mean exactly at the
// true functional, nonpositive mean for conservative forecasts.
double eval_identification(const IdentificationKernel& k, double x, double r,
                           double z = kNoForecast);

// Infimum of the raw V over the loss domain at fixed forecasts.
double identification_infimum(const IdentificationKernel& k, double r,
                              double z = kNoForecast);

// Per-step payoff for one-sided standard backtests: the raw V for ratio and
// indicator kernels, the tightly rescaled V for Bounded forms. Always >= -1,
// so 1 + lambda * payoff stays nonnegative for lambda in [0, 1].
double standard_payoff(const IdentificationKernel& k, double x, double r,
                       double z = kNoForecast);

// Infimum of the payoff over the loss domain; feeds the betting cap.
double standard_payoff_infimum(const IdentificationKernel& k, double r,
                               double z = kNoForecast);

// Lower/upper payoff pair for two-sided standard backtests of one-dimensional
// functionals: lower >= -1 and upper <= 1 by construction. Supported for VaR
// and the Bounded mean/expectile kernels.
struct TwoSidedPayoff {
    double lower = 0.0;
    double upper = 0.0;
};
TwoSidedPayoff two_sided_payoff(const IdentificationKernel& k, double x, double r);
bool supports_two_sided(const IdentificationKernel& k);

struct ScoringKernel {
    RiskFunctional functional = RiskFunctional::Mean;
    Homogeneity degree = Homogeneity::H2;
    double level = 0.5;          // p; ignored by Mean and MeanVariance
    double support_bound = 0.0;  // M; losses live in [-M, M]
};

// Throws ConfigError unless (functional, degree) is one of the supported
// kernels: Mean/H2, MeanVariance/H2, VaR/H1, VaR/H0, EsVar/HHalf, EsVar/H0,
// Expectile/H2, Expectile/H0.
void validate(const ScoringKernel& k);

double eval_score(const ScoringKernel& k, double x, double r, double z = kNoForecast);

// Closed-form infimum over x in [-M, M] of S(x, r, z) - S(x, r*, z*).
double score_gap_infimum(const ScoringKernel& k, double r, double z, double r_star,
                         double z_star);
inline double score_gap_infimum(const ScoringKernel& k, double r, double r_star) {
    return score_gap_infimum(k, r, kNoForecast, r_star, kNoForecast);
}

// Largest admissible betting weight for a gap with infimum gamma:
// 1 / ((-gamma) v 0), where 1/0 is +inf (no constraint).
double h_bound(double gamma);

// E-statistic built from the statistic loss of an elicitable pair:
// E = 1 + h (S_stat(x, z) - r), where z forecasts the Bayes statistic (mean,
// VaR, expectile) and r the regulatory measure it induces (variance, ES,
// variantile). With the tight default weight this reduces exactly to the
// identification e-variable of the pair.
double bayes_statistic_loss(RiskFunctional pair, double x, double z, double level);
double bayes_default_h(RiskFunctional pair, double r, double z, double level);
double bayes_estat(RiskFunctional pair, double x, double r, double z, double h,
                   double level);

} // namespace ebt
