#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ebt/rng.hpp"

namespace ebt {

// Standardized innovation families for the AR-GARCH layer: zero mean, unit
// variance. Each exposes exactly what forecasting needs: a log density for
// MLE, CDF/quantile, and the upper partial moment E[Z 1{Z > a}] from which
// expected shortfall and expectiles follow in closed or semi-closed form.

enum class InnovationKind { Normal, StudentT, SkewedT };

class InnovationDist {
  public:
    virtual ~InnovationDist() = default;

    virtual InnovationKind kind() const = 0;
    virtual std::string name() const = 0;
    virtual double log_pdf(double z) const = 0;
    virtual double cdf(double z) const = 0;
    virtual double quantile(double p) const = 0;

    // E[Z 1{Z > a}] in closed form.
    virtual double upper_partial(double a) const = 0;

    double sample(Philox& rng) const { return quantile(rng.uniform()); }

    double es(double p) const;
    double expectile(double p) const;

    // g(a) = p E[(Z-a)_+] - (1-p) E[(a-Z)_+]; the expectile is its root and g
    // is strictly decreasing, so bisection is exact business.
    double expectile_residual(double p, double a) const;
};

std::shared_ptr<const InnovationDist> make_normal();
std::shared_ptr<const InnovationDist> make_student_t(double nu);
std::shared_ptr<const InnovationDist> make_skewed_t(double nu, double gamma);

// Plain (unstandardized) Student t helpers.
double t_pdf(double x, double nu);
double t_cdf(double x, double nu);
double t_quantile(double p, double nu);

// Mean and standard deviation of the unstandardized two-piece skewed t
// (scaling parameter gamma applied to a t_nu kernel). Exposed for tests.
void skewed_t_moments(double nu, double gamma, double& mean, double& sd);

// Generalized Pareto for tail excesses y >= 0.
struct GpdParams {
    double xi = 0.0;
    double beta = 1.0;
};

double gpd_logpdf(double y, const GpdParams& g);
double gpd_loglik(const std::vector<double>& excesses, const GpdParams& g);

// Probability-weighted-moment closed form; also the fallback when MLE fails.
GpdParams gpd_fit_pwm(const std::vector<double>& excesses);

// MLE via simplex search started from the PWM estimate, PWM fallback if the
// search does not produce a finite likelihood.
GpdParams gpd_fit(const std::vector<double>& excesses);

} // namespace ebt
