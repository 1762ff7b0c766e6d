#include "ebt/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "ebt/errors.hpp"
#include "ebt/optim.hpp"

namespace ebt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// E[T 1{T > q}] for a plain t_nu variable.
double t_upper_partial(double q, double nu) {
    return t_pdf(q, nu) * (nu + q * q) / (nu - 1.0);
}

class NormalDist final : public InnovationDist {
  public:
    InnovationKind kind() const override { return InnovationKind::Normal; }
    std::string name() const override { return "normal"; }
    double log_pdf(double z) const override {
        return -0.5 * z * z - 0.91893853320467274178;
    }
    double cdf(double z) const override { return norm_cdf(z); }
    double quantile(double p) const override { return norm_quantile(p); }
    double upper_partial(double a) const override { return norm_pdf(a); }
};

class StudentTDist final : public InnovationDist {
  public:
    explicit StudentTDist(double nu) : nu_(nu), scale_(std::sqrt((nu - 2.0) / nu)) {
        if (!(nu > 2.0)) throw DomainError("student t: need nu > 2 to standardize");
    }
    InnovationKind kind() const override { return InnovationKind::StudentT; }
    std::string name() const override { return "t(" + std::to_string(nu_) + ")"; }
    double log_pdf(double z) const override {
        return std::log(t_pdf(z / scale_, nu_)) - std::log(scale_);
    }
    double cdf(double z) const override { return t_cdf(z / scale_, nu_); }
    double quantile(double p) const override { return scale_ * t_quantile(p, nu_); }
    double upper_partial(double a) const override {
        return scale_ * t_upper_partial(a / scale_, nu_);
    }

  private:
    double nu_;
    double scale_;
};

class SkewedTDist final : public InnovationDist {
  public:
    SkewedTDist(double nu, double gamma) : nu_(nu), gamma_(gamma) {
        if (!(nu > 2.0)) throw DomainError("skewed t: need nu > 2 to standardize");
        if (!(gamma > 0.0)) throw DomainError("skewed t: need gamma > 0");
        skewed_t_moments(nu, gamma, mean_, sd_);
        norm_ = 2.0 / (gamma_ + 1.0 / gamma_);
        left_mass_ = 1.0 / (gamma_ * gamma_ + 1.0);
    }
    InnovationKind kind() const override { return InnovationKind::SkewedT; }
    std::string name() const override {
        return "st(" + std::to_string(nu_) + "," + std::to_string(gamma_) + ")";
    }
    double log_pdf(double z) const override {
        double x = mean_ + sd_ * z;
        double core = (x >= 0.0) ? t_pdf(x / gamma_, nu_) : t_pdf(gamma_ * x, nu_);
        return std::log(norm_) + std::log(core) + std::log(sd_);
    }
    double cdf(double z) const override {
        double x = mean_ + sd_ * z;
        if (x < 0.0) return 2.0 * left_mass_ * t_cdf(gamma_ * x, nu_);
        return left_mass_ +
               (1.0 - left_mass_) * 2.0 * (t_cdf(x / gamma_, nu_) - 0.5);
    }
    double quantile(double p) const override {
        double x;
        if (p < left_mass_) {
            x = t_quantile(p / (2.0 * left_mass_), nu_) / gamma_;
        } else {
            double q = 0.5 + (p - left_mass_) / (2.0 * (1.0 - left_mass_));
            x = gamma_ * t_quantile(q, nu_);
        }
        return (x - mean_) / sd_;
    }
    double upper_partial(double a) const override {
        double x = mean_ + sd_ * a;
        double g2 = gamma_ * gamma_;
        double partial_x;
        if (x >= 0.0) {
            partial_x = norm_ * g2 * t_upper_partial(x / gamma_, nu_);
        } else {
            double pm0 = t_upper_partial(0.0, nu_);
            partial_x =
                norm_ * (g2 * pm0 + (t_upper_partial(gamma_ * x, nu_) - pm0) / g2);
        }
        double surv = 1.0 - cdf(a);
        return (partial_x - mean_ * surv) / sd_;
    }

  private:
    double nu_;
    double gamma_;
    double mean_ = 0.0;
    double sd_ = 1.0;
    double norm_ = 1.0;      // 2 / (gamma + 1/gamma)
    double left_mass_ = 0.5; // P(X < 0) = 1 / (gamma^2 + 1)
};

} // namespace

double t_pdf(double x, double nu) {
    boost::math::students_t_distribution<double> d(nu);
    return boost::math::pdf(d, x);
}

double t_cdf(double x, double nu) {
    boost::math::students_t_distribution<double> d(nu);
    return boost::math::cdf(d, x);
}

double t_quantile(double p, double nu) {
    boost::math::students_t_distribution<double> d(nu);
    return boost::math::quantile(d, p);
}

void skewed_t_moments(double nu, double gamma, double& mean, double& sd) {
    double m1 = 2.0 * std::sqrt(nu) *
                std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                (std::sqrt(M_PI) * (nu - 1.0));
    double m2 = nu / (nu - 2.0);
    double g = gamma;
    double ig = 1.0 / gamma;
    mean = m1 * (g - ig);
    double ex2 = m2 * (g * g * g + ig * ig * ig) / (g + ig);
    double var = ex2 - mean * mean;
    if (!(var > 0.0)) throw NumericError("skewed t: nonpositive variance");
    sd = std::sqrt(var);
}

double InnovationDist::es(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("es: level outside (0,1)");
    return upper_partial(quantile(p)) / (1.0 - p);
}

double InnovationDist::expectile_residual(double p, double a) const {
    double up = upper_partial(a);
    double gain = up - a * (1.0 - cdf(a));   // E[(Z-a)_+]
    double shortfall = a * cdf(a) + up;      // E[(a-Z)_+], mean-zero identity
    return p * gain - (1.0 - p) * shortfall;
}

double InnovationDist::expectile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("expectile: level outside (0,1)");
    double lo = -2.0, hi = 2.0;
    while (expectile_residual(p, lo) < 0.0) {
        lo *= 2.0;
        if (lo < -1e12) throw NumericError("expectile: bracket failure");
    }
    while (expectile_residual(p, hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw NumericError("expectile: bracket failure");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::fabs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (expectile_residual(p, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::shared_ptr<const InnovationDist> make_normal() {
    return std::make_shared<NormalDist>();
}

std::shared_ptr<const InnovationDist> make_student_t(double nu) {
    return std::make_shared<StudentTDist>(nu);
}

std::shared_ptr<const InnovationDist> make_skewed_t(double nu, double gamma) {
    return std::make_shared<SkewedTDist>(nu, gamma);
}

double gpd_logpdf(double y, const GpdParams& g) {
    if (y < 0.0 || !(g.beta > 0.0)) return -kInf;
    if (std::fabs(g.xi) < 1e-12) return -std::log(g.beta) - y / g.beta;
    double u = 1.0 + g.xi * y / g.beta;
    if (u <= 0.0) return -kInf;
    return -std::log(g.beta) - (1.0 + 1.0 / g.xi) * std::log(u);
}

double gpd_loglik(const std::vector<double>& excesses, const GpdParams& g) {
    double ll = 0.0;
    for (double y : excesses) ll += gpd_logpdf(y, g);
    return ll;
}

GpdParams gpd_fit_pwm(const std::vector<double>& excesses) {
    const std::size_t n = excesses.size();
    if (n < 2) throw FitError("gpd: too few excesses");
    std::vector<double> y(excesses);
    std::sort(y.begin(), y.end());
    // b1 estimates E[Y (1 - F(Y))], so ascending order statistics carry the
    // survivor plotting position, not the cdf one.
    double b0 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        b0 += y[i];
        b1 += y[i] * double(n - 1 - i) / double(n - 1);
    }
    b0 /= double(n);
    b1 /= double(n);
    double denom = b0 - 2.0 * b1;
    if (std::fabs(denom) < 1e-14) return {0.0, b0};
    double t = b0 / denom;
    GpdParams g;
    g.xi = 2.0 - t;
    g.beta = b0 * (t - 1.0);
    if (!(g.beta > 0.0)) return {0.0, std::max(b0, 1e-12)};
    return g;
}

GpdParams gpd_fit(const std::vector<double>& excesses) {
    if (excesses.size() < 5) throw FitError("gpd: too few excesses for MLE");
    GpdParams start = gpd_fit_pwm(excesses);
    auto obj = [&](const std::vector<double>& v) {
        GpdParams g{v[0], std::exp(v[1])};
        return -gpd_loglik(excesses, g);
    };
    NelderMeadOptions opt;
    opt.max_evals = 4000;
    auto best = nelder_mead(obj, {start.xi, std::log(std::max(start.beta, 1e-12))},
                            {0.1, 0.2}, opt);
    auto alt = nelder_mead(obj, {0.1, std::log(std::max(start.beta, 1e-12))},
                           {0.1, 0.2}, opt);
    if (alt.fval < best.fval) best = alt;
    if (!std::isfinite(best.fval)) return start;
    return {best.x[0], std::exp(best.x[1])};
}

} // namespace ebt
