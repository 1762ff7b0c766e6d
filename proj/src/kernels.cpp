#include "ebt/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "ebt/errors.hpp"

namespace ebt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double pos(double y) { return std::max(y, 0.0); }
inline double neg(double y) { return std::min(y, 0.0); }

inline bool has_z(double z) { return !std::isnan(z); }

void require_z(const char* who, RiskFunctional f, double z) {
    if (functional_dim(f) == 2) {
        if (!has_z(z)) throw DomainError(std::string(who) + ": missing statistic forecast z");
    } else if (has_z(z)) {
        throw DomainError(std::string(who) + ": unexpected z for a one-dimensional functional");
    }
}

void require_level(RiskFunctional f, double p) {
    if (!functional_has_level(f)) return;
    bool expectile_like =
        f == RiskFunctional::Expectile || f == RiskFunctional::ExpectileVariantile;
    double lo = expectile_like ? 0.5 : 0.0;
    if (!(p > 0.0 && p < 1.0) || p < lo)
        throw DomainError("level " + std::to_string(p) + " outside the valid range for " +
                          to_string(f));
}

void require_support(const char* who, double m) {
    if (!(m > 0.0)) throw DomainError(std::string(who) + ": support bound M must be positive");
}

void require_in_support(const char* who, double x, double m) {
    require_support(who, m);
    if (x < -m || x > m)
        throw DomainError(std::string(who) + ": loss " + std::to_string(x) +
                          " outside [-M, M] with M = " + std::to_string(m));
}

// Expectile weight |1 - p - 1{x > r}|.
inline double ex_weight(double p, double x, double r) {
    return (x > r) ? p : (1.0 - p);
}

// Range of the raw bounded expectile kernel over x in [-M, M].
inline double ex_bounded_inf(double p, double r, double m) {
    return (1.0 - p) * neg(-m - r) + p * pos(-m - r);
}
inline double ex_bounded_sup(double p, double r, double m) {
    return (1.0 - p) * neg(m - r) + p * pos(m - r);
}

} // namespace

int functional_dim(RiskFunctional f) {
    switch (f) {
        case RiskFunctional::Mean:
        case RiskFunctional::VaR:
        case RiskFunctional::Expectile:
            return 1;
        case RiskFunctional::MeanVariance:
        case RiskFunctional::EsVar:
        case RiskFunctional::ExpectileVariantile:
            return 2;
    }
    throw ConfigError("unknown functional");
}

bool functional_has_level(RiskFunctional f) {
    return f != RiskFunctional::Mean && f != RiskFunctional::MeanVariance;
}

std::string to_string(RiskFunctional f) {
    switch (f) {
        case RiskFunctional::Mean: return "mean";
        case RiskFunctional::MeanVariance: return "meanvar";
        case RiskFunctional::VaR: return "var";
        case RiskFunctional::EsVar: return "esvar";
        case RiskFunctional::Expectile: return "expectile";
        case RiskFunctional::ExpectileVariantile: return "expvar";
    }
    return "?";
}

std::string to_string(Homogeneity h) {
    switch (h) {
        case Homogeneity::H0: return "h0";
        case Homogeneity::HHalf: return "h1/2";
        case Homogeneity::H1: return "h1";
        case Homogeneity::H2: return "h2";
    }
    return "?";
}

std::string to_string(KernelForm f) {
    return f == KernelForm::Ratio ? "ratio" : "bounded";
}

RiskFunctional functional_from_string(const std::string& s) {
    if (s == "mean") return RiskFunctional::Mean;
    if (s == "meanvar") return RiskFunctional::MeanVariance;
    if (s == "var") return RiskFunctional::VaR;
    if (s == "esvar") return RiskFunctional::EsVar;
    if (s == "expectile") return RiskFunctional::Expectile;
    if (s == "expvar") return RiskFunctional::ExpectileVariantile;
    throw ConfigError("unknown functional '" + s + "'");
}

Homogeneity homogeneity_from_string(const std::string& s) {
    if (s == "h0") return Homogeneity::H0;
    if (s == "h1/2" || s == "hhalf") return Homogeneity::HHalf;
    if (s == "h1") return Homogeneity::H1;
    if (s == "h2") return Homogeneity::H2;
    throw ConfigError("unknown homogeneity '" + s + "'");
}

double eval_identification(const IdentificationKernel& k, double x, double r, double z) {
    require_level(k.functional, k.level);
    require_z("eval_identification", k.functional, z);
    const double p = k.level;
    switch (k.functional) {
        case RiskFunctional::Mean:
            if (k.form == KernelForm::Ratio) {
                if (x < 0.0) throw DomainError("mean ratio kernel: loss must be nonnegative");
                if (!(r > 0.0)) throw DomainError("mean ratio kernel: forecast must be positive");
                return x / r - 1.0;
            }
            require_in_support("mean bounded kernel", x, k.support_bound);
            return x - r;
        case RiskFunctional::MeanVariance: {
            if (!(r > 0.0)) throw DomainError("mean-variance kernel: variance forecast must be positive");
            double d = x - z;
            return d * d / r - 1.0;
        }
        case RiskFunctional::VaR:
            return (x > r ? 1.0 / (1.0 - p) : 0.0) - 1.0;
        case RiskFunctional::EsVar:
            if (!(r > z)) throw DomainError("es-var kernel: need ES forecast above VaR forecast");
            return pos(x - z) / ((1.0 - p) * (r - z)) - 1.0;
        case RiskFunctional::Expectile:
            if (k.form == KernelForm::Ratio) {
                if (x < 0.0) throw DomainError("expectile ratio kernel: loss must be nonnegative");
                if (!(r > 0.0)) throw DomainError("expectile ratio kernel: forecast must be positive");
                return ex_weight(p, x, r) * (x / r - 1.0);
            }
            require_in_support("expectile bounded kernel", x, k.support_bound);
            return ex_weight(p, x, r) * (x - r);
        case RiskFunctional::ExpectileVariantile: {
            if (!(r > 0.0)) throw DomainError("variantile kernel: variantile forecast must be positive");
            double d = x - z;
            double up = pos(d), dn = neg(d);
            return (p * up * up + (1.0 - p) * dn * dn) / r - 1.0;
        }
    }
    throw ConfigError("unknown functional");
}

double identification_infimum(const IdentificationKernel& k, double r, double z) {
    require_level(k.functional, k.level);
    require_z("identification_infimum", k.functional, z);
    const double p = k.level;
    switch (k.functional) {
        case RiskFunctional::Mean:
            if (k.form == KernelForm::Ratio) {
                if (!(r > 0.0)) throw DomainError("mean ratio kernel: forecast must be positive");
                return -1.0;
            }
            require_support("mean bounded kernel", k.support_bound);
            return -k.support_bound - r;
        case RiskFunctional::MeanVariance:
            if (!(r > 0.0)) throw DomainError("mean-variance kernel: variance forecast must be positive");
            return -1.0;
        case RiskFunctional::VaR:
            return -1.0;
        case RiskFunctional::EsVar:
            if (!(r > z)) throw DomainError("es-var kernel: need ES forecast above VaR forecast");
            return -1.0;
        case RiskFunctional::Expectile:
            if (k.form == KernelForm::Ratio) {
                if (!(r > 0.0)) throw DomainError("expectile ratio kernel: forecast must be positive");
                return -(1.0 - p);
            }
            require_support("expectile bounded kernel", k.support_bound);
            return ex_bounded_inf(p, r, k.support_bound);
        case RiskFunctional::ExpectileVariantile:
            if (!(r > 0.0)) throw DomainError("variantile kernel: variantile forecast must be positive");
            return -1.0;
    }
    throw ConfigError("unknown functional");
}

namespace {

// Tight admissible rescaling for the lower member of a bounded kernel. When
// the raw infimum is already nonnegative any weight is valid; 1 keeps the
// payoff on the same scale as the loss.
double bounded_lower_weight(const IdentificationKernel& k, double r) {
    double inf_raw = identification_infimum(k, r);
    return inf_raw < 0.0 ? 1.0 / (-inf_raw) : 1.0;
}

} // namespace

double standard_payoff(const IdentificationKernel& k, double x, double r, double z) {
    double v = eval_identification(k, x, r, z);
    if (k.form == KernelForm::Bounded &&
        (k.functional == RiskFunctional::Mean || k.functional == RiskFunctional::Expectile))
        return bounded_lower_weight(k, r) * v;
    return v;
}

double standard_payoff_infimum(const IdentificationKernel& k, double r, double z) {
    double inf_raw = identification_infimum(k, r, z);
    if (k.form == KernelForm::Bounded &&
        (k.functional == RiskFunctional::Mean || k.functional == RiskFunctional::Expectile))
        return bounded_lower_weight(k, r) * inf_raw;
    return inf_raw;
}

bool supports_two_sided(const IdentificationKernel& k) {
    if (k.functional == RiskFunctional::VaR) return true;
    if ((k.functional == RiskFunctional::Mean || k.functional == RiskFunctional::Expectile) &&
        k.form == KernelForm::Bounded)
        return true;
    return false;
}

TwoSidedPayoff two_sided_payoff(const IdentificationKernel& k, double x, double r) {
    if (!supports_two_sided(k))
        throw ConfigError("two-sided backtest needs VaR or a bounded mean/expectile kernel");
    const double p = k.level;
    TwoSidedPayoff out;
    if (k.functional == RiskFunctional::VaR) {
        require_level(k.functional, p);
        out.lower = (x > r ? 1.0 / (1.0 - p) : 0.0) - 1.0;
        out.upper = 1.0 - (x <= r ? 1.0 / p : 0.0);
        return out;
    }
    double v = eval_identification(k, x, r);
    double m = k.support_bound;
    double sup_raw, lower_w;
    if (k.functional == RiskFunctional::Mean) {
        sup_raw = m - r;
        lower_w = bounded_lower_weight(k, r);
    } else {
        require_level(k.functional, p);
        sup_raw = ex_bounded_sup(p, r, m);
        lower_w = bounded_lower_weight(k, r);
    }
    double upper_w = sup_raw > 0.0 ? 1.0 / sup_raw : 1.0;
    out.lower = lower_w * v;
    out.upper = upper_w * v;
    return out;
}

void validate(const ScoringKernel& k) {
    require_level(k.functional, k.level);
    require_support("scoring kernel", k.support_bound);
    switch (k.functional) {
        case RiskFunctional::Mean:
        case RiskFunctional::MeanVariance:
            if (k.degree != Homogeneity::H2)
                throw ConfigError("only the quadratic scoring kernel exists for " +
                                  to_string(k.functional));
            return;
        case RiskFunctional::VaR:
            if (k.degree != Homogeneity::H1 && k.degree != Homogeneity::H0)
                throw ConfigError("var scoring kernel must be h1 or h0");
            return;
        case RiskFunctional::EsVar:
            if (k.degree != Homogeneity::HHalf && k.degree != Homogeneity::H0)
                throw ConfigError("esvar scoring kernel must be h1/2 or h0");
            return;
        case RiskFunctional::Expectile:
            if (k.degree != Homogeneity::H2 && k.degree != Homogeneity::H0)
                throw ConfigError("expectile scoring kernel must be h2 or h0");
            return;
        case RiskFunctional::ExpectileVariantile:
            throw ConfigError("no scoring kernel for the expectile-variantile pair");
    }
    throw ConfigError("unknown functional");
}

double eval_score(const ScoringKernel& k, double x, double r, double z) {
    validate(k);
    require_z("eval_score", k.functional, z);
    require_in_support("eval_score", x, k.support_bound);
    const double p = k.level;
    switch (k.functional) {
        case RiskFunctional::Mean:
            return (x - r) * (x - r);
        case RiskFunctional::MeanVariance:
            if (r < 0.0) throw DomainError("mean-variance score: variance forecast must be nonnegative");
            return z * (z - 2.0 * x) + r * (r - 2.0 * x * x);
        case RiskFunctional::VaR:
            if (k.degree == Homogeneity::H1)
                return (1.0 - p) * r + (x > r ? x - r : 0.0);
            if (!(r > 0.0)) throw DomainError("var log score: forecast must be positive");
            return (1.0 - p) * std::log(r) + (x > r ? std::log(x / r) : 0.0);
        case RiskFunctional::EsVar:
            if (k.degree == Homogeneity::HHalf) {
                if (!(z > 0.0 && z <= r))
                    throw DomainError("esvar sqrt score: need 0 < VaR forecast <= ES forecast");
                double sr = 2.0 * std::sqrt(r);
                return (x > z ? (x - z) / sr : 0.0) + (1.0 - p) * (r + z) / sr;
            }
            if (!(r > 0.0) || !(z <= r))
                throw DomainError("esvar log score: need positive ES forecast above VaR forecast");
            return (x > z ? (x - z) / r : 0.0) + (1.0 - p) * (z / r - 1.0 + std::log(r));
        case RiskFunctional::Expectile:
            if (k.degree == Homogeneity::H2) {
                double sq = (x > r) ? (x - r) * (x - r) : 0.0;
                return -(1.0 - 2.0 * p) * sq + (1.0 - p) * r * (r - 2.0 * x);
            }
            if (!(r > 0.0)) throw DomainError("expectile log score: forecast must be positive");
            return (x > r ? (1.0 - 2.0 * p) * (std::log(x / r) + 1.0 - x / r) : 0.0) +
                   (1.0 - p) * (std::log(r) - 1.0 + x / r);
        case RiskFunctional::ExpectileVariantile:
            break;
    }
    throw ConfigError("unknown functional");
}

double score_gap_infimum(const ScoringKernel& k, double r, double z, double r_star,
                         double z_star) {
    validate(k);
    require_z("score_gap_infimum", k.functional, z);
    require_z("score_gap_infimum", k.functional, z_star);
    const double p = k.level;
    const double m = k.support_bound;
    switch (k.functional) {
        case RiskFunctional::Mean:
            return -2.0 * m * std::fabs(r - r_star) + r * r - r_star * r_star;
        case RiskFunctional::MeanVariance: {
            if (r < 0.0 || r_star < 0.0)
                throw DomainError("mean-variance score: variance forecasts must be nonnegative");
            // gap(x) = C - 2(z - z*) x - 2(r - r*) x^2; convex iff r* > r, with
            // vertex at x0.
            double cst = r * r - r_star * r_star + z * z - z_star * z_star;
            if (r_star > r) {
                double x0 = (z - z_star) / (2.0 * (r_star - r));
                if (x0 >= -m && x0 <= m)
                    return (z - z_star) * (z - z_star) / (2.0 * (r - r_star)) + cst;
            }
            return -2.0 * m * (m * (r - r_star) + std::fabs(z - z_star)) + cst;
        }
        case RiskFunctional::VaR: {
            if (k.degree == Homogeneity::H1) {
                double base = (1.0 - p) * (r - r_star);
                if (r <= r_star)
                    return base - (std::min(r, -m) - std::min(r_star, -m));
                return base - (std::min(r, m) - std::min(r_star, m));
            }
            if (!(r > 0.0 && r_star > 0.0))
                throw DomainError("var log score: forecasts must be positive");
            double base = (1.0 - p) * std::log(r / r_star);
            if (r > r_star) base -= std::log(std::clamp(m, r_star, r) / r_star);
            return base;
        }
        case RiskFunctional::EsVar: {
            if (k.degree == Homogeneity::HHalf) {
                if (!(z > 0.0 && z <= r) || !(z_star > 0.0 && z_star <= r_star))
                    throw DomainError("esvar sqrt score: need 0 < VaR forecast <= ES forecast");
                double u = 0.5 / std::sqrt(r);
                double us = 0.5 / std::sqrt(r_star);
                double base = (1.0 - p) * ((r + z) * u - (r_star + z_star) * us);
                double slack = (std::max(z, -m) - z) * u; // 0 for in-domain z, kept literal
                if (r <= r_star)
                    return base + slack - pos((std::clamp(z, -m, m) - z_star) * us);
                return base +
                       std::min((m - std::min(z, m)) * u - (m - std::min(z_star, m)) * us,
                                slack);
            }
            if (!(r > 0.0) || !(z <= r) || !(r_star > 0.0) || !(z_star <= r_star))
                throw DomainError("esvar log score: need positive ES forecasts above VaR forecasts");
            double base = (1.0 - p) * (z / r - z_star / r_star + std::log(r / r_star));
            double slack = (std::max(z, -m) - z) / r;
            if (r <= r_star)
                return base + slack - pos((std::clamp(z, -m, m) - z_star) / r_star);
            return base +
                   std::min((m - std::min(z, m)) / r - (m - std::min(z_star, m)) / r_star,
                            slack);
        }
        case RiskFunctional::Expectile: {
            if (k.degree == Homogeneity::H2) {
                double q = 1.0 - 2.0 * p;
                if ((r_star <= r && r <= m) || (r < r_star && r_star < -m))
                    return p * (r * r - r_star * r_star - 2.0 * m * std::fabs(r - r_star));
                if (r >= r_star && r > m) {
                    double d = std::max(m, r_star) - r_star;
                    return (1.0 - p) * (r * r - r_star * r_star - 2.0 * m * (r - r_star)) +
                           q * d * d;
                }
                // remaining case: r < r_star, r_star >= -m
                double d = std::max(-m, r) - r;
                return (1.0 - p) * (r * r - r_star * r_star + 2.0 * m * (r - r_star)) -
                       q * d * d;
            }
            if (!(r > 0.0 && r_star > 0.0))
                throw DomainError("expectile log score: forecasts must be positive");
            if (r <= r_star)
                return (1.0 - p) * (std::log(r / r_star) - m / r + m / r_star);
            double w = std::fabs(1.0 - p - (r <= m ? 1.0 : 0.0));
            double out = w * (std::log(r / r_star) + m / r - m / r_star);
            if (r_star < m && m < r)
                out -= (1.0 - 2.0 * p) * (std::log(m / r_star) + 1.0 - m / r_star);
            return out;
        }
        case RiskFunctional::ExpectileVariantile:
            break;
    }
    throw ConfigError("unknown functional");
}

double h_bound(double gamma) {
    if (gamma >= 0.0) return kInf;
    return -1.0 / gamma;
}

double bayes_statistic_loss(RiskFunctional pair, double x, double z, double level) {
    switch (pair) {
        case RiskFunctional::MeanVariance: {
            double d = x - z;
            return d * d;
        }
        case RiskFunctional::EsVar:
            require_level(pair, level);
            return z + pos(x - z) / (1.0 - level);
        case RiskFunctional::ExpectileVariantile: {
            require_level(pair, level);
            double up = pos(x - z), dn = neg(x - z);
            return level * up * up + (1.0 - level) * dn * dn;
        }
        default:
            throw ConfigError("bayes pair must be meanvar, esvar or expvar");
    }
}

namespace {

// Minimum of the statistic loss over all losses, used to validate weights.
double bayes_loss_floor(RiskFunctional pair, double z) {
    return pair == RiskFunctional::EsVar ? z : 0.0;
}

} // namespace

double bayes_default_h(RiskFunctional pair, double r, double z, double level) {
    (void)level;
    double floor = bayes_loss_floor(pair, z);
    if (!(r > floor))
        throw DomainError("bayes e-statistic: regulatory forecast must exceed the loss floor");
    return 1.0 / (r - floor);
}

double bayes_estat(RiskFunctional pair, double x, double r, double z, double h,
                   double level) {
    if (!(h >= 0.0)) throw DomainError("bayes e-statistic: weight must be nonnegative");
    double floor = bayes_loss_floor(pair, z);
    if (r > floor && h * (r - floor) > 1.0 + 1e-12)
        throw DomainError("bayes e-statistic: weight exceeds the admissible bound");
    return 1.0 + h * (bayes_statistic_loss(pair, x, z, level) - r);
}

} // namespace ebt
