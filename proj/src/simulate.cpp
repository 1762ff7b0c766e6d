#include "ebt/simulate.hpp"

#include <cmath>

#include "ebt/errors.hpp"
#include "ebt/rng.hpp"

namespace ebt {

namespace {

// rng stream purposes owned by this module
constexpr std::uint32_t kPurposeScenario = 1;
constexpr std::uint32_t kPurposeForecastNoise = 2;

} // namespace

IidScenarioData gen_iid_scenario(const IidScenarioConfig& cfg) {
    if (cfg.training < 0) throw ConfigError("training length must be nonnegative");
    if (cfg.n < 1) throw ConfigError("evaluation length must be positive");
    if (!(cfg.var_underest >= 0.0 && cfg.var_underest < 1.0) ||
        !(cfg.es_underest >= 0.0 && cfg.es_underest < 1.0))
        throw ConfigError("underestimation fractions must lie in [0, 1)");

    const std::size_t total = static_cast<std::size_t>(cfg.training + cfg.n);
    IidScenarioData out;
    out.training = cfg.training;
    out.losses.resize(total);
    out.var_forecast.resize(total);
    out.es_forecast.resize(total);

    Philox loss_rng(cfg.seed, kPurposeScenario);
    for (double& x : out.losses) x = loss_rng.normal();

    Philox noise_rng(cfg.seed, kPurposeForecastNoise);
    const auto noise = [&] {
        return (static_cast<double>(noise_rng.below(11)) - 5.0) / 10.0;
    };
    for (std::size_t i = 0; i < total; ++i) {
        const double ev = noise();
        const double ee = cfg.shared_noise ? ev : noise();
        out.var_forecast[i] = (1.64 + ev) * (1.0 - cfg.var_underest);
        out.es_forecast[i] = (2.06 + ee) * (1.0 - cfg.es_underest);
    }
    return out;
}

ScenarioData gen_garch_scenario(const GarchScenarioConfig& cfg) {
    if (cfg.presample < 0) throw ConfigError("presample length must be nonnegative");
    if (cfg.n < 1) throw ConfigError("evaluation length must be positive");
    if (cfg.burnin < 0) throw ConfigError("burnin must be nonnegative");
    if (cfg.break_at < 0 || cfg.break_at > cfg.n)
        throw ConfigError("break day must lie within the evaluation period");

    const double phi0 = -0.05;
    double phi1 = 0.0, a0 = 0.0, a1 = 0.0;
    double beta_pre = 0.0, beta_post = 0.0;
    std::vector<std::shared_ptr<const InnovationDist>> innovations;
    switch (cfg.kind) {
        case GarchScenarioKind::Stationary:
            phi1 = 0.3;
            a0 = 0.01;
            a1 = 0.10;
            beta_pre = beta_post = 0.85;
            innovations = {make_skewed_t(5.0, 1.5)};
            break;
        case GarchScenarioKind::StructuralVol:
            phi1 = 0.1;
            a0 = 0.3;
            a1 = 0.01;
            beta_pre = 0.1;
            beta_post = 0.8;
            innovations = {make_normal()};
            break;
        case GarchScenarioKind::StructuralTail:
            phi1 = 0.1;
            a0 = 0.3;
            a1 = 0.1;
            beta_pre = beta_post = 0.5;
            innovations = {make_skewed_t(6.0, 1.0), make_skewed_t(3.0, 1.0)};
            break;
    }

    const int total = cfg.presample + cfg.n;
    ScenarioData out;
    out.presample = cfg.presample;
    out.losses.resize(static_cast<std::size_t>(total));
    out.oracle.mu.resize(static_cast<std::size_t>(total));
    out.oracle.sigma.resize(static_cast<std::size_t>(total));
    out.oracle.regime.resize(static_cast<std::size_t>(total));
    out.oracle.innovations = innovations;

    Philox rng(cfg.seed, kPurposeScenario);
    // start the recursion at the pre-break stationary point
    double l_prev = phi0 / (1.0 - phi1);
    double s2_prev = a0 / (1.0 - a1 - beta_pre);
    double eps_prev = 0.0;

    for (int k = 0; k < cfg.burnin + total; ++k) {
        const int j = k - cfg.burnin;       // recorded index, < 0 during burnin
        const int e = j - cfg.presample + 1; // 1-based evaluation day
        const bool post = cfg.break_at > 0 && e > cfg.break_at;
        const double beta = post ? beta_post : beta_pre;
        const std::size_t reg = post && innovations.size() > 1 ? 1 : 0;

        const double mu = phi0 + phi1 * l_prev;
        const double s2 = a0 + a1 * eps_prev * eps_prev + beta * s2_prev;
        const double z = innovations[reg]->sample(rng);
        const double eps = std::sqrt(s2) * z;
        const double loss = mu + eps;

        if (j >= 0) {
            const std::size_t u = static_cast<std::size_t>(j);
            out.losses[u] = loss;
            out.oracle.mu[u] = mu;
            out.oracle.sigma[u] = std::sqrt(s2);
            out.oracle.regime[u] = static_cast<int>(reg);
        }
        l_prev = loss;
        eps_prev = eps;
        s2_prev = s2;
    }
    return out;
}

} // namespace ebt
