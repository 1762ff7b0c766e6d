#pragma once

#include <cstdint>
#include <vector>

#include "ebt/forecast.hpp"

namespace ebt {

// Scenario generators for the three simulation families used across the test
// and acceptance drivers. All draws run through counter-based streams keyed
// by (seed, purpose), so a configuration maps to one series bit for bit.

// iid standard-backtest scenario: N(0,1) losses. The var/es forecasts start
// from the reference values 1.64 / 2.06, perturbed each day by an 11-point
// uniform noise on {-0.5, -0.4, ..., 0.5}, then scaled by (1 - pct) to
// emulate underestimation.
struct IidScenarioConfig {
    int training = 10; // days before evaluation; doubles as betting warmup
    int n = 1000;      // evaluation days
    double var_underest = 0.0;
    double es_underest = 0.0;
    bool shared_noise = true; // same perturbation for var and es each day
    std::uint64_t seed = 0;
};

struct IidScenarioData {
    std::vector<double> losses; // training + n
    std::vector<double> var_forecast;
    std::vector<double> es_forecast;
    int training = 0;
};

IidScenarioData gen_iid_scenario(const IidScenarioConfig& cfg);

// AR(1)-GARCH(1,1) families, L_t = mu_t + sigma_t Z_t:
//   Stationary:     mu = -0.05 + 0.3 L_prev, sigma2 = 0.01 + 0.1 eps^2 + 0.85 sigma2,
//                   skewed-t innovations (nu 5, gamma 1.5)
//   StructuralVol:  mu = -0.05 + 0.1 L_prev, sigma2 = 0.3 + 0.01 eps^2 + beta_t sigma2,
//                   normal innovations, beta_t = 0.1 before the break and 0.8 after
//   StructuralTail: mu = -0.05 + 0.1 L_prev, sigma2 = 0.3 + 0.1 eps^2 + 0.5 sigma2,
//                   symmetric-t innovations whose shape drops 6 -> 3 at the break
enum class GarchScenarioKind { Stationary, StructuralVol, StructuralTail };

struct GarchScenarioConfig {
    GarchScenarioKind kind = GarchScenarioKind::Stationary;
    int presample = 500;
    int n = 5000;     // evaluation days
    int break_at = 0; // 1-based evaluation day; the shift applies strictly after it
    int burnin = 1000;
    std::uint64_t seed = 0;
};

struct ScenarioData {
    std::vector<double> losses; // presample + evaluation
    int presample = 0;
    OracleState oracle; // generator truth per day, aligned with losses
};

ScenarioData gen_garch_scenario(const GarchScenarioConfig& cfg);

} // namespace ebt
