// Benchmark: serial vs parallel heatmap evaluation on a simulated panel.
// The parallel path must reproduce the serial results bit for bit; cells are
// independent, so the only acceptable difference is wall time.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ebt/backtests.hpp"
#include "ebt/simulate.hpp"

namespace {

using namespace ebt;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// A roster of oracle-shaped models whose forecasts differ by fixed scale
// factors. Cheap to build (no fitting) but each cell still runs a full
// comparative backtest, which is what the parallel loop distributes.
std::vector<ModelForecasts> scaled_roster(const ScenarioData& data,
                                          const std::vector<double>& scales,
                                          double level) {
    const std::size_t pre = static_cast<std::size_t>(data.presample);
    const std::size_t n = data.losses.size() - pre;
    std::vector<ModelForecasts> models;
    for (double s : scales) {
        ModelForecasts m;
        m.name = "scale-" + std::to_string(s);
        m.r.resize(n);
        m.z.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double mu = data.oracle.mu[pre + i];
            const double sd = data.oracle.sigma[pre + i];
            const InnovationDist& d = *data.oracle.innovations[0];
            m.z[i] = s * (mu + sd * d.quantile(level));
            m.r[i] = s * (mu + sd * d.es(level));
        }
        models.push_back(std::move(m));
    }
    return models;
}

} // namespace

int main(int argc, char** argv) {
    int n = 2000;
    if (argc > 1) n = std::atoi(argv[1]);
    if (n < 200) n = 200;

    GarchScenarioConfig sc;
    sc.kind = GarchScenarioKind::Stationary;
    sc.presample = 200;
    sc.n = n;
    sc.seed = 99;
    const ScenarioData data = gen_garch_scenario(sc);
    std::vector<double> losses(data.losses.begin() + data.presample,
                               data.losses.end());

    const double level = 0.975;
    const std::vector<ModelForecasts> models =
        scaled_roster(data, {0.90, 0.95, 1.00, 1.05, 1.10, 1.20}, level);

    ComparativeConfig cfg;
    cfg.kernel.functional = RiskFunctional::EsVar;
    cfg.kernel.degree = Homogeneity::HHalf;
    cfg.kernel.level = level;
    double mx = 0.0;
    for (double x : losses) mx = std::max(mx, std::abs(x));
    cfg.kernel.support_bound = 1.5 * mx;

    auto t0 = clock_type::now();
    const HeatmapResult serial = heatmap(losses, models, cfg, false);
    const double t_serial = seconds_since(t0);

    t0 = clock_type::now();
    const HeatmapResult parallel = heatmap(losses, models, cfg, true);
    const double t_parallel = seconds_since(t0);

    bool identical = true;
    for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = 0; j < models.size(); ++j) {
            const ZoneVerdict& a = serial.grid[i][j];
            const ZoneVerdict& b = parallel.grid[i][j];
            if (a.zone != b.zone || a.sup_minus != b.sup_minus ||
                a.sup_plus != b.sup_plus || a.tau_minus != b.tau_minus ||
                a.tau_plus != b.tau_plus)
                identical = false;
        }

    int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
#pragma omp single
    threads = omp_get_num_threads();
#endif

    std::printf("cells      : %zux%zu over %d days\n", models.size(),
                models.size(), n);
    std::printf("threads    : %d\n", threads);
    std::printf("serial     : %.3f s\n", t_serial);
    std::printf("parallel   : %.3f s\n", t_parallel);
    std::printf("speedup    : %.2fx\n", t_serial / std::max(t_parallel, 1e-9));
    std::printf("bit match  : %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
