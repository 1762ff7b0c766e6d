#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ebt/dist.hpp"
#include "ebt/errors.hpp"
#include "ebt/forecast.hpp"
#include "ebt/rng.hpp"
#include "ebt/simulate.hpp"

using namespace ebt;

namespace {

constexpr std::uint64_t kPurposeTest = 150;

double sample_var(const std::vector<double>& w) {
    const double n = double(w.size());
    const double m = std::accumulate(w.begin(), w.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : w) ss += (x - m) * (x - m);
    return ss / (n - 1.0);
}

// independent filter replay against a full innovation distribution object
struct FilterRef {
    std::vector<double> mu, s2;
    double loglik = 0.0, mu_next = 0.0, s2_next = 0.0;
};

FilterRef filter_ref(const std::vector<double>& w, const GarchParams& p,
                     const InnovationDist& d) {
    FilterRef f;
    const std::size_t n = w.size();
    f.mu.resize(n);
    f.s2.resize(n);
    f.mu[0] = w[0];
    f.s2[0] = sample_var(w);
    double eps_prev = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        f.mu[i] = p.phi0 + p.phi1 * w[i - 1];
        f.s2[i] = p.alpha0 + p.alpha1 * eps_prev * eps_prev + p.beta1 * f.s2[i - 1];
        const double eps = w[i] - f.mu[i];
        const double sd = std::sqrt(f.s2[i]);
        f.loglik += d.log_pdf(eps / sd) - std::log(sd);
        eps_prev = eps;
    }
    f.mu_next = p.phi0 + p.phi1 * w[n - 1];
    f.s2_next = p.alpha0 + p.alpha1 * eps_prev * eps_prev + p.beta1 * f.s2[n - 1];
    return f;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// expectile of the empirical law of a sample, solved by bisection on the
// asymmetric first-order condition (independent of the segment-walk solver)
double sample_expectile(const std::vector<double>& v, double p) {
    const auto resid = [&](double a) {
        double pos = 0.0, neg = 0.0;
        for (double x : v) {
            if (x > a) pos += x - a;
            else neg += a - x;
        }
        return p * pos - (1.0 - p) * neg;
    };
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (resid(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> window_slice(const std::vector<double>& v, int i, int w) {
    return {v.begin() + (i - w), v.begin() + i};
}

} // namespace

// ---- filter ----

TEST_CASE("filter pass replays against the innovation densities") {
    Philox rng(3, kPurposeTest);
    std::vector<double> w(60);
    for (double& x : w) x = 0.1 + 0.6 * rng.normal();

    GarchParams p;
    p.phi0 = 0.02;
    p.phi1 = 0.25;
    p.alpha0 = 0.05;
    p.alpha1 = 0.10;
    p.beta1 = 0.80;
    p.nu = 6.0;
    p.gamma = 1.3;

    struct Pair {
        InnovationKind kind;
        std::shared_ptr<const InnovationDist> dist;
    };
    const std::vector<Pair> pairs = {
        {InnovationKind::Normal, make_normal()},
        {InnovationKind::StudentT, make_student_t(6.0)},
        {InnovationKind::SkewedT, make_skewed_t(6.0, 1.3)},
    };
    for (const Pair& pr : pairs) {
        const GarchFilter f = garch_filter(w, p, pr.kind);
        const FilterRef ref = filter_ref(w, p, *pr.dist);
        REQUIRE(f.mu.size() == w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(f.mu[i] == doctest::Approx(ref.mu[i]).epsilon(1e-12));
            CHECK(f.sigma2[i] == doctest::Approx(ref.s2[i]).epsilon(1e-12));
        }
        CHECK(f.loglik == doctest::Approx(ref.loglik).epsilon(1e-10));
        CHECK(f.mu_next == doctest::Approx(ref.mu_next).epsilon(1e-12));
        CHECK(f.sigma2_next == doctest::Approx(ref.s2_next).epsilon(1e-12));
    }

    CHECK_THROWS_AS((void)garch_filter({1.0}, p, InnovationKind::Normal), DataError);
    CHECK_THROWS_AS((void)garch_filter({1.0, 1.0, 1.0}, p, InnovationKind::Normal),
                    DataError); // zero variance
}

// ---- fitting ----

TEST_CASE("cold fit output is internally consistent and clears the flat floor") {
    GarchScenarioConfig gc;
    gc.kind = GarchScenarioKind::Stationary;
    gc.presample = 0;
    gc.n = 800;
    gc.seed = 5;
    const std::vector<double> w = gen_garch_scenario(gc).losses;

    const GarchFit fit = fit_garch(w, InnovationKind::SkewedT, FitPolicy::Cold,
                                   nullptr, 17, 0);
    CHECK_FALSE(fit.used_fallback);
    const GarchFilter f = garch_filter(w, fit.params, InnovationKind::SkewedT);
    CHECK(fit.loglik == doctest::Approx(f.loglik).epsilon(1e-10));
    CHECK(fit.mu_next == doctest::Approx(f.mu_next).epsilon(1e-12));
    CHECK(fit.sigma_next == doctest::Approx(std::sqrt(f.sigma2_next)).epsilon(1e-12));
    REQUIRE(fit.residuals.size() == w.size() - 1);
    for (std::size_t i = 1; i < w.size(); ++i)
        CHECK(fit.residuals[i - 1] ==
              doctest::Approx((w[i] - f.mu[i]) / std::sqrt(f.sigma2[i])).epsilon(1e-10));

    // near-constant-volatility parametrization is the likelihood floor
    GarchParams flat;
    flat.phi0 = std::accumulate(w.begin(), w.end(), 0.0) / double(w.size());
    flat.phi1 = 0.0;
    flat.alpha1 = 1e-4;
    flat.beta1 = 1e-4;
    flat.alpha0 = sample_var(w) * (1.0 - 2e-4);
    const double floor_ll =
        garch_filter(w, flat, InnovationKind::SkewedT).loglik;
    CHECK(fit.loglik >= floor_ll - 1e-9);

    CHECK_THROWS_AS(
        (void)fit_garch(std::vector<double>(10, 0.5), InnovationKind::Normal),
        DataError);
}

TEST_CASE("cold fit recovers the generating dynamics on long windows") {
    const int seeds = 8;
    std::vector<double> e_phi1, e_a1, e_b1, e_nu, e_gamma;
    for (int s = 0; s < seeds; ++s) {
        GarchScenarioConfig gc;
        gc.kind = GarchScenarioKind::Stationary;
        gc.presample = 0;
        gc.n = 4000;
        gc.seed = 200 + s;
        const std::vector<double> w = gen_garch_scenario(gc).losses;
        const GarchFit fit =
            fit_garch(w, InnovationKind::SkewedT, FitPolicy::Cold, nullptr, 31, s);
        e_phi1.push_back(std::abs(fit.params.phi1 - 0.3) / 0.3);
        e_a1.push_back(std::abs(fit.params.alpha1 - 0.1) / 0.1);
        e_b1.push_back(std::abs(fit.params.beta1 - 0.85) / 0.85);
        e_nu.push_back(std::abs(fit.params.nu - 5.0) / 5.0);
        e_gamma.push_back(std::abs(fit.params.gamma - 1.5) / 1.5);
    }
    INFO("medians phi1=" << median_of(e_phi1) << " a1=" << median_of(e_a1)
                         << " b1=" << median_of(e_b1) << " nu=" << median_of(e_nu)
                         << " gamma=" << median_of(e_gamma));
    CHECK(median_of(e_phi1) < 0.15);
    CHECK(median_of(e_b1) < 0.10);
    CHECK(median_of(e_a1) < 0.35);
    CHECK(median_of(e_nu) < 0.35);
    CHECK(median_of(e_gamma) < 0.10);
}

// ---- innovation risk estimators ----

TEST_CASE("parametric risk matches the distribution calls") {
    const auto d = make_skewed_t(5.0, 1.5);
    const double p = 0.975;
    const RiskValue var = innovation_risk(*d, RiskFunctional::VaR, p);
    CHECK(var.r == doctest::Approx(d->quantile(p)).epsilon(1e-13));
    CHECK(std::isnan(var.z));

    const RiskValue ev = innovation_risk(*d, RiskFunctional::EsVar, p);
    CHECK(ev.z == doctest::Approx(d->quantile(p)).epsilon(1e-13));
    CHECK(ev.r == doctest::Approx(d->upper_partial(ev.z) / (1.0 - p)).epsilon(1e-10));
    CHECK(ev.r > ev.z);

    const RiskValue ex = innovation_risk(*d, RiskFunctional::Expectile, 0.96567);
    CHECK(d->expectile_residual(0.96567, ex.r) == doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS((void)innovation_risk(*d, RiskFunctional::VaR, 1.0), ConfigError);
    CHECK_THROWS_AS((void)innovation_risk(*d, RiskFunctional::Mean, 0.9), ConfigError);
}

TEST_CASE("bootstrap risk replays against a mirrored stream") {
    Philox seed_rng(9, kPurposeTest);
    std::vector<double> resid(40);
    for (double& x : resid) x = seed_rng.normal();
    resid[5] = resid[17]; // force a tie

    const int draws = 5000;
    const double p = 0.9;

    Philox rng_a(1234, kPurposeTest, 7);
    const RiskValue var = fhs_risk(resid, RiskFunctional::VaR, p, draws, rng_a);
    Philox rng_b(1234, kPurposeTest, 7);
    const RiskValue ev = fhs_risk(resid, RiskFunctional::EsVar, p, draws, rng_b);
    Philox rng_c(1234, kPurposeTest, 7);
    const RiskValue ex = fhs_risk(resid, RiskFunctional::Expectile, p, draws, rng_c);

    Philox mirror(1234, kPurposeTest, 7);
    std::vector<double> boot(draws);
    for (double& x : boot) x = resid[mirror.below(resid.size())];
    std::sort(boot.begin(), boot.end());
    const std::size_t k = std::size_t(std::ceil(p * draws));
    CHECK(var.r == doctest::Approx(boot[k - 1]).epsilon(1e-14));
    CHECK(ev.z == doctest::Approx(boot[k - 1]).epsilon(1e-14));
    double tail = 0.0;
    for (std::size_t j = k; j < boot.size(); ++j) tail += boot[j];
    CHECK(ev.r == doctest::Approx(tail / double(draws - k)).epsilon(1e-12));
    CHECK(ex.r == doctest::Approx(sample_expectile(boot, p)).epsilon(1e-9));

    // a constant sample has every risk equal to the constant
    const std::vector<double> flat(30, 0.7);
    Philox rng_d(2, kPurposeTest);
    CHECK(fhs_risk(flat, RiskFunctional::VaR, 0.95, 500, rng_d).r ==
          doctest::Approx(0.7));
    CHECK(fhs_risk(flat, RiskFunctional::Expectile, 0.95, 500, rng_d).r ==
          doctest::Approx(0.7));

    Philox rng_e(3, kPurposeTest);
    CHECK_THROWS_AS((void)fhs_risk({}, RiskFunctional::VaR, 0.9, 500, rng_e),
                    DataError);
    CHECK_THROWS_AS((void)fhs_risk(resid, RiskFunctional::VaR, 0.9, 50, rng_e),
                    ConfigError);
    CHECK_THROWS_AS(
        (void)fhs_risk(resid, RiskFunctional::EsVar, 0.99999, 5000, rng_e),
        DataError); // empty tail above the var order statistic
}

TEST_CASE("tail fit risk replays its own threshold arithmetic") {
    Philox rng(13, kPurposeTest);
    const auto gen = make_student_t(5.0);
    std::vector<double> resid(20000);
    for (double& x : resid) x = gen->sample(rng);

    std::vector<double> sorted = resid;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t ku = std::size_t(std::ceil(0.9 * double(n)));
    const double u = sorted[ku - 1];
    std::vector<double> exc;
    for (std::size_t j = ku - 1; j < n; ++j)
        if (sorted[j] > u) exc.push_back(sorted[j] - u);
    const double zeta = double(exc.size()) / double(n);
    const GpdParams g = gpd_fit(exc);

    const double p = 0.99;
    const double var_ref =
        u + g.beta / g.xi * (std::pow((1.0 - p) / zeta, -g.xi) - 1.0);
    const RiskValue var = evt_risk(resid, RiskFunctional::VaR, p);
    CHECK(var.r == doctest::Approx(var_ref).epsilon(1e-10));

    const RiskValue ev = evt_risk(resid, RiskFunctional::EsVar, p);
    CHECK(ev.z == doctest::Approx(var_ref).epsilon(1e-10));
    CHECK(ev.r ==
          doctest::Approx((var_ref + g.beta - g.xi * u) / (1.0 - g.xi)).epsilon(1e-10));

    CHECK_THROWS_AS((void)evt_risk(resid, RiskFunctional::VaR, 0.5), ConfigError);
    CHECK_THROWS_AS(
        (void)evt_risk(std::vector<double>(30, 1.0), RiskFunctional::VaR, 0.99),
        DataError);
}

TEST_CASE("sample and tail estimators agree with closed forms in large samples") {
    Philox rng(19, kPurposeTest);
    const auto gen = make_student_t(5.0);
    std::vector<double> resid(100000);
    for (double& x : resid) x = gen->sample(rng);

    const double p = 0.975;
    const RiskValue fp = innovation_risk(*gen, RiskFunctional::EsVar, p);
    Philox boot_rng(23, kPurposeTest);
    const RiskValue fh =
        fhs_risk(resid, RiskFunctional::EsVar, p, 100000, boot_rng);
    CHECK(fh.z == doctest::Approx(fp.z).epsilon(0.04));
    CHECK(fh.r == doctest::Approx(fp.r).epsilon(0.06));

    const RiskValue fp_ex = innovation_risk(*gen, RiskFunctional::Expectile, 0.99);
    Philox boot_rng2(29, kPurposeTest);
    const RiskValue fh_ex =
        fhs_risk(resid, RiskFunctional::Expectile, 0.99, 100000, boot_rng2);
    CHECK(fh_ex.r == doctest::Approx(fp_ex.r).epsilon(0.06));

    const double pe = 0.99;
    const RiskValue fp99 = innovation_risk(*gen, RiskFunctional::EsVar, pe);
    const RiskValue et = evt_risk(resid, RiskFunctional::EsVar, pe);
    CHECK(et.z == doctest::Approx(fp99.z).epsilon(0.08));
    CHECK(et.r == doctest::Approx(fp99.r).epsilon(0.10));

    const RiskValue fp_xt =
        innovation_risk(*gen, RiskFunctional::Expectile, 0.9995);
    const RiskValue et_xt = evt_risk(resid, RiskFunctional::Expectile, 0.9995);
    CHECK(et_xt.r == doctest::Approx(fp_xt.r).epsilon(0.15));
}

// ---- rolling drivers ----

TEST_CASE("cold rolling replays day by day and matches its parallel variant") {
    GarchScenarioConfig gc;
    gc.kind = GarchScenarioKind::Stationary;
    gc.presample = 0;
    gc.n = 360;
    gc.seed = 37;
    const std::vector<double> losses = gen_garch_scenario(gc).losses;

    RollingConfig cfg;
    cfg.innovation = InnovationKind::Normal;
    cfg.method = ForecastMethod::FP;
    cfg.functional = RiskFunctional::VaR;
    cfg.level = 0.99;
    cfg.window = 300;
    cfg.policy = FitPolicy::Cold;
    cfg.seed = 41;

    const RollingResult serial = rolling_forecast(losses, cfg);
    REQUIRE(serial.first_index == 300);
    REQUIRE(serial.r.size() == 60);
    CHECK(serial.z.empty());

    const auto nd = make_normal();
    for (int i = 300; i < 360; ++i) {
        const GarchFit fit =
            fit_garch(window_slice(losses, i, 300), InnovationKind::Normal,
                      FitPolicy::Cold, nullptr, cfg.seed, std::uint32_t(i));
        const double ref =
            fit.mu_next + fit.sigma_next * innovation_risk(*nd, cfg.functional,
                                                           cfg.level).r;
        CHECK(serial.r[std::size_t(i - 300)] == doctest::Approx(ref).epsilon(1e-13));
    }

    RollingConfig par = cfg;
    par.parallel = true;
    const RollingResult parallel = rolling_forecast(losses, par);
    CHECK(parallel.r == serial.r); // bitwise agreement across schedule layouts
}

TEST_CASE("warm rolling chains fits and counts its fallbacks") {
    GarchScenarioConfig gc;
    gc.kind = GarchScenarioKind::Stationary;
    gc.presample = 0;
    gc.n = 380;
    gc.seed = 43;
    const std::vector<double> losses = gen_garch_scenario(gc).losses;

    RollingConfig cfg;
    cfg.innovation = InnovationKind::Normal;
    cfg.method = ForecastMethod::FP;
    cfg.functional = RiskFunctional::VaR;
    cfg.level = 0.99;
    cfg.window = 300;
    cfg.policy = FitPolicy::Warm;
    cfg.seed = 47;
    const RollingResult warm = rolling_forecast(losses, cfg);

    const auto nd = make_normal();
    GarchParams prev;
    bool have = false;
    int falls = 0;
    for (int i = 300; i < 380; ++i) {
        const GarchFit fit = fit_garch(window_slice(losses, i, 300),
                                       InnovationKind::Normal,
                                       have ? FitPolicy::Warm : FitPolicy::Cold,
                                       have ? &prev : nullptr, cfg.seed,
                                       std::uint32_t(i));
        falls += fit.used_fallback;
        const double ref =
            fit.mu_next + fit.sigma_next * innovation_risk(*nd, cfg.functional,
                                                           cfg.level).r;
        CHECK(warm.r[std::size_t(i - 300)] == doctest::Approx(ref).epsilon(1e-13));
        prev = fit.params;
        have = true;
    }
    CHECK(warm.fallbacks == falls);

    RollingConfig bad = cfg;
    bad.parallel = true;
    CHECK_THROWS_AS((void)rolling_forecast(losses, bad), ConfigError);
}

TEST_CASE("bundled requests match standalone runs and share the resample") {
    GarchScenarioConfig gc;
    gc.kind = GarchScenarioKind::Stationary;
    gc.presample = 0;
    gc.n = 340;
    gc.seed = 53;
    const std::vector<double> losses = gen_garch_scenario(gc).losses;

    RollingConfig base;
    base.innovation = InnovationKind::Normal;
    base.window = 300;
    base.fhs_draws = 2000;
    base.policy = FitPolicy::Cold;
    base.seed = 59;

    const std::vector<RollingRequest> reqs = {
        {ForecastMethod::FP, RiskFunctional::VaR, 0.99},
        {ForecastMethod::FHS, RiskFunctional::VaR, 0.99},
        {ForecastMethod::FHS, RiskFunctional::EsVar, 0.99},
        {ForecastMethod::EVT, RiskFunctional::VaR, 0.99},
    };
    const std::vector<RollingResult> multi =
        rolling_forecast_multi(losses, base, reqs);
    REQUIRE(multi.size() == 4);

    for (std::size_t q = 0; q < reqs.size(); ++q) {
        RollingConfig one = base;
        one.method = reqs[q].method;
        one.functional = reqs[q].functional;
        one.level = reqs[q].level;
        const RollingResult single = rolling_forecast(losses, one);
        CHECK(multi[q].r == single.r);
        CHECK(multi[q].z == single.z);
    }
    // one bootstrap per day: the var leg of the pair is the var request
    CHECK(multi[2].z == multi[1].r);
}

TEST_CASE("oracle forecasts read the generator state exactly") {
    GarchScenarioConfig gc;
    gc.kind = GarchScenarioKind::StructuralTail;
    gc.presample = 100;
    gc.n = 200;
    gc.break_at = 100;
    gc.seed = 61;
    const ScenarioData data = gen_garch_scenario(gc);

    RollingConfig cfg;
    cfg.method = ForecastMethod::Opt;
    cfg.functional = RiskFunctional::EsVar;
    cfg.level = 0.975;
    cfg.window = 50;
    const RollingResult opt = rolling_forecast(data.losses, cfg, &data.oracle);
    REQUIRE(opt.first_index == 50);
    REQUIRE(opt.r.size() == data.losses.size() - 50);

    for (std::size_t d = 0; d < opt.r.size(); ++d) {
        const std::size_t i = d + 50;
        const auto& law = *data.oracle.innovations[std::size_t(data.oracle.regime[i])];
        const RiskValue rv = innovation_risk(law, RiskFunctional::EsVar, 0.975);
        CHECK(opt.r[d] ==
              doctest::Approx(data.oracle.mu[i] + data.oracle.sigma[i] * rv.r)
                  .epsilon(1e-12));
        CHECK(opt.z[d] ==
              doctest::Approx(data.oracle.mu[i] + data.oracle.sigma[i] * rv.z)
                  .epsilon(1e-12));
    }
    // the law switch at the break day feeds through the oracle regime index
    CHECK(data.oracle.regime[100 + 100 - 1] == 0);
    CHECK(data.oracle.regime[100 + 100] == 1);

    CHECK_THROWS_AS((void)rolling_forecast(data.losses, cfg, nullptr), ConfigError);
    OracleState cut = data.oracle;
    cut.mu.pop_back();
    CHECK_THROWS_AS((void)rolling_forecast(data.losses, cfg, &cut), AlignmentError);
}

TEST_CASE("rolling configuration guards") {
    const std::vector<double> losses(100, 0.1);
    RollingConfig cfg;
    cfg.window = 10;
    CHECK_THROWS_AS((void)rolling_forecast(losses, cfg), ConfigError);
    cfg.window = 100;
    CHECK_THROWS_AS((void)rolling_forecast(losses, cfg), DataError);
    cfg.window = 50;
    cfg.level = 1.2;
    CHECK_THROWS_AS((void)rolling_forecast(losses, cfg), ConfigError);
    cfg.level = 0.99;
    cfg.functional = RiskFunctional::Mean;
    CHECK_THROWS_AS((void)rolling_forecast(losses, cfg), ConfigError);
    cfg.functional = RiskFunctional::VaR;
    cfg.method = ForecastMethod::FHS;
    cfg.fhs_draws = 10;
    CHECK_THROWS_AS((void)rolling_forecast(losses, cfg), ConfigError);
    CHECK_THROWS_AS(
        (void)rolling_forecast_multi(losses, cfg, {}), ConfigError);
}
