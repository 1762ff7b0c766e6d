// Command-line front end: scenario simulation, rolling forecasts, standard
// and comparative backtests, heatmaps, and the iid rejection-rate table.
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ebt/backtests.hpp"
#include "ebt/errors.hpp"
#include "ebt/forecast.hpp"
#include "ebt/io.hpp"
#include "ebt/simulate.hpp"
#include "ebt/version.hpp"

namespace {

using namespace ebt;

namespace fs = std::filesystem;

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

// Default support bound for ingested data: 1.5x the largest loss magnitude
// over the days before the first forecast day; whole series when forecasts
// start at day one. An explicit --support-bound keeps the bound predictable.
double auto_support_bound(const std::vector<double>& losses, int first_index) {
    double mx = 0.0;
    const std::size_t until =
        first_index > 0 ? static_cast<std::size_t>(first_index) : losses.size();
    for (std::size_t i = 0; i < until; ++i) mx = std::max(mx, std::abs(losses[i]));
    const double m = 1.5 * mx;
    return m > 0.0 ? m : 1.0;
}

struct RestartFlags {
    std::vector<int> at;
    double alpha = 0.0;
    bool no_reset_betting = false;

    RestartPolicy build() const {
        RestartPolicy p;
        if (!at.empty() && alpha > 0.0)
            throw ConfigError("--restart-at and --restart-alpha are exclusive");
        if (!at.empty()) {
            p.kind = RestartPolicy::Kind::AtFixedTimes;
            p.times = at;
        } else if (alpha > 0.0) {
            p.kind = RestartPolicy::Kind::AtRejection;
            p.alpha = alpha;
        }
        p.reset_betting = !no_reset_betting;
        return p;
    }
};

void add_restart_flags(CLI::App* cmd, RestartFlags& rf) {
    cmd->add_option("--restart-at", rf.at,
                    "restart the e-process after these days (comma separated)")
        ->delimiter(',');
    cmd->add_option("--restart-alpha", rf.alpha,
                    "restart whenever wealth crosses 1/alpha");
    cmd->add_flag("--no-reset-betting", rf.no_reset_betting,
                  "keep betting history across restarts");
}

struct BettingFlags {
    std::string scheme = "taylor";
    double fraction = -1.0; // -1: pick the mode default
    int warmup = 1;
    bool cached = false;
    double search_upper = 1e3;

    BettingConfig build(double default_fraction) const {
        BettingConfig b;
        if (scheme == "taylor")
            b.scheme = BettingConfig::Scheme::Taylor;
        else if (scheme == "exact")
            b.scheme = BettingConfig::Scheme::Exact;
        else
            throw ConfigError("unknown betting scheme '" + scheme + "'");
        b.fraction = fraction > 0.0 ? fraction : default_fraction;
        b.warmup = warmup;
        b.cached_payoffs = cached;
        b.search_upper = search_upper;
        return b;
    }
};

void add_betting_flags(CLI::App* cmd, BettingFlags& bf) {
    cmd->add_option("--scheme", bf.scheme, "betting scheme: taylor or exact");
    cmd->add_option("--fraction", bf.fraction,
                    "truncation fraction c (default: 1.0 standard, 0.5 comparative)");
    cmd->add_option("--warmup", bf.warmup, "days without betting at the start");
    cmd->add_flag("--cached-payoffs", bf.cached,
                  "freeze history payoffs at their own day's forecasts");
    cmd->add_option("--search-upper", bf.search_upper,
                    "upper bracket for the exact log-wealth search");
}

Homogeneity default_degree(RiskFunctional f) {
    switch (f) {
        case RiskFunctional::VaR: return Homogeneity::H1;
        case RiskFunctional::EsVar: return Homogeneity::HHalf;
        default: return Homogeneity::H2;
    }
}

// Aligns forecast series to the tail of the loss series they were issued
// for. Series must end at the final loss day; runs start where every series
// has values.
struct Aligned {
    std::vector<double> losses;
    int offset = 0; // losses dropped from the front
};

Aligned align_tail(const std::vector<double>& losses, const ForecastSeries& fs) {
    const int T = static_cast<int>(losses.size());
    const int n = static_cast<int>(fs.r.size());
    if (fs.first_index + n != T)
        throw DataError("forecast series does not end at the final loss day");
    Aligned a;
    a.offset = fs.first_index;
    a.losses.assign(losses.begin() + fs.first_index, losses.end());
    return a;
}

int run(int argc, char** argv) {
    CLI::App app{"e-value backtesting for identifiable risk measures"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    const std::vector<std::string> args(argv + 1, argv + argc);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "generate a scenario data set");
    std::string sim_kind = "iid", sim_out = ".";
    std::uint64_t sim_seed = 1;
    int sim_n = 0, sim_presample = 500, sim_training = 10, sim_break = 0;
    double sim_var_u = 0.0, sim_es_u = 0.0;
    std::string sim_opt; // "functional:level" for oracle forecasts
    int sim_window = 500;
    sim->add_option("--scenario", sim_kind,
                    "iid | stationary | structural-vol | structural-tail")
        ->required();
    sim->add_option("--seed", sim_seed, "scenario seed");
    sim->add_option("--n", sim_n, "evaluation days (default per scenario)");
    sim->add_option("--presample", sim_presample, "presample days (garch families)");
    sim->add_option("--training", sim_training, "training days (iid)");
    sim->add_option("--break-at", sim_break,
                    "evaluation day after which the structural shift applies");
    sim->add_option("--var-underest", sim_var_u, "iid var underestimation pct");
    sim->add_option("--es-underest", sim_es_u, "iid es underestimation pct");
    sim->add_option("--opt-forecasts", sim_opt,
                    "also write oracle forecasts, e.g. esvar:0.975");
    sim->add_option("--window", sim_window, "window backing the oracle start day");
    sim->add_option("--out", sim_out, "output directory")->required();

    // ---- forecast ----
    auto* fc = app.add_subcommand("forecast", "rolling risk forecasts from losses");
    std::string fc_losses, fc_innovation = "n", fc_method = "fp";
    std::string fc_functional = "var", fc_out = ".", fc_name;
    double fc_level = 0.99;
    int fc_window = 500, fc_draws = 10000;
    std::uint64_t fc_seed = 1;
    bool fc_cold = false;
    fc->add_option("--losses", fc_losses, "losses csv")->required();
    fc->add_option("--innovation", fc_innovation, "n | t | st");
    fc->add_option("--method", fc_method, "fp | fhs | evt");
    fc->add_option("--functional", fc_functional, "var | esvar | expectile");
    fc->add_option("--level", fc_level, "risk level in (0, 1)");
    fc->add_option("--window", fc_window, "rolling window length");
    fc->add_option("--draws", fc_draws, "bootstrap draws for fhs");
    fc->add_option("--seed", fc_seed, "seed for bootstrap and fit restarts");
    fc->add_flag("--cold", fc_cold, "refit from scratch daily (no warm starts)");
    fc->add_option("--name", fc_name, "model name (default <innovation>-<method>)");
    fc->add_option("--out", fc_out, "output directory")->required();

    // ---- backtest ----
    auto* bt = app.add_subcommand("backtest", "standard or comparative backtest");
    std::string bt_losses, bt_forecasts, bt_standard, bt_out = ".";
    std::string bt_form = "ratio", bt_degree;
    double bt_support = 0.0, bt_alpha = 0.5;
    bool bt_two_sided = false;
    std::vector<double> bt_thresholds{2.0, 5.0, 10.0, 20.0};
    std::vector<double> bt_extra;
    BettingFlags bt_bet;
    RestartFlags bt_restart;
    bt->add_option("--losses", bt_losses, "losses csv")->required();
    bt->add_option("--forecasts", bt_forecasts, "forecasts under test (csv)")
        ->required();
    bt->add_option("--standard-forecasts", bt_standard,
                   "benchmark forecasts; presence switches to comparative mode");
    bt->add_option("--form", bt_form, "identification form: ratio | bounded");
    bt->add_option("--degree", bt_degree,
                   "score homogeneity: h0 | h1/2 | h1 | h2 (comparative)");
    bt->add_option("--support-bound", bt_support,
                   "loss support bound M (default: 1.5x max |loss| before the "
                   "first forecast day)");
    bt->add_flag("--two-sided", bt_two_sided, "two-sided standard backtest");
    bt->add_option("--thresholds", bt_thresholds, "standard rejection thresholds")
        ->delimiter(',');
    bt->add_option("--alpha", bt_alpha, "comparative significance level");
    bt->add_option("--extra-thresholds", bt_extra,
                   "additional tracked thresholds (comparative)")
        ->delimiter(',');
    add_betting_flags(bt, bt_bet);
    add_restart_flags(bt, bt_restart);
    bt->add_option("--out", bt_out, "output directory")->required();

    // ---- heatmap ----
    auto* hm = app.add_subcommand("heatmap", "verdict matrix over a model roster");
    std::string hm_losses, hm_out = ".", hm_degree;
    std::vector<std::string> hm_roster;
    double hm_support = 0.0, hm_alpha = 0.5;
    bool hm_serial = false;
    BettingFlags hm_bet;
    RestartFlags hm_restart;
    hm->add_option("--losses", hm_losses, "losses csv")->required();
    hm->add_option("--roster", hm_roster, "forecast csvs (comma separated)")
        ->delimiter(',')
        ->required();
    hm->add_option("--degree", hm_degree, "score homogeneity (default per functional)");
    hm->add_option("--support-bound", hm_support, "loss support bound M");
    hm->add_option("--alpha", hm_alpha, "significance level");
    hm->add_flag("--serial", hm_serial, "disable the parallel cell loop");
    add_betting_flags(hm, hm_bet);
    add_restart_flags(hm, hm_restart);
    hm->add_option("--out", hm_out, "output directory")->required();

    // ---- table1 ----
    auto* tb = app.add_subcommand(
        "table1", "iid rejection-rate table across underestimation scenarios");
    std::uint64_t tb_seed = 1;
    int tb_runs = 200, tb_n = 1000, tb_training = 10;
    std::string tb_out;
    tb->add_option("--seed", tb_seed, "base seed; run k uses seed + k");
    tb->add_option("--runs", tb_runs, "independent runs per scenario");
    tb->add_option("--n", tb_n, "evaluation days per run");
    tb->add_option("--training", tb_training, "training days per run");
    tb->add_option("--out", tb_out, "output directory (optional)");

    CLI11_PARSE(app, argc, argv);

    // ---- simulate ----
    if (*sim) {
        RunMeta meta;
        meta.command = "simulate";
        meta.seed = sim_seed;
        meta.note = sim_kind;
        if (sim_kind == "iid") {
            IidScenarioConfig cfg;
            cfg.seed = sim_seed;
            cfg.training = sim_training;
            if (sim_n > 0) cfg.n = sim_n;
            cfg.var_underest = sim_var_u;
            cfg.es_underest = sim_es_u;
            const IidScenarioData data = gen_iid_scenario(cfg);
            meta.functional = "esvar";
            meta.level = 0.95;
            const Manifest man = build_manifest(meta, args);
            write_text_file(out_path(sim_out, "manifest.json"), man.text);
            write_losses_csv(out_path(sim_out, "losses.csv"), data.losses, man.hash);
            ForecastSeries fs;
            fs.method = "fixed";
            fs.functional = "esvar";
            fs.level = 0.95;
            fs.first_index = 0;
            fs.r = data.es_forecast;
            fs.z = data.var_forecast;
            write_forecasts_csv(out_path(sim_out, "forecasts.csv"), fs, man.hash);
            std::cout << "wrote " << data.losses.size() << " days to " << sim_out
                      << "\n";
            return 0;
        }
        GarchScenarioConfig cfg;
        cfg.seed = sim_seed;
        cfg.presample = sim_presample;
        if (sim_kind == "stationary") {
            cfg.kind = GarchScenarioKind::Stationary;
            cfg.n = sim_n > 0 ? sim_n : 5000;
        } else if (sim_kind == "structural-vol" || sim_kind == "structural-tail") {
            cfg.kind = sim_kind == "structural-vol" ? GarchScenarioKind::StructuralVol
                                                    : GarchScenarioKind::StructuralTail;
            cfg.n = sim_n > 0 ? sim_n : 4000;
            cfg.break_at = sim_break > 0 ? sim_break : cfg.n / 2;
        } else {
            throw ConfigError("unknown scenario '" + sim_kind + "'");
        }
        const ScenarioData data = gen_garch_scenario(cfg);
        const Manifest man = build_manifest(meta, args);
        write_text_file(out_path(sim_out, "manifest.json"), man.text);
        write_losses_csv(out_path(sim_out, "losses.csv"), data.losses, man.hash);
        if (!sim_opt.empty()) {
            const std::size_t colon = sim_opt.find(':');
            if (colon == std::string::npos)
                throw ConfigError("--opt-forecasts wants functional:level");
            RollingConfig rc;
            rc.method = ForecastMethod::Opt;
            rc.functional = functional_from_string(sim_opt.substr(0, colon));
            rc.level = std::stod(sim_opt.substr(colon + 1));
            rc.window = sim_window;
            const RollingResult rr =
                rolling_forecast(data.losses, rc, &data.oracle);
            ForecastSeries fs;
            fs.method = "opt";
            fs.functional = to_string(rc.functional);
            fs.level = rc.level;
            fs.first_index = rr.first_index;
            fs.r = rr.r;
            fs.z = rr.z;
            write_forecasts_csv(out_path(sim_out, "opt.csv"), fs, man.hash);
        }
        std::cout << "wrote " << data.losses.size() << " days to " << sim_out
                  << "\n";
        return 0;
    }

    // ---- forecast ----
    if (*fc) {
        const std::vector<double> losses = read_losses_csv(fc_losses);
        RollingConfig rc;
        rc.innovation = innovation_from_string(fc_innovation);
        rc.method = forecast_method_from_string(fc_method);
        if (rc.method == ForecastMethod::Opt)
            throw ConfigError("oracle forecasts come from the simulate command");
        rc.functional = functional_from_string(fc_functional);
        rc.level = fc_level;
        rc.window = fc_window;
        rc.fhs_draws = fc_draws;
        rc.policy = fc_cold ? FitPolicy::Cold : FitPolicy::Warm;
        rc.seed = fc_seed;
        const RollingResult rr = rolling_forecast(losses, rc);
        const std::string name = !fc_name.empty()
                                     ? fc_name
                                     : to_string(rc.innovation) + "-" +
                                           to_string(rc.method);
        RunMeta meta;
        meta.command = "forecast";
        meta.functional = to_string(rc.functional);
        meta.level = rc.level;
        meta.note = name;
        meta.seed = fc_seed;
        meta.inputs = {fc_losses};
        const Manifest man = build_manifest(meta, args);
        write_text_file(out_path(fc_out, name + ".manifest.json"), man.text);
        ForecastSeries fs;
        fs.method = name;
        fs.functional = to_string(rc.functional);
        fs.level = rc.level;
        fs.first_index = rr.first_index;
        fs.r = rr.r;
        fs.z = rr.z;
        write_forecasts_csv(out_path(fc_out, name + ".csv"), fs, man.hash);
        std::cout << "wrote " << rr.r.size() << " forecasts (" << rr.fallbacks
                  << " cold fallbacks) to " << fc_out << "\n";
        return 0;
    }

    // ---- backtest ----
    if (*bt) {
        const std::vector<double> losses = read_losses_csv(bt_losses);
        const ForecastSeries fsi = read_forecasts_csv(bt_forecasts);
        const RiskFunctional functional = functional_from_string(fsi.functional);
        const bool comparative = !bt_standard.empty();
        RunMeta meta;
        meta.command = comparative ? "backtest-comparative" : "backtest-standard";
        meta.functional = fsi.functional;
        meta.level = fsi.level;
        meta.inputs = {bt_losses, bt_forecasts};

        if (!comparative) {
            const Aligned a = align_tail(losses, fsi);
            BacktestInput in;
            in.losses = a.losses;
            in.r = fsi.r;
            in.z = fsi.z;
            StandardConfig cfg;
            cfg.kernel.functional = functional;
            cfg.kernel.level = fsi.level;
            cfg.kernel.form =
                bt_form == "bounded" ? KernelForm::Bounded : KernelForm::Ratio;
            cfg.kernel.support_bound =
                bt_support > 0.0 ? bt_support
                                 : auto_support_bound(losses, a.offset);
            cfg.betting = bt_bet.build(1.0);
            cfg.restart = bt_restart.build();
            cfg.thresholds = bt_thresholds;
            cfg.two_sided = bt_two_sided;
            meta.support_bound = cfg.kernel.support_bound;
            const StandardRunResult run = run_standard(in, cfg);
            const Manifest man = build_manifest(meta, args);
            write_text_file(out_path(bt_out, "manifest.json"), man.text);
            write_standard_eprocess_csv(out_path(bt_out, "eprocess.csv"), in, run,
                                        man.hash);
            write_text_file(out_path(bt_out, "summary.json"),
                            standard_summary_json(cfg, run, man.hash));
            std::cout << "sup " << format_double(run.sup) << ", rejections "
                      << run.rejection_count << "\n";
            return 0;
        }

        const ForecastSeries fss = read_forecasts_csv(bt_standard);
        if (fss.functional != fsi.functional || fss.level != fsi.level)
            throw DataError("forecast files disagree on functional or level");
        meta.inputs.push_back(bt_standard);
        const int start = std::max(fsi.first_index, fss.first_index);
        const int T = static_cast<int>(losses.size());
        if (fsi.first_index + static_cast<int>(fsi.r.size()) != T ||
            fss.first_index + static_cast<int>(fss.r.size()) != T)
            throw DataError("forecast series do not end at the final loss day");
        ComparativePair pair;
        pair.losses.assign(losses.begin() + start, losses.end());
        const auto tail = [&](const std::vector<double>& v, int first) {
            return std::vector<double>(v.begin() + (start - first), v.end());
        };
        pair.r = tail(fsi.r, fsi.first_index);
        pair.r_star = tail(fss.r, fss.first_index);
        if (!fsi.z.empty()) pair.z = tail(fsi.z, fsi.first_index);
        if (!fss.z.empty()) pair.z_star = tail(fss.z, fss.first_index);
        ComparativeConfig cfg;
        cfg.kernel.functional = functional;
        cfg.kernel.degree = bt_degree.empty() ? default_degree(functional)
                                              : homogeneity_from_string(bt_degree);
        cfg.kernel.level = fsi.level;
        cfg.kernel.support_bound =
            bt_support > 0.0 ? bt_support : auto_support_bound(losses, start);
        cfg.betting = bt_bet.build(0.5);
        cfg.restart = bt_restart.build();
        cfg.alpha = bt_alpha;
        cfg.extra_thresholds = bt_extra;
        meta.support_bound = cfg.kernel.support_bound;
        const ComparativeRunResult run = run_comparative(pair, cfg);
        const Manifest man = build_manifest(meta, args);
        write_text_file(out_path(bt_out, "manifest.json"), man.text);
        write_comparative_eprocess_csv(out_path(bt_out, "eprocess.csv"), pair, run,
                                       man.hash);
        write_text_file(out_path(bt_out, "verdict.json"),
                        comparative_verdict_json(cfg, run, man.hash));
        std::cout << "zone " << to_string(run.verdict.zone) << ", sup- "
                  << format_double(run.sup_minus) << ", sup+ "
                  << format_double(run.sup_plus) << "\n";
        return 0;
    }

    // ---- heatmap ----
    if (*hm) {
        const std::vector<double> losses = read_losses_csv(hm_losses);
        if (hm_roster.empty()) throw ConfigError("empty roster");
        std::vector<ForecastSeries> series;
        for (const std::string& p : hm_roster) series.push_back(read_forecasts_csv(p));
        const int T = static_cast<int>(losses.size());
        int start = 0;
        for (const ForecastSeries& s : series) {
            if (s.first_index + static_cast<int>(s.r.size()) != T)
                throw DataError("a roster series does not end at the final loss day");
            if (s.functional != series[0].functional || s.level != series[0].level)
                throw DataError("roster files disagree on functional or level");
            start = std::max(start, s.first_index);
        }
        std::vector<ModelForecasts> models;
        for (const ForecastSeries& s : series) {
            ModelForecasts m;
            m.name = s.method;
            m.r.assign(s.r.begin() + (start - s.first_index), s.r.end());
            if (!s.z.empty())
                m.z.assign(s.z.begin() + (start - s.first_index), s.z.end());
            models.push_back(std::move(m));
        }
        const RiskFunctional functional =
            functional_from_string(series[0].functional);
        ComparativeConfig cfg;
        cfg.kernel.functional = functional;
        cfg.kernel.degree = hm_degree.empty() ? default_degree(functional)
                                              : homogeneity_from_string(hm_degree);
        cfg.kernel.level = series[0].level;
        cfg.kernel.support_bound =
            hm_support > 0.0 ? hm_support : auto_support_bound(losses, start);
        cfg.betting = hm_bet.build(0.5);
        cfg.restart = hm_restart.build();
        cfg.alpha = hm_alpha;
        std::vector<double> eval(losses.begin() + start, losses.end());
        const HeatmapResult grid = heatmap(eval, models, cfg, !hm_serial);
        RunMeta meta;
        meta.command = "heatmap";
        meta.functional = series[0].functional;
        meta.level = series[0].level;
        meta.support_bound = cfg.kernel.support_bound;
        meta.inputs = hm_roster;
        meta.inputs.insert(meta.inputs.begin(), hm_losses);
        const Manifest man = build_manifest(meta, args);
        write_text_file(out_path(hm_out, "manifest.json"), man.text);
        write_text_file(out_path(hm_out, "heatmap.json"),
                        heatmap_json_text(cfg, grid, man.hash));
        std::cout << "wrote " << grid.models.size() << "x" << grid.models.size()
                  << " heatmap to " << hm_out << "\n";
        return 0;
    }

    // ---- table1 ----
    if (*tb) {
        struct Col {
            const char* name;
            double var_u, es_u;
        };
        const std::vector<Col> cols{{"baseline", 0.0, 0.0}, {"-5%var", 0.05, 0.0},
                                    {"-10%var", 0.10, 0.0}, {"-5%es", 0.0, 0.05},
                                    {"-10%es", 0.0, 0.10},  {"-5%both", 0.05, 0.05}};
        const std::vector<double> thresholds{2.0, 5.0, 10.0, 20.0};
        if (tb_runs < 1) throw ConfigError("--runs must be positive");
        std::vector<std::vector<double>> rates(
            thresholds.size(), std::vector<double>(cols.size(), 0.0));
        for (std::size_t c = 0; c < cols.size(); ++c) {
            for (int k = 0; k < tb_runs; ++k) {
                IidScenarioConfig sc;
                sc.seed = tb_seed + static_cast<std::uint64_t>(k);
                sc.training = tb_training;
                sc.n = tb_n;
                sc.var_underest = cols[c].var_u;
                sc.es_underest = cols[c].es_u;
                const IidScenarioData data = gen_iid_scenario(sc);
                BacktestInput in;
                in.losses = data.losses;
                in.r = data.es_forecast;
                in.z = data.var_forecast;
                StandardConfig cfg;
                cfg.kernel.functional = RiskFunctional::EsVar;
                cfg.kernel.level = 0.95;
                cfg.betting.warmup = tb_training;
                cfg.thresholds = thresholds;
                const StandardRunResult run = run_standard(in, cfg);
                for (std::size_t h = 0; h < thresholds.size(); ++h)
                    if (run.first_hit[h] >= 0) rates[h][c] += 1.0;
            }
            for (std::size_t h = 0; h < thresholds.size(); ++h)
                rates[h][c] /= tb_runs;
        }
        std::string text = "threshold";
        for (const Col& c : cols) text += std::string(",") + c.name;
        text += "\n";
        for (std::size_t h = 0; h < thresholds.size(); ++h) {
            text += format_double(thresholds[h]);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                char buf[16];
                std::snprintf(buf, sizeof buf, ",%.4f", rates[h][c]);
                text += buf;
            }
            text += "\n";
        }
        std::cout << text;
        if (!tb_out.empty()) {
            RunMeta meta;
            meta.command = "table1";
            meta.functional = "esvar";
            meta.level = 0.95;
            meta.seed = tb_seed;
            const Manifest man = build_manifest(meta, args);
            write_text_file(out_path(tb_out, "manifest.json"), man.text);
            write_text_file(out_path(tb_out, "table1.csv"), text);
        }
        return 0;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
