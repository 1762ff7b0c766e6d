#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ebt/io.hpp"

using namespace ebt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Full end-to-end drive of the installed binary: every command here runs the
// real executable through the shell, then the outputs are read back with the
// library readers.

std::string cli() { return EBT_CLI_PATH; }

std::string scratch_root() {
    static const std::string dir = [] {
        const auto d = fs::temp_directory_path() / "ebt_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d.string();
    }();
    return dir;
}

std::string scratch(const std::string& name) {
    const std::string d = scratch_root() + "/" + name;
    fs::create_directories(d);
    return d;
}

int run_cli(const std::string& args) {
    const std::string cmd =
        cli() + " " + args + " >" + scratch_root() + "/stdout.txt 2>" +
        scratch_root() + "/stderr.txt";
    const int st = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(st));
    return WEXITSTATUS(st);
}

std::string last_stdout() { return read_text_file(scratch_root() + "/stdout.txt"); }
std::string last_stderr() { return read_text_file(scratch_root() + "/stderr.txt"); }

} // namespace

TEST_CASE("iid pipeline: simulate then standard backtest") {
    const std::string sim = scratch("iid");
    REQUIRE(run_cli("simulate --scenario iid --seed 5 --n 300 --training 10 --out " +
                    sim) == 0);
    CHECK(fs::exists(sim + "/manifest.json"));
    const std::vector<double> losses = read_losses_csv(sim + "/losses.csv");
    CHECK(losses.size() == 310);
    const ForecastSeries fc = read_forecasts_csv(sim + "/forecasts.csv");
    CHECK(fc.functional == "esvar");
    CHECK(fc.level == 0.95);
    CHECK(fc.first_index == 0);
    CHECK(fc.r.size() == 310);
    CHECK(fc.z.size() == 310);
    for (std::size_t i = 0; i < fc.r.size(); ++i) CHECK(fc.r[i] > fc.z[i]);

    const std::string bt = scratch("iid_bt");
    REQUIRE(run_cli("backtest --losses " + sim + "/losses.csv --forecasts " + sim +
                    "/forecasts.csv --warmup 10 --out " + bt) == 0);
    const json summary = json::parse(read_text_file(bt + "/summary.json"));
    CHECK(summary["kind"] == "standard");
    CHECK(summary["functional"] == "esvar");
    CHECK(summary["thresholds"].size() == 4);
    CHECK(double(summary["sup"]) >= 1.0);

    const std::vector<StandardReplayRow> rows =
        read_standard_eprocess_csv(bt + "/eprocess.csv");
    REQUIRE(rows.size() == losses.size());
    double w = 1.0;
    for (const StandardReplayRow& row : rows) {
        w *= 1.0 + row.lambda * row.payoff;
        CHECK(row.wealth == doctest::Approx(w).epsilon(1e-10));
        if (row.t <= 10) CHECK(row.lambda == 0.0); // training days stay unbet
    }
    const json manifest = json::parse(read_text_file(bt + "/manifest.json"));
    CHECK(manifest["command"] == "backtest-standard");
    CHECK(manifest["hash"].get<std::string>().size() == 16);
}

TEST_CASE("forecast, comparative verdict and heatmap agree on files") {
    const std::string sim = scratch("garch");
    REQUIRE(run_cli("simulate --scenario stationary --seed 9 --presample 40 "
                    "--n 310 --out " +
                    sim) == 0);
    const std::vector<double> losses = read_losses_csv(sim + "/losses.csv");
    REQUIRE(losses.size() == 350);

    const std::string fca = scratch("fc_n");
    REQUIRE(run_cli("forecast --losses " + sim +
                    "/losses.csv --innovation n --method fp --functional var "
                    "--level 0.99 --window 250 --out " +
                    fca) == 0);
    const std::string fcb = scratch("fc_st");
    REQUIRE(run_cli("forecast --losses " + sim +
                    "/losses.csv --innovation st --method fp --functional var "
                    "--level 0.99 --window 250 --out " +
                    fcb) == 0);
    const ForecastSeries fa = read_forecasts_csv(fca + "/n-fp.csv");
    CHECK(fa.method == "n-fp");
    CHECK(fa.first_index == 250);
    CHECK(fa.r.size() == 100);
    CHECK(fs::exists(fcb + "/st-fp.csv"));

    const std::string bt = scratch("cmp");
    REQUIRE(run_cli("backtest --losses " + sim + "/losses.csv --forecasts " + fca +
                    "/n-fp.csv --standard-forecasts " + fcb +
                    "/st-fp.csv --support-bound 6 --out " + bt) == 0);
    const json verdict = json::parse(read_text_file(bt + "/verdict.json"));
    CHECK(verdict["kind"] == "comparative");
    CHECK(verdict["degree"] == "h1");
    const std::string zone = verdict["zone"];
    CHECK((zone == "green" || zone == "red" || zone == "orange" ||
           zone == "yellow"));
    CHECK(double(verdict["sup_minus"]) > 0.0);

    // 100 aligned days, a comment and a header line
    const std::string trace = read_text_file(bt + "/eprocess.csv");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 102);

    const std::string hm = scratch("hm");
    REQUIRE(run_cli("heatmap --losses " + sim + "/losses.csv --roster " + fca +
                    "/n-fp.csv," + fcb + "/st-fp.csv --support-bound 6 --out " +
                    hm) == 0);
    const json grid = json::parse(read_text_file(hm + "/heatmap.json"));
    CHECK(grid["models"] == json::array({"n-fp", "st-fp"}));
    REQUIRE(grid["zones"].size() == 2);
    CHECK(grid["zones"][0][0] == "yellow");
    CHECK(grid["zones"][1][1] == "yellow");
    // the off-diagonal pair reproduces the standalone comparative verdict
    CHECK(grid["zones"][1][0] == zone); // standard st-fp, internal n-fp
}

TEST_CASE("table output is deterministic for a fixed seed") {
    const std::string t1 = scratch("t1");
    REQUIRE(run_cli("table1 --seed 3 --runs 2 --n 80 --training 10 --out " + t1) ==
            0);
    const std::string first = read_text_file(t1 + "/table1.csv");
    REQUIRE(run_cli("table1 --seed 3 --runs 2 --n 80 --training 10 --out " + t1) ==
            0);
    CHECK(read_text_file(t1 + "/table1.csv") == first);

    // header plus one row per threshold; every rate lands in [0, 1]
    const std::string body = last_stdout();
    CHECK(body.find("threshold") != std::string::npos);
    int rows = 0;
    std::istringstream in(body);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ','); // threshold label
        int cols = 0;
        while (std::getline(ls, cell, ',')) {
            const double v = std::stod(cell);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            ++cols;
        }
        CHECK(cols == 6);
    }
    CHECK(rows == 4);
}

TEST_CASE("error taxonomy maps onto process exit codes") {
    const std::string d = scratch("err");
    // missing input file: data error
    CHECK(run_cli("backtest --losses " + d + "/nope.csv --forecasts " + d +
                  "/nope2.csv --out " + d) == 3);
    // oracle forecasts are not producible from losses alone: config error
    const std::string sim = scratch("err_sim");
    REQUIRE(run_cli("simulate --scenario iid --seed 2 --n 60 --training 5 --out " +
                    sim) == 0);
    CHECK(run_cli("forecast --losses " + sim +
                  "/losses.csv --method opt --window 30 --out " + d) == 2);
    CHECK(last_stderr().find("oracle") != std::string::npos);
    // betting fraction outside (0, 1]: config error
    CHECK(run_cli("backtest --losses " + sim + "/losses.csv --forecasts " + sim +
                  "/forecasts.csv --fraction 1.5 --out " + d) == 2);
    // losses escape a deliberately tiny support bound: data error
    const std::string fcd = scratch("err_fc");
    REQUIRE(run_cli("forecast --losses " + sim +
                    "/losses.csv --innovation n --method fp --functional var "
                    "--level 0.99 --window 30 --out " +
                    fcd) == 0);
    REQUIRE(run_cli("forecast --losses " + sim +
                    "/losses.csv --innovation t --method fp --functional var "
                    "--level 0.99 --window 30 --name t-alt --out " +
                    fcd) == 0);
    CHECK(run_cli("backtest --losses " + sim + "/losses.csv --forecasts " + fcd +
                  "/n-fp.csv --standard-forecasts " + fcd +
                  "/t-alt.csv --support-bound 0.01 --out " + d) == 3);
    // mixed functionals in a comparative pair: data error
    REQUIRE(run_cli("forecast --losses " + sim +
                    "/losses.csv --innovation n --method fp --functional "
                    "expectile --level 0.99 --window 30 --name n-exp --out " +
                    fcd) == 0);
    CHECK(run_cli("backtest --losses " + sim + "/losses.csv --forecasts " + fcd +
                  "/n-fp.csv --standard-forecasts " + fcd +
                  "/n-exp.csv --support-bound 6 --out " + d) == 3);
}

TEST_CASE("structural scenarios write oracle forecasts on request") {
    const std::string sim = scratch("opt");
    REQUIRE(run_cli("simulate --scenario structural-vol --seed 21 --presample 60 "
                    "--n 140 --break-at 70 --window 50 "
                    "--opt-forecasts var:0.99 --out " +
                    sim) == 0);
    const std::vector<double> losses = read_losses_csv(sim + "/losses.csv");
    CHECK(losses.size() == 200);
    const ForecastSeries opt = read_forecasts_csv(sim + "/opt.csv");
    CHECK(opt.method == "opt");
    CHECK(opt.functional == "var");
    CHECK(opt.level == 0.99);
    CHECK(opt.first_index == 50);
    CHECK(opt.r.size() == 150);

    const std::string bt = scratch("opt_bt");
    REQUIRE(run_cli("backtest --losses " + sim + "/losses.csv --forecasts " + sim +
                    "/opt.csv --restart-at 70 --out " + bt) == 0);
    const json summary = json::parse(read_text_file(bt + "/summary.json"));
    CHECK(summary["segments"].size() == 2);
}
