#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ebt/backtests.hpp"

namespace ebt {

// CSV and JSON serialization. Conventions shared by every file:
//   - optional leading comment "# v<schema> manifest=<hash>", then an exact
//     lowercase header row; unknown or reordered columns are rejected
//   - dot-decimal doubles printed with %.17g, day index t counted from 1
//   - no quoting; fields are numbers or simple tokens
// JSON documents carry schema_version and the manifest hash of the run that
// produced them. Object keys serialize sorted, so bytes are reproducible.

std::string format_double(double x); // %.17g
std::string fnv1a_hex(const std::string& bytes);

// ---- loss series ----

void write_losses_csv(const std::string& path, const std::vector<double>& losses,
                      const std::string& manifest_hash = "");
std::vector<double> read_losses_csv(const std::string& path);

// ---- forecast series ----

struct ForecastSeries {
    std::string method = "external";
    std::string functional = "var";
    double level = 0.99;
    int first_index = 0;      // 0-based loss index of the first forecast day
    std::vector<double> r, z; // z empty for one-dim functionals
};

void write_forecasts_csv(const std::string& path, const ForecastSeries& fs,
                         const std::string& manifest_hash = "");
ForecastSeries read_forecasts_csv(const std::string& path);

// ---- e-process traces ----

void write_standard_eprocess_csv(const std::string& path, const BacktestInput& in,
                                 const StandardRunResult& run,
                                 const std::string& manifest_hash = "");

struct StandardReplayRow {
    int t = 0;
    double loss = 0.0, r = 0.0, z = 0.0;
    double lambda = 0.0, payoff = 0.0, wealth = 0.0;
    int segment = 0;
};
std::vector<StandardReplayRow> read_standard_eprocess_csv(const std::string& path);

void write_comparative_eprocess_csv(const std::string& path,
                                    const ComparativePair& in,
                                    const ComparativeRunResult& run,
                                    const std::string& manifest_hash = "");

// ---- JSON summaries ----

std::string standard_summary_json(const StandardConfig& cfg,
                                  const StandardRunResult& run,
                                  const std::string& manifest_hash);
std::string comparative_verdict_json(const ComparativeConfig& cfg,
                                     const ComparativeRunResult& run,
                                     const std::string& manifest_hash);
std::string heatmap_json_text(const ComparativeConfig& cfg, const HeatmapResult& h,
                              const std::string& manifest_hash);

// ---- run manifest ----

struct RunMeta {
    std::string command;
    std::string functional;
    double level = 0.0;
    std::string note; // free-form: scoring degree, methods, scenario kind
    std::uint64_t seed = 0;
    double support_bound = 0.0;
    std::vector<std::string> inputs; // files consumed
};

struct Manifest {
    std::string text; // full JSON document
    std::string hash; // fnv-1a of the document with its hash field blanked
};

Manifest build_manifest(const RunMeta& meta, const std::vector<std::string>& args);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace ebt
