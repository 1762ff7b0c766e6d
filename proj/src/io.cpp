#include "ebt/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ebt/errors.hpp"
#include "ebt/version.hpp"

namespace ebt {

namespace {

using nlohmann::json;

std::string comment_line(const std::string& manifest_hash) {
    std::string s = "# v" + std::to_string(kSchemaVersion);
    if (!manifest_hash.empty()) s += " manifest=" + manifest_hash;
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    const char* b = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(b, &end);
    if (end == b || *end != '\0' || !std::isfinite(v))
        throw DataError("bad number '" + s + "' in " + where);
    return v;
}

int parse_int(const std::string& s, const std::string& where) {
    const char* b = s.c_str();
    char* end = nullptr;
    const long v = std::strtol(b, &end, 10);
    if (end == b || *end != '\0')
        throw DataError("bad integer '" + s + "' in " + where);
    return static_cast<int>(v);
}

// Splits file content into lines, strips a trailing carriage return, checks
// the leading comment's schema tag and drops comment lines.
std::vector<std::string> data_lines(const std::string& text, const std::string& path) {
    std::vector<std::string> lines;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur)) {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
    }
    std::size_t start = 0;
    while (start < lines.size() && !lines[start].empty() && lines[start][0] == '#') {
        const std::string& c = lines[start];
        const std::size_t vp = c.find(" v");
        if (start == 0 && vp != std::string::npos) {
            std::size_t e = vp + 2;
            std::string ver;
            while (e < c.size() && std::isdigit(static_cast<unsigned char>(c[e])))
                ver.push_back(c[e++]);
            if (!ver.empty() && ver != std::to_string(kSchemaVersion))
                throw DataError("unsupported schema v" + ver + " in " + path);
        }
        ++start;
    }
    std::vector<std::string> out(lines.begin() + static_cast<std::ptrdiff_t>(start),
                                 lines.end());
    while (!out.empty() && out.back().empty()) out.pop_back();
    if (out.empty()) throw DataError("no rows in " + path);
    return out;
}

void require_header(const std::string& got, const std::string& want,
                    const std::string& path) {
    if (got != want)
        throw DataError("bad header in " + path + ": expected '" + want +
                        "', got '" + got + "'");
}

std::vector<std::string> row_fields(const std::string& line, std::size_t want,
                                    const std::string& path, std::size_t rowno) {
    std::vector<std::string> f = split_csv(line);
    if (f.size() != want)
        throw DataError(path + " row " + std::to_string(rowno) + " has " +
                        std::to_string(f.size()) + " fields, expected " +
                        std::to_string(want));
    return f;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    return f;
}

} // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f = open_out(path);
    f << text;
    if (!f) throw DataError("write failed for " + path);
}

// ---- loss series ----

void write_losses_csv(const std::string& path, const std::vector<double>& losses,
                      const std::string& manifest_hash) {
    std::ofstream f = open_out(path);
    f << comment_line(manifest_hash) << "\n";
    f << "t,loss\n";
    for (std::size_t i = 0; i < losses.size(); ++i)
        f << (i + 1) << ',' << format_double(losses[i]) << "\n";
    if (!f) throw DataError("write failed for " + path);
}

std::vector<double> read_losses_csv(const std::string& path) {
    const std::vector<std::string> lines = data_lines(read_text_file(path), path);
    require_header(lines[0], "t,loss", path);
    std::vector<double> out;
    out.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> f = row_fields(lines[i], 2, path, i);
        const int t = parse_int(f[0], path);
        if (t != static_cast<int>(i))
            throw DataError(path + ": day index " + f[0] + " out of order at row " +
                            std::to_string(i));
        out.push_back(parse_double(f[1], path));
    }
    return out;
}

// ---- forecast series ----

void write_forecasts_csv(const std::string& path, const ForecastSeries& fs,
                         const std::string& manifest_hash) {
    const bool has_z = !fs.z.empty();
    if (has_z && fs.z.size() != fs.r.size())
        throw AlignmentError("forecast series r and z differ in length");
    std::ofstream f = open_out(path);
    f << comment_line(manifest_hash) << "\n";
    f << (has_z ? "date_index,r,z,method,functional,level\n"
                : "date_index,r,method,functional,level\n");
    for (std::size_t i = 0; i < fs.r.size(); ++i) {
        f << (fs.first_index + static_cast<int>(i) + 1) << ','
          << format_double(fs.r[i]) << ',';
        if (has_z) f << format_double(fs.z[i]) << ',';
        f << fs.method << ',' << fs.functional << ',' << format_double(fs.level)
          << "\n";
    }
    if (!f) throw DataError("write failed for " + path);
}

ForecastSeries read_forecasts_csv(const std::string& path) {
    const std::vector<std::string> lines = data_lines(read_text_file(path), path);
    bool has_z = false;
    if (lines[0] == "date_index,r,z,method,functional,level")
        has_z = true;
    else
        require_header(lines[0], "date_index,r,method,functional,level", path);
    if (lines.size() < 2) throw DataError("no forecast rows in " + path);

    ForecastSeries fs;
    const std::size_t ncol = has_z ? 6 : 5;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> f = row_fields(lines[i], ncol, path, i);
        const int date = parse_int(f[0], path);
        if (i == 1)
            fs.first_index = date - 1;
        else if (date != fs.first_index + static_cast<int>(i))
            throw DataError(path + ": date_index " + f[0] +
                            " breaks contiguity at row " + std::to_string(i));
        std::size_t c = 1;
        fs.r.push_back(parse_double(f[c++], path));
        if (has_z) fs.z.push_back(parse_double(f[c++], path));
        const std::string method = f[c++];
        const std::string functional = f[c++];
        const double level = parse_double(f[c++], path);
        if (i == 1) {
            fs.method = method;
            fs.functional = functional;
            fs.level = level;
        } else if (method != fs.method || functional != fs.functional ||
                   level != fs.level) {
            throw DataError(path + ": metadata changes at row " + std::to_string(i));
        }
    }
    return fs;
}

// ---- e-process traces ----

void write_standard_eprocess_csv(const std::string& path, const BacktestInput& in,
                                 const StandardRunResult& run,
                                 const std::string& manifest_hash) {
    const bool has_z = !in.z.empty();
    std::ofstream f = open_out(path);
    f << comment_line(manifest_hash) << "\n";
    f << (has_z ? "t,loss,r,z,lambda,step_payoff,m,segment_id\n"
                : "t,loss,r,lambda,step_payoff,m,segment_id\n");
    for (std::size_t i = 0; i < in.losses.size(); ++i) {
        f << (i + 1) << ',' << format_double(in.losses[i]) << ','
          << format_double(in.r[i]) << ',';
        if (has_z) f << format_double(in.z[i]) << ',';
        f << format_double(run.lambda[i]) << ',' << format_double(run.payoff[i])
          << ',' << format_double(run.wealth[i]) << ',' << run.segment[i] << "\n";
    }
    if (!f) throw DataError("write failed for " + path);
}

std::vector<StandardReplayRow> read_standard_eprocess_csv(const std::string& path) {
    const std::vector<std::string> lines = data_lines(read_text_file(path), path);
    bool has_z = false;
    if (lines[0] == "t,loss,r,z,lambda,step_payoff,m,segment_id")
        has_z = true;
    else
        require_header(lines[0], "t,loss,r,lambda,step_payoff,m,segment_id", path);

    std::vector<StandardReplayRow> out;
    const std::size_t ncol = has_z ? 8 : 7;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> f = row_fields(lines[i], ncol, path, i);
        StandardReplayRow row;
        std::size_t c = 0;
        row.t = parse_int(f[c++], path);
        row.loss = parse_double(f[c++], path);
        row.r = parse_double(f[c++], path);
        row.z = has_z ? parse_double(f[c++], path) : kNoForecast;
        row.lambda = parse_double(f[c++], path);
        row.payoff = parse_double(f[c++], path);
        row.wealth = parse_double(f[c++], path);
        row.segment = parse_int(f[c++], path);
        if (row.t != static_cast<int>(i))
            throw DataError(path + ": day index out of order at row " +
                            std::to_string(i));
        out.push_back(row);
    }
    return out;
}

void write_comparative_eprocess_csv(const std::string& path,
                                    const ComparativePair& in,
                                    const ComparativeRunResult& run,
                                    const std::string& manifest_hash) {
    const bool has_z = !in.z.empty();
    std::ofstream f = open_out(path);
    f << comment_line(manifest_hash) << "\n";
    f << (has_z ? "t,loss,r,z,r_star,z_star,lambda_minus,lambda_plus,gap,"
                  "m_minus,m_plus,segment_id\n"
                : "t,loss,r,r_star,lambda_minus,lambda_plus,gap,"
                  "m_minus,m_plus,segment_id\n");
    for (std::size_t i = 0; i < in.losses.size(); ++i) {
        f << (i + 1) << ',' << format_double(in.losses[i]) << ','
          << format_double(in.r[i]) << ',';
        if (has_z) f << format_double(in.z[i]) << ',';
        f << format_double(in.r_star[i]) << ',';
        if (has_z) f << format_double(in.z_star[i]) << ',';
        f << format_double(run.lambda_minus[i]) << ','
          << format_double(run.lambda_plus[i]) << ',' << format_double(run.gap[i])
          << ',' << format_double(run.wealth_minus[i]) << ','
          << format_double(run.wealth_plus[i]) << ',' << run.segment[i] << "\n";
    }
    if (!f) throw DataError("write failed for " + path);
}

// ---- JSON summaries ----

namespace {

json segment_json(const SegmentStats& s) {
    return json{{"begin", s.begin}, {"end", s.end}, {"sup", s.sup}};
}

json verdict_fields(const ZoneVerdict& v) {
    return json{{"zone", to_string(v.zone)},      {"sup_minus", v.sup_minus},
                {"sup_plus", v.sup_plus},         {"tau_minus", v.tau_minus},
                {"tau_plus", v.tau_plus},         {"magnitude", v.magnitude},
                {"speed", v.speed}};
}

} // namespace

std::string standard_summary_json(const StandardConfig& cfg,
                                  const StandardRunResult& run,
                                  const std::string& manifest_hash) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["manifest"] = manifest_hash;
    j["kind"] = "standard";
    j["functional"] = to_string(cfg.kernel.functional);
    j["level"] = cfg.kernel.level;
    j["form"] = to_string(cfg.kernel.form);
    j["support_bound"] = cfg.kernel.support_bound;
    j["two_sided"] = cfg.two_sided;
    j["thresholds"] = run.thresholds;
    j["sup"] = run.sup;
    j["first_hit"] = run.first_hit;
    j["cross_count"] = run.cross_count;
    j["rejections"] = run.rejection_count;
    json segs = json::array();
    for (const SegmentStats& s : run.segments) segs.push_back(segment_json(s));
    j["segments"] = segs;
    return j.dump(2) + "\n";
}

std::string comparative_verdict_json(const ComparativeConfig& cfg,
                                     const ComparativeRunResult& run,
                                     const std::string& manifest_hash) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["manifest"] = manifest_hash;
    j["kind"] = "comparative";
    j["functional"] = to_string(cfg.kernel.functional);
    j["degree"] = to_string(cfg.kernel.degree);
    j["level"] = cfg.kernel.level;
    j["support_bound"] = cfg.kernel.support_bound;
    j["alpha"] = cfg.alpha;
    j["fraction"] = cfg.betting.fraction;
    j.update(verdict_fields(run.verdict));
    json segs = json::array();
    for (std::size_t s = 0; s < run.per_segment.size(); ++s) {
        json e = verdict_fields(run.per_segment[s]);
        e["begin"] = run.segments_minus[s].begin;
        e["end"] = run.segments_minus[s].end;
        segs.push_back(e);
    }
    j["segments"] = segs;
    return j.dump(2) + "\n";
}

std::string heatmap_json_text(const ComparativeConfig& cfg, const HeatmapResult& h,
                              const std::string& manifest_hash) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["manifest"] = manifest_hash;
    j["kind"] = "heatmap";
    j["functional"] = to_string(cfg.kernel.functional);
    j["degree"] = to_string(cfg.kernel.degree);
    j["level"] = cfg.kernel.level;
    j["alpha"] = cfg.alpha;
    j["models"] = h.models;
    json zones = json::array();
    json cells = json::array();
    for (std::size_t s = 0; s < h.grid.size(); ++s) {
        json row = json::array();
        for (std::size_t i = 0; i < h.grid[s].size(); ++i) {
            row.push_back(to_string(h.grid[s][i].zone));
            json c = verdict_fields(h.grid[s][i]);
            c["standard"] = h.models[s];
            c["internal"] = h.models[i];
            cells.push_back(c);
        }
        zones.push_back(row);
    }
    j["zones"] = zones; // zones[standard][internal]
    j["cells"] = cells;
    return j.dump(2) + "\n";
}

// ---- run manifest ----

Manifest build_manifest(const RunMeta& meta, const std::vector<std::string>& args) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kVersion;
    j["command"] = meta.command;
    j["functional"] = meta.functional;
    j["level"] = meta.level;
    j["note"] = meta.note;
    j["seed"] = meta.seed;
    j["support_bound"] = meta.support_bound;
    j["inputs"] = meta.inputs;
    j["args"] = args;
    j["hash"] = "";
    Manifest m;
    m.hash = fnv1a_hex(j.dump(2));
    j["hash"] = m.hash;
    m.text = j.dump(2) + "\n";
    return m;
}

} // namespace ebt
