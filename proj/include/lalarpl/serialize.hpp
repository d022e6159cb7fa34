#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lalarpl/scenario.hpp"
#include "lalarpl/simcore.hpp"

namespace lalarpl {

// Canonical float formatting for every artifact: %.9g (9 significant
// digits), with non-finite values spelled nan / inf / -inf. Identical input
// bytes in, identical output bytes out — golden-file stable.
std::string fmt_g9(double v);

// Best-effort double parser accepting fmt_g9 output (including nan/inf).
// Throws ConfigError naming `what` when the token is not a number.
double parse_double(const std::string& token, const std::string& what);

// One row of results.csv, either a completed run or a recorded failure.
struct ResultRow {
    std::string scenario;
    std::string variant;
    std::uint32_t n_nodes = 0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    MetricsReport report{};
    std::string error; // failed rows only; never serialized into the CSV
};

// Numeric columns shared by results.csv, aggregate.csv and plot data.
const std::vector<std::string>& metric_columns();

// Scalar metric by column name from a report (vectors are summarized:
// *_mean over sensors, dead_nodes/first_death_time from death_times).
double metric_value(const MetricsReport& report, const std::string& name);

std::string results_csv(const std::vector<ResultRow>& rows);

// Parsed-back view of results.csv; metric values as written (9 digits).
struct ParsedResultRow {
    std::string scenario;
    std::string variant;
    std::uint32_t n_nodes = 0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::map<std::string, double> metrics;
};

std::vector<ParsedResultRow> parse_results_csv(const std::string& text);

// One row per (scenario, variant) over ok rows:
// scenario,variant,n_nodes,lambda,runs,<metric>_median,<metric>_mean,...
// NaN values (e.g. an undefined mean delay) drop out of that metric's
// sample; an empty sample serializes as nan.
std::string aggregate_csv(const std::vector<ParsedResultRow>& rows);

// Long-format plot data for one metric:
// scenario,variant,lambda,n_nodes,seed,metric,value (ok rows only).
// An unknown metric throws ConfigError listing valid names and suggesting
// the nearest one.
std::string plot_data_csv(const std::vector<ParsedResultRow>& rows,
                          const std::string& metric);

// Full single-run report as JSON (stable key order, fmt_g9 numbers,
// undefined values as null).
std::string report_json(const ScenarioConfig& cfg, const RunResult& result);

// Node positions, roles, hop counts and links with quality, as JSON.
std::string topology_json(const Topology& topo, const std::vector<int>& hops);

// One JSON object per log record, newline separated.
std::string event_log_ndjson(const EventLog& log);

} // namespace lalarpl
