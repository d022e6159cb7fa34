#include "lalarpl/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace lalarpl {

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1)
        return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void append_json_number(std::string& out, double v) {
    if (std::isfinite(v))
        out += fmt_g9(v);
    else
        out += "null";
}

} // namespace

std::string fmt_g9(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double parse_double(const std::string& token, const std::string& what) {
    if (token.empty())
        throw ConfigError(what + ": empty numeric field");
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + token.size())
        throw ConfigError(what + ": not a number: '" + token + "'");
    return v;
}

const std::vector<std::string>& metric_columns() {
    static const std::vector<std::string> cols = {
        "pdr",
        "aeed",
        "jfi_throughput",
        "jfi_energy",
        "altn",
        "throughput_mean",
        "weighted_throughput_mean",
        "energy_mean",
        "dead_nodes",
        "first_death_time",
        "packets_sent",
        "packets_received",
        "packets_dropped",
        "packets_in_flight",
        "drops_link",
        "drops_buffer",
        "drops_no_route",
        "drops_node_dead",
    };
    return cols;
}

double metric_value(const MetricsReport& r, const std::string& name) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (name == "pdr")
        return r.pdr;
    if (name == "aeed")
        return r.aeed ? *r.aeed : nan;
    if (name == "jfi_throughput")
        return r.jfi_throughput;
    if (name == "jfi_energy")
        return r.jfi_energy;
    if (name == "altn")
        return r.altn;
    if (name == "throughput_mean")
        return mean_of(r.throughput_per_node);
    if (name == "weighted_throughput_mean")
        return mean_of(r.weighted_throughput_per_node);
    if (name == "energy_mean")
        return mean_of(r.energy_per_node);
    if (name == "dead_nodes")
        return static_cast<double>(r.death_times.size());
    if (name == "first_death_time")
        return r.death_times.empty()
                   ? nan
                   : *std::min_element(r.death_times.begin(),
                                       r.death_times.end());
    if (name == "packets_sent")
        return static_cast<double>(r.packets_sent);
    if (name == "packets_received")
        return static_cast<double>(r.packets_received);
    if (name == "packets_dropped")
        return static_cast<double>(r.packets_dropped);
    if (name == "packets_in_flight")
        return static_cast<double>(r.packets_in_flight());
    if (name == "drops_link")
        return static_cast<double>(r.drops_link);
    if (name == "drops_buffer")
        return static_cast<double>(r.drops_buffer);
    if (name == "drops_no_route")
        return static_cast<double>(r.drops_no_route);
    if (name == "drops_node_dead")
        return static_cast<double>(r.drops_node_dead);
    throw ConfigError("unknown metric column: " + name);
}

std::string results_csv(const std::vector<ResultRow>& rows) {
    std::string out = "scenario,variant,n_nodes,lambda,seed,status";
    for (const auto& col : metric_columns()) {
        out += ',';
        out += col;
    }
    out += '\n';
    for (const auto& row : rows) {
        out += row.scenario;
        out += ',';
        out += row.variant;
        out += ',';
        out += std::to_string(row.n_nodes);
        out += ',';
        out += fmt_g9(row.lambda);
        out += ',';
        out += std::to_string(row.seed);
        out += ',';
        out += row.ok ? "ok" : "failed";
        for (const auto& col : metric_columns()) {
            out += ',';
            out += row.ok
                       ? fmt_g9(metric_value(row.report, col))
                       : "nan";
        }
        out += '\n';
    }
    return out;
}

std::vector<ParsedResultRow> parse_results_csv(const std::string& text) {
    std::vector<ParsedResultRow> rows;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("results csv: empty input");
    const auto header = split(line, ',');
    const std::vector<std::string> fixed = {"scenario", "variant", "n_nodes",
                                            "lambda",   "seed",    "status"};
    if (header.size() != fixed.size() + metric_columns().size())
        throw ConfigError("results csv: unexpected column count in header");
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (header[i] != fixed[i])
            throw ConfigError("results csv: expected column '" + fixed[i] +
                              "', found '" + header[i] + "'");
    }
    for (std::size_t i = 0; i < metric_columns().size(); ++i) {
        if (header[fixed.size() + i] != metric_columns()[i])
            throw ConfigError("results csv: expected metric column '" +
                              metric_columns()[i] + "', found '" +
                              header[fixed.size() + i] + "'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size())
            throw ConfigError("results csv: line " + std::to_string(line_no) +
                              ": expected " + std::to_string(header.size()) +
                              " cells, found " + std::to_string(cells.size()));
        ParsedResultRow row;
        row.scenario = cells[0];
        row.variant = cells[1];
        row.n_nodes = static_cast<std::uint32_t>(
            parse_double(cells[2], "results csv: n_nodes"));
        row.lambda = parse_double(cells[3], "results csv: lambda");
        row.seed = static_cast<std::uint64_t>(
            parse_double(cells[4], "results csv: seed"));
        if (cells[5] != "ok" && cells[5] != "failed")
            throw ConfigError("results csv: line " + std::to_string(line_no) +
                              ": bad status '" + cells[5] + "'");
        row.ok = cells[5] == "ok";
        for (std::size_t i = 0; i < metric_columns().size(); ++i)
            row.metrics[metric_columns()[i]] =
                parse_double(cells[6 + i], "results csv: " + metric_columns()[i]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string aggregate_csv(const std::vector<ParsedResultRow>& rows) {
    // Group keys in first-appearance order so output is stable.
    struct Group {
        std::string scenario;
        std::string variant;
        std::uint32_t n_nodes = 0;
        double lambda = 0.0;
        std::vector<const ParsedResultRow*> members;
    };
    std::vector<Group> groups;
    for (const auto& row : rows) {
        if (!row.ok)
            continue;
        Group* g = nullptr;
        for (auto& existing : groups) {
            if (existing.scenario == row.scenario &&
                existing.variant == row.variant) {
                g = &existing;
                break;
            }
        }
        if (g == nullptr) {
            groups.push_back(
                {row.scenario, row.variant, row.n_nodes, row.lambda, {}});
            g = &groups.back();
        }
        g->members.push_back(&row);
    }

    std::string out = "scenario,variant,n_nodes,lambda,runs";
    for (const auto& col : metric_columns()) {
        out += ',';
        out += col;
        out += "_median,";
        out += col;
        out += "_mean";
    }
    out += '\n';
    for (const auto& g : groups) {
        out += g.scenario;
        out += ',';
        out += g.variant;
        out += ',';
        out += std::to_string(g.n_nodes);
        out += ',';
        out += fmt_g9(g.lambda);
        out += ',';
        out += std::to_string(g.members.size());
        for (const auto& col : metric_columns()) {
            // An undefined value (say a delay with zero deliveries) drops out
            // of that metric's sample instead of poisoning the whole row.
            std::vector<double> values;
            for (const ParsedResultRow* row : g.members) {
                const double v = row->metrics.at(col);
                if (!std::isnan(v))
                    values.push_back(v);
            }
            out += ',';
            out += fmt_g9(median_of(values));
            out += ',';
            out += fmt_g9(mean_of(values));
        }
        out += '\n';
    }
    return out;
}

std::string plot_data_csv(const std::vector<ParsedResultRow>& rows,
                          const std::string& metric) {
    const auto& cols = metric_columns();
    if (std::find(cols.begin(), cols.end(), metric) == cols.end()) {
        std::string names;
        std::string best;
        std::size_t best_dist = std::numeric_limits<std::size_t>::max();
        for (const auto& col : cols) {
            if (!names.empty())
                names += ", ";
            names += col;
            const std::size_t d = levenshtein(metric, col);
            if (d < best_dist) {
                best_dist = d;
                best = col;
            }
        }
        throw ConfigError("unknown metric '" + metric + "' (did you mean '" +
                          best + "'?); valid metrics: " + names);
    }
    std::string out = "scenario,variant,lambda,n_nodes,seed,metric,value\n";
    for (const auto& row : rows) {
        if (!row.ok)
            continue;
        out += row.scenario;
        out += ',';
        out += row.variant;
        out += ',';
        out += fmt_g9(row.lambda);
        out += ',';
        out += std::to_string(row.n_nodes);
        out += ',';
        out += std::to_string(row.seed);
        out += ',';
        out += metric;
        out += ',';
        out += fmt_g9(row.metrics.at(metric));
        out += '\n';
    }
    return out;
}

std::string report_json(const ScenarioConfig& cfg, const RunResult& result) {
    const MetricsReport& r = result.report;
    std::string out = "{\n";
    out += "  \"variant\": \"";
    out += variant_name(cfg.protocol.variant);
    out += "\",\n";
    out += "  \"seed\": " + std::to_string(cfg.seed) + ",\n";
    out += "  \"n_nodes\": " + std::to_string(cfg.n_nodes) + ",\n";
    out += "  \"lambda\": " + fmt_g9(cfg.lambda) + ",\n";
    out += "  \"sim_time\": " + fmt_g9(cfg.sim_time) + ",\n";
    for (const auto& col : metric_columns()) {
        out += "  \"" + col + "\": ";
        append_json_number(out, metric_value(r, col));
        out += ",\n";
    }
    out += "  \"stale_acks\": " + std::to_string(result.stale_acks) + ",\n";
    out += "  \"zero_denominator_steps\": " +
           std::to_string(result.step_diagnostics.zero_denominator) + ",\n";
    auto append_array = [&out](const char* name,
                               const std::vector<double>& values) {
        out += "  \"";
        out += name;
        out += "\": [";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0)
                out += ", ";
            append_json_number(out, values[i]);
        }
        out += "]";
    };
    append_array("throughput_per_node", r.throughput_per_node);
    out += ",\n";
    append_array("weighted_throughput_per_node",
                 r.weighted_throughput_per_node);
    out += ",\n";
    append_array("energy_per_node", r.energy_per_node);
    out += ",\n";
    append_array("death_times", r.death_times);
    out += "\n}\n";
    return out;
}

std::string topology_json(const Topology& topo, const std::vector<int>& hops) {
    std::string out = "{\n  \"radio_range\": " + fmt_g9(topo.radio_range) +
                      ",\n  \"nodes\": [\n";
    for (std::size_t i = 0; i < topo.positions.size(); ++i) {
        out += "    {\"id\": " + std::to_string(i) +
               ", \"role\": " + (i == 0 ? "\"sink\"" : "\"sensor\"") +
               ", \"x\": " + fmt_g9(topo.positions[i].x) +
               ", \"y\": " + fmt_g9(topo.positions[i].y) + ", \"hops\": " +
               (i < hops.size() ? std::to_string(hops[i]) : "null");
        out += i + 1 < topo.positions.size() ? "},\n" : "}\n";
    }
    out += "  ],\n  \"links\": [\n";
    for (std::size_t i = 0; i < topo.links.size(); ++i) {
        const Link& l = topo.links[i];
        out += "    {\"a\": " + std::to_string(l.a) +
               ", \"b\": " + std::to_string(l.b) +
               ", \"distance\": " + fmt_g9(l.distance) +
               ", \"lqi\": " + fmt_g9(l.lqi) +
               ", \"prop_delay\": " + fmt_g9(l.prop_delay);
        out += i + 1 < topo.links.size() ? "},\n" : "}\n";
    }
    out += "  ]\n}\n";
    return out;
}

std::string event_log_ndjson(const EventLog& log) {
    static const char* kind_names[] = {
        "gen",    "data_tx", "data_rx", "deliver",   "drop",
        "ack_tx", "ack_rx",  "dio_tx",  "dio_rx",    "energy",
        "death",  "formation", "update", "sample",   "end",
    };
    std::string out;
    for (const LogRecord& rec : log) {
        out += "{\"t\": " + fmt_g9(rec.time) + ", \"kind\": \"";
        out += kind_names[static_cast<std::size_t>(rec.kind)];
        out += "\"";
        if (rec.a != kInvalidNode)
            out += ", \"a\": " + std::to_string(rec.a);
        if (rec.b != kInvalidNode)
            out += ", \"b\": " + std::to_string(rec.b);
        if (rec.packet != kNoPacket)
            out += ", \"packet\": " + std::to_string(rec.packet);
        if (rec.v0 != 0.0)
            out += ", \"v0\": " + fmt_g9(rec.v0);
        if (rec.v1 != 0.0)
            out += ", \"v1\": " + fmt_g9(rec.v1);
        if (rec.v2 != 0.0)
            out += ", \"v2\": " + fmt_g9(rec.v2);
        if (rec.tag != 0)
            out += ", \"tag\": " + std::to_string(rec.tag);
        out += "}\n";
    }
    return out;
}

} // namespace lalarpl
