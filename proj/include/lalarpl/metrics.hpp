#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lalarpl {

// One child's share of the load offered to a parent: `theta` is the fraction
// of the child's traffic routed through this parent, `traffic` the child's
// offered rate in bit/s.
struct ChildContribution {
    double theta = 1.0;
    double traffic = 0.0;
};

// Power draw (W) and accumulated time (s) per radio state. Energy consumed is
// the dot product of the two rows; time in states only ever accumulates.
struct EnergyLedger {
    double p_tx = 0.0522;
    double p_rx = 0.0591;
    double p_idle = 0.00128;
    double p_sleep = 1e-6;
    double t_tx = 0.0;
    double t_rx = 0.0;
    double t_idle = 0.0;
    double t_sleep = 0.0;
};

// Per-hop latency decomposition, all seconds.
struct DelayBreakdown {
    double proc = 0.0;
    double queue = 0.0;
    double trans = 0.0;
    double prop = 0.0;
};

// Load on a parent relative to its capacity `cb` (bit/s), clamped to [0, 1]:
// min(1, sum(theta_k * traffic_k) / cb). cb <= 0 is invalid.
double traffic_index(std::span<const ChildContribution> children, double cb);

// Delivered / sent. sent == 0 yields 0; received > sent is invalid.
double pdr(std::uint64_t sent, std::uint64_t received);

// Sum of received bits divided by the window length. dt <= 0 is invalid.
double throughput_basic(std::span<const double> received_bits, double dt);

// Link-quality-weighted throughput: (sum(bits*lqi)/dt) * ln(1 + child_count).
// Any lqi outside [0, 1] is invalid.
struct WeightedSample {
    double bits = 0.0;
    double lqi = 0.0;
};
double throughput_weighted(std::span<const WeightedSample> samples, double dt,
                           double child_count);

// Jain fairness index (sum v)^2 / (n * sum v^2) over non-negative values.
// The all-zero vector is perfectly fair by convention and yields 1.0.
double jain_fairness(std::span<const double> values);

// Total per-hop node delay.
double node_delay(const DelayBreakdown& d);

// Sum of per-hop node delays along a path.
double link_delay_index(std::span<const DelayBreakdown> hops);

// Mean end-to-end latency over delivered packets. No deliveries means the
// metric is undefined, which is distinct from zero.
std::optional<double> avg_end_to_end_delay(std::span<const double> latencies);

// Energy consumed per the ledger: sum of p_state * t_state.
double energy_total(const EnergyLedger& ledger);

// Average lifetime of the network, normalized to [0, 1]:
// ((sum of death times + survivors * lifetime_cap) / n) / lifetime_cap.
// Preconditions: death_times.size() == n - survivors, every death time in
// [0, lifetime_cap], lifetime_cap > 0.
double altn(std::span<const double> death_times, std::uint64_t survivors,
            double lifetime_cap, std::uint64_t n);

// Full per-run output. Per-node vectors cover sensor nodes only, ordered by
// node id; the sink is infrastructure and excluded.
struct MetricsReport {
    double pdr = 0.0;
    std::vector<double> throughput_per_node;
    std::vector<double> weighted_throughput_per_node;
    double jfi_throughput = 0.0;
    std::optional<double> aeed;
    std::vector<double> energy_per_node;
    double jfi_energy = 0.0;
    double altn = 0.0;
    std::vector<double> death_times; // dead sensors, ascending node id
    std::uint64_t packets_sent = 0;
    std::uint64_t packets_received = 0;
    std::uint64_t packets_dropped = 0;
    std::uint64_t drops_link = 0;
    std::uint64_t drops_buffer = 0;
    std::uint64_t drops_no_route = 0;
    std::uint64_t drops_node_dead = 0;

    std::uint64_t packets_in_flight() const {
        return packets_sent - packets_received - packets_dropped;
    }
};

// Field-by-field comparison with relative tolerance; returns a description of
// the first mismatch, or nothing when the reports agree.
std::optional<std::string> compare_reports(const MetricsReport& a,
                                           const MetricsReport& b,
                                           double rel_tol = 1e-9);

} // namespace lalarpl
