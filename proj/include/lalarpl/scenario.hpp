#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lalarpl/netmodel.hpp"
#include "lalarpl/protocol.hpp"

namespace lalarpl {

// Invalid configuration input (bad key, bad value, inconsistent ranges).
// Mapped to exit code 2 by the CLI, unlike runtime failures (exit 1).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// One simulated run. Defaults are the 50-node reference workload; see
// README.md for the full scenario-key table.
struct ScenarioConfig {
    std::uint32_t n_nodes = 50;
    double area_width = 1000.0;  // m
    double area_height = 1000.0; // m
    double sim_time = 1000.0;    // s
    double lambda = 0.1;         // data packets per second per sensor
    double data_rate = 250000.0; // bit/s
    double radio_range = 100.0;  // m
    std::uint32_t packet_size = 50; // bytes, data
    std::uint32_t dio_size = 80;    // bytes
    std::uint32_t dao_size = 100;   // bytes (accounting only)
    std::uint32_t dis_size = 77;    // bytes (accounting only)
    std::uint32_t dao_ack_size = 80; // bytes, batched acks
    double initial_energy = 2.0;    // J per sensor
    PowerProfile power{};
    std::size_t queue_capacity = 10;
    double loss_scale = 0.2;  // per-hop loss probability = loss_scale*(1-lqi)
    double proc_delay = 1e-4; // s per hop
    double metric_dt = 10.0;  // s, throughput/TI window
    double lifetime_cap = 0.0; // s; 0 resolves to sim_time
    double dio_period = 30.0;  // s
    double capacity_bits = 0.0; // bit/s for the traffic index; 0 -> data_rate
    PlacementMode placement = PlacementMode::Connected;
    std::uint64_t seed = 1;
    ProtocolConfig protocol{};

    // Resolves the 0-defaults and validates every range; throws ConfigError.
    void validate();
};

// Flat "key: value" scenario text, one pair per line, '#' comments. Unknown
// or duplicate keys and malformed values are hard errors naming the key and
// line. Empty input yields the defaults.
ScenarioConfig parse_scenario_text(std::string_view text,
                                   const std::string& origin);
ScenarioConfig parse_scenario(const std::string& path);

const char* variant_name(ProtocolVariant v);
ProtocolVariant variant_from_name(std::string_view name);

} // namespace lalarpl
