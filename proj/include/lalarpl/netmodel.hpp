#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "lalarpl/automaton.hpp"
#include "lalarpl/metrics.hpp"
#include "lalarpl/rng.hpp"

namespace lalarpl {

using NodeId = std::uint32_t;
inline constexpr NodeId kInvalidNode = std::numeric_limits<NodeId>::max();

// Thrown when a generated topology cannot carry traffic (e.g. sensors outside
// the sink's connected component). Distinct from configuration errors so the
// batch runner can mark the row failed instead of aborting.
struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Position {
    double x = 0.0;
    double y = 0.0;
};

enum class NodeRole : std::uint8_t { Sink, Sensor };

enum class RadioState : std::uint8_t { Tx, Rx, Idle, Sleep };

struct PowerProfile {
    double tx = 0.0522;   // W
    double rx = 0.0591;   // W
    double idle = 0.00128; // W
    double sleep = 1e-6;  // W
};

enum class PlacementMode : std::uint8_t { Uniform, Connected };

// Sink at the area center. Uniform mode draws each sensor independently
// over the whole area (which at sparse densities usually disconnects the
// unit-disk graph). Connected mode grows the deployment instead: each new
// sensor lands uniformly within one radio range of a uniformly chosen
// already-placed node (redrawn while outside the area), so the graph is
// connected by construction, stays seed-deterministic, and keeps
// neighborhoods dense enough for multi-parent routing. Index 0 is the sink.
std::vector<Position> place_nodes(std::size_t n, double width, double height,
                                  double radio_range, PlacementMode mode,
                                  RandomStream& rng);

struct Link {
    NodeId a = kInvalidNode; // a < b
    NodeId b = kInvalidNode;
    double distance = 0.0;
    double lqi = 0.0;        // 1 - (d/range)^2
    double prop_delay = 0.0; // d / c
};

struct Topology {
    std::vector<Position> positions;
    std::vector<Link> links;
    // per node: (peer id, index into links)
    std::vector<std::vector<std::pair<NodeId, std::uint32_t>>> neighbors;
    double radio_range = 0.0;
};

// Unit-disk links: an edge exists iff distance <= radio_range. With
// require_connected set, every node must reach the sink (node 0) or a
// TopologyError naming the unreachable nodes is thrown.
Topology build_links(const std::vector<Position>& positions,
                     double radio_range, bool require_connected = true);

struct DodagState {
    std::vector<int> hops; // -1: dead or unreachable
    int max_hop = 0;       // over reachable alive nodes
};

// BFS hop counts from the sink over alive nodes. Dead or unreachable nodes
// get hop -1 and are excluded from max_hop.
DodagState compute_hop_counts(const Topology& topo,
                              const std::vector<char>& alive);

// One row of a node's parent table. selection_probability mirrors the
// automaton entry for this parent after every update.
struct ParentEntry {
    NodeId parent_id = kInvalidNode;
    double selection_probability = 0.0;
    double traffic_index = 0.0;
    int hop_count = 0;
};

struct QueuedPacket {
    std::uint64_t packet = 0;
    double ready_time = 0.0;
};

// Full per-node simulation state shared by the protocol and the engine.
struct NodeState {
    NodeId id = kInvalidNode;
    NodeRole role = NodeRole::Sensor;
    Position pos{};

    double initial_energy = 2.0; // J; the sink is mains-powered (infinity)
    double energy_remaining = 2.0;
    EnergyLedger ledger{};
    bool alive = true;
    double death_time = -1.0;
    double last_energy_update = 0.0; // ledger time frontier

    int hop_count = -1; // -1: unattached
    int formation_hop = -1; // own hop when the current table was formed
    std::vector<ParentEntry> routing_table;
    ProbabilityVector automaton;
    std::vector<std::uint32_t> tx_batch_counters; // per table entry

    std::deque<QueuedPacket> queue;
    double busy_until = 0.0;
    bool tx_scheduled = false;

    // Ack batching: packets received per child since the last ack to it.
    std::map<NodeId, std::uint64_t> child_rx_counts;

    // Load measurement over the current tumbling window.
    std::map<NodeId, double> window_child_bits;
    double window_bits = 0.0;
    double window_weighted_bits = 0.0;
    double current_ti = 0.0;

    // Report accumulators (mean over windows at the end of the run).
    double sum_window_throughput = 0.0;
    double sum_window_weighted = 0.0;

    bool infinite_energy() const {
        return initial_energy == std::numeric_limits<double>::infinity();
    }
};

// Charges `duration` seconds of `state` starting at `start_time`. Truncates
// at energy depletion, marking the node dead with its exact depletion
// instant. energy_remaining is recomputed as initial - energy_total(ledger)
// so conservation holds by construction. Dead nodes are not charged.
void consume_energy(NodeState& node, RadioState state, double duration,
                    double start_time);

} // namespace lalarpl
