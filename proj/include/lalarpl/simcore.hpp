#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lalarpl/metrics.hpp"
#include "lalarpl/netmodel.hpp"
#include "lalarpl/protocol.hpp"
#include "lalarpl/scenario.hpp"

namespace lalarpl {

inline constexpr std::uint64_t kNoPacket =
    std::numeric_limits<std::uint64_t>::max();

enum class EventKind : std::uint8_t {
    GenPacket,
    TxStart,
    RxComplete,
    AckDelivery,
    DioRound,
    MetricSample,
    EndOfSim,
};

// Queue ordering is (time, seq); seq is the scheduling order, so same-time
// events process deterministically in the order they were scheduled.
struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::EndOfSim;
    NodeId node = kInvalidNode; // primary actor (receiver for RxComplete)
    NodeId peer = kInvalidNode; // counterpart (sender for RxComplete)
    std::uint64_t packet = kNoPacket;
    std::uint32_t link = 0;
    AckPacket ack{};
};

enum class PacketStatus : std::uint8_t {
    InFlight,
    Delivered,
    DroppedLink,
    DroppedBuffer,
    DroppedNoRoute,
    DroppedNodeDead,
};

struct PacketState {
    NodeId src = kInvalidNode;
    double created_at = 0.0;
    std::uint32_t size_bytes = 0;
    std::uint32_t hops_taken = 0;
    std::vector<DelayBreakdown> per_hop;
    PacketStatus status = PacketStatus::InFlight;
    double delivered_at = -1.0;
};

// Append-only run journal. Everything the offline replay needs to recompute
// the full MetricsReport lives here; see the field conventions per kind.
enum class LogKind : std::uint8_t {
    Gen,        // a=src, packet, v0=size bits
    DataTx,     // a=sender, b=parent, packet, v0=airtime, v1=queue wait
    DataRx,     // a=receiver(sensor relay), b=sender, packet, v0=bits, v1=lqi
    Deliver,    // a=sink, b=last hop, packet, v0=bits, v1=lqi, v2=latency
    Drop,       // a=node, packet, tag=PacketStatus
    AckTx,      // a=parent, b=child, v0=airtime
    AckRx,      // a=child, b=parent, v0=ack ti, tag=FeedbackKind
    DioTx,      // a=sender
    DioRx,      // a=receiver, b=sender
    Energy,     // a=node, tag=RadioState, v0=duration, v1=joules
    Death,      // a=node, v0=exact depletion instant
    Formation,  // a=node, v0=table size
    Update,     // a=child, b=parent, tag=FeedbackKind, v0=step
    Sample,     // a=sensor, v0=window throughput, v1=energy left, tag=alive
    End,        // sim_time reached
};

struct LogRecord {
    double time = 0.0;
    LogKind kind = LogKind::End;
    NodeId a = kInvalidNode;
    NodeId b = kInvalidNode;
    std::uint64_t packet = kNoPacket;
    double v0 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    std::uint8_t tag = 0;
};

using EventLog = std::vector<LogRecord>;

struct RunResult {
    MetricsReport report;
    EventLog log;
    Topology topology;
    std::vector<PacketState> packets;
    std::vector<NodeState> nodes; // final states, for inspection and tests
    StepDiagnostics step_diagnostics;
    std::uint64_t stale_acks = 0; // acks from parents no longer in the table
};

// Runs one scenario to completion. Deterministic: a given (config, seed)
// yields a byte-identical event log and report. Throws TopologyError when
// the placement cannot reach the sink and ConfigError on bad configs.
RunResult run_scenario(const ScenarioConfig& cfg);

// Recomputes the full MetricsReport from the raw event log and the config
// alone, using only the metrics module. The log must end with an End record.
MetricsReport replay_oracle(const EventLog& log, const ScenarioConfig& cfg);

// Convenience: run, replay, compare. Returns the first divergence, if any.
std::optional<std::string> verify_replay(const RunResult& result,
                                         const ScenarioConfig& cfg,
                                         double rel_tol = 1e-9);

} // namespace lalarpl
