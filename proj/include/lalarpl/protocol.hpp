#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lalarpl/netmodel.hpp"

namespace lalarpl {

enum class ProtocolVariant : std::uint8_t { Lalarpl, Minhop, Random };

struct ProtocolConfig {
    ProtocolVariant variant = ProtocolVariant::Lalarpl;
    double zeta = 0.5;              // hop/traffic mix in formation weights
    std::uint32_t batch_p = 5;      // data packets per ack
    std::size_t min_parents = 2;
    std::size_t max_parents = 5;
    bool invert_traffic_term = false;
    AutomatonConfig automaton{};

    void validate() const;
};

// Broadcast routing beacon: sender's hop distance to the root and its
// current load.
struct DioIndicator {
    NodeId sender = kInvalidNode;
    int min_hops_to_root = 0;
    double traffic_index = 0.0;
};

// Batched acknowledgement covering `covers` data packets, carrying the
// sender's load at emission time.
struct AckPacket {
    NodeId sender = kInvalidNode;
    double traffic_index = 0.0;
    std::uint32_t covers = 0;
};

enum class FeedbackKind : std::uint8_t { Reward, Penalty, Neutral };

DioIndicator make_dio(const NodeState& node);

// Initial selection probabilities over candidate parents: a zeta-weighted
// mix of inverse-hop share and traffic share. With no traffic anywhere the
// traffic share is uniform 1/N. Candidates need num_hop >= 1; use the
// single-candidate shortcut for a direct sink link.
std::vector<double> selection_probabilities(
    std::span<const DioIndicator> candidates, double zeta,
    bool invert_traffic_term = false);

// Builds the parent table from eligible beacons (strictly lower hop than the
// node), keeping the top min(max_parents, N) candidates by formation weight,
// renormalized, with a fresh automaton. No eligible beacon leaves the node
// unattached with an empty table.
void form_parent_set(NodeState& node, std::span<const DioIndicator> dios,
                     const ProtocolConfig& cfg);

// Picks a parent-table index for the next transmission. Dead parents are
// skipped by renormalizing over alive entries. Lalarpl samples the automaton
// and Random draws uniformly (one draw each); Minhop is deterministic
// (fewest hops, ties by lowest id; draws nothing). Returns nothing when no
// alive parent exists. Increments the entry's tx batch counter on success.
std::optional<std::size_t> choose_parent(NodeState& node,
                                         std::span<const char> alive,
                                         const ProtocolConfig& cfg,
                                         RandomStream& rng);

// Parent-side batching: counts a successfully enqueued packet from `child`
// and reports whether this packet completes a batch (i.e. an ack is due).
bool register_child_packet(NodeState& parent, NodeId child,
                           std::uint32_t batch_p);

// Feedback classification against the mean load A of the *other* parents:
//   ack_ti < 0.5 A                                  -> Reward
//   0.5 A <= ack_ti < 0.8 A and sender has min hops -> Reward
//   ack_ti > A                                      -> Penalty
//   otherwise                                       -> Neutral
FeedbackKind classify_feedback(double ack_ti, std::span<const double> other_tis,
                               int sender_hops, std::span<const int> table_hops);

struct AckOutcome {
    bool known_parent = false;
    FeedbackKind kind = FeedbackKind::Neutral;
    double step = 0.0; // alpha or beta actually applied
};

// Full child-side ack pipeline: classify, update the automaton (reward with
// compute_alpha, penalty with compute_beta), then refresh the stored
// traffic_index and selection_probability columns. A single-parent table is
// always Neutral. Baseline variants refresh the stored traffic index but
// never touch the automaton. Acks from parents not in the table are ignored
// (reported via known_parent = false).
AckOutcome on_ack_received(NodeState& child, const AckPacket& ack,
                           const DodagState& dodag, const ProtocolConfig& cfg,
                           StepDiagnostics& diag);

} // namespace lalarpl
