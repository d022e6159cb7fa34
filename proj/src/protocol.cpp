#include "lalarpl/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lalarpl {

void ProtocolConfig::validate() const {
    if (!(zeta >= 0.0 && zeta <= 1.0))
        throw std::invalid_argument("ProtocolConfig: zeta outside [0,1]");
    if (batch_p == 0)
        throw std::invalid_argument("ProtocolConfig: batch_p must be >= 1");
    if (min_parents == 0 || min_parents > max_parents)
        throw std::invalid_argument(
            "ProtocolConfig: require 1 <= min_parents <= max_parents");
    automaton.validate();
}

DioIndicator make_dio(const NodeState& node) {
    if (node.hop_count < 0)
        throw std::invalid_argument("make_dio: node is unattached");
    return DioIndicator{node.id, node.hop_count, node.current_ti};
}

std::vector<double> selection_probabilities(
    std::span<const DioIndicator> candidates, double zeta,
    bool invert_traffic_term) {
    if (candidates.empty())
        throw std::invalid_argument("selection_probabilities: no candidates");
    if (!(zeta >= 0.0 && zeta <= 1.0))
        throw std::invalid_argument("selection_probabilities: zeta outside [0,1]");

    const std::size_t n = candidates.size();
    double inv_hop_sum = 0.0;
    double traffic_sum = 0.0;
    for (const auto& c : candidates) {
        if (c.min_hops_to_root < 1)
            throw std::invalid_argument(
                "selection_probabilities: candidate hop count must be >= 1");
        if (!(c.traffic_index >= 0.0))
            throw std::invalid_argument(
                "selection_probabilities: negative traffic index");
        inv_hop_sum += 1.0 / c.min_hops_to_root;
        traffic_sum += invert_traffic_term
                           ? 1.0 / (c.traffic_index + 1e-9)
                           : c.traffic_index;
    }

    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hop_term = (1.0 / candidates[i].min_hops_to_root) / inv_hop_sum;
        double traffic_term;
        if (traffic_sum == 0.0) {
            traffic_term = 1.0 / static_cast<double>(n);
        } else if (invert_traffic_term) {
            traffic_term = (1.0 / (candidates[i].traffic_index + 1e-9)) / traffic_sum;
        } else {
            traffic_term = candidates[i].traffic_index / traffic_sum;
        }
        probs[i] = zeta * hop_term + (1.0 - zeta) * traffic_term;
    }
    return probs;
}

void form_parent_set(NodeState& node, std::span<const DioIndicator> dios,
                     const ProtocolConfig& cfg) {
    cfg.validate();
    std::vector<DioIndicator> eligible;
    for (const auto& dio : dios) {
        if (dio.sender == node.id)
            continue;
        if (node.hop_count >= 0 && dio.min_hops_to_root >= node.hop_count)
            continue; // only strictly lower-hop senders keep routes loop-free
        if (node.hop_count < 0)
            continue; // unattached: BFS found no route, nothing is eligible
        eligible.push_back(dio);
    }

    node.routing_table.clear();
    node.tx_batch_counters.clear();
    node.automaton = ProbabilityVector();
    node.formation_hop = node.hop_count;
    if (eligible.empty())
        return;

    std::vector<double> weights;
    if (eligible.size() == 1) {
        weights = {1.0};
    } else {
        weights = selection_probabilities(eligible, cfg.zeta,
                                          cfg.invert_traffic_term);
    }

    std::vector<std::size_t> order(eligible.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (weights[a] != weights[b])
            return weights[a] > weights[b];
        return eligible[a].sender < eligible[b].sender;
    });

    const std::size_t keep = std::min(cfg.max_parents, eligible.size());
    double kept_sum = 0.0;
    for (std::size_t k = 0; k < keep; ++k)
        kept_sum += weights[order[k]];

    std::vector<double> probs(keep);
    node.routing_table.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
        const auto& dio = eligible[order[k]];
        probs[k] = weights[order[k]] / kept_sum;
        node.routing_table.push_back(ParentEntry{dio.sender, probs[k],
                                                 dio.traffic_index,
                                                 dio.min_hops_to_root});
    }
    node.automaton = ProbabilityVector(std::move(probs));
    node.tx_batch_counters.assign(keep, 0);
}

std::optional<std::size_t> choose_parent(NodeState& node,
                                         std::span<const char> alive,
                                         const ProtocolConfig& cfg,
                                         RandomStream& rng) {
    if (node.routing_table.empty())
        return std::nullopt;

    std::size_t alive_count = 0;
    double alive_mass = 0.0;
    for (std::size_t i = 0; i < node.routing_table.size(); ++i) {
        if (alive[node.routing_table[i].parent_id]) {
            ++alive_count;
            alive_mass += node.automaton[i];
        }
    }
    if (alive_count == 0)
        return std::nullopt;

    std::size_t pick = node.routing_table.size();
    switch (cfg.variant) {
    case ProtocolVariant::Lalarpl: {
        // Mask dead entries, keep live masses, rescale by their total: one
        // uniform draw regardless of how many parents died.
        std::vector<double> masked(node.routing_table.size(), 0.0);
        bool any_mass = false;
        for (std::size_t i = 0; i < node.routing_table.size(); ++i) {
            if (alive[node.routing_table[i].parent_id] && node.automaton[i] > 0.0) {
                masked[i] = node.automaton[i];
                any_mass = true;
            }
        }
        if (!any_mass) {
            // All live entries carry zero mass; fall back to uniform over
            // the live ones so the packet still has a route.
            for (std::size_t i = 0; i < node.routing_table.size(); ++i)
                masked[i] = alive[node.routing_table[i].parent_id] ? 1.0 : 0.0;
            alive_mass = static_cast<double>(alive_count);
        }
        pick = rng.pick_index(masked, alive_mass);
        break;
    }
    case ProtocolVariant::Minhop: {
        int best_hops = 0;
        NodeId best_id = kInvalidNode;
        for (std::size_t i = 0; i < node.routing_table.size(); ++i) {
            const auto& e = node.routing_table[i];
            if (!alive[e.parent_id])
                continue;
            if (pick == node.routing_table.size() || e.hop_count < best_hops ||
                (e.hop_count == best_hops && e.parent_id < best_id)) {
                pick = i;
                best_hops = e.hop_count;
                best_id = e.parent_id;
            }
        }
        break;
    }
    case ProtocolVariant::Random: {
        std::vector<double> uniform(node.routing_table.size(), 0.0);
        for (std::size_t i = 0; i < node.routing_table.size(); ++i)
            uniform[i] = alive[node.routing_table[i].parent_id] ? 1.0 : 0.0;
        pick = rng.pick_index(uniform, static_cast<double>(alive_count));
        break;
    }
    }

    ++node.tx_batch_counters[pick];
    return pick;
}

bool register_child_packet(NodeState& parent, NodeId child,
                           std::uint32_t batch_p) {
    if (batch_p == 0)
        throw std::invalid_argument("register_child_packet: batch_p must be >= 1");
    const std::uint64_t count = ++parent.child_rx_counts[child];
    return count % batch_p == 0;
}

FeedbackKind classify_feedback(double ack_ti, std::span<const double> other_tis,
                               int sender_hops,
                               std::span<const int> table_hops) {
    if (other_tis.empty())
        return FeedbackKind::Neutral; // single-parent table: no comparison
    double avg = 0.0;
    for (double ti : other_tis)
        avg += ti;
    avg /= static_cast<double>(other_tis.size());

    if (ack_ti < 0.5 * avg)
        return FeedbackKind::Reward;
    if (ack_ti < 0.8 * avg) {
        const int min_hops = *std::min_element(table_hops.begin(),
                                               table_hops.end());
        if (sender_hops == min_hops)
            return FeedbackKind::Reward;
    }
    if (ack_ti > avg)
        return FeedbackKind::Penalty;
    return FeedbackKind::Neutral;
}

AckOutcome on_ack_received(NodeState& child, const AckPacket& ack,
                           const DodagState& dodag, const ProtocolConfig& cfg,
                           StepDiagnostics& diag) {
    AckOutcome outcome;
    std::size_t idx = child.routing_table.size();
    for (std::size_t i = 0; i < child.routing_table.size(); ++i) {
        if (child.routing_table[i].parent_id == ack.sender) {
            idx = i;
            break;
        }
    }
    if (idx == child.routing_table.size())
        return outcome; // stale ack from a parent dropped at re-formation
    outcome.known_parent = true;

    if (cfg.variant != ProtocolVariant::Lalarpl ||
        child.routing_table.size() == 1) {
        child.routing_table[idx].traffic_index = ack.traffic_index;
        return outcome;
    }

    std::vector<double> other_tis;
    std::vector<int> table_hops;
    double max_ti = ack.traffic_index;
    other_tis.reserve(child.routing_table.size() - 1);
    table_hops.reserve(child.routing_table.size());
    for (std::size_t i = 0; i < child.routing_table.size(); ++i) {
        table_hops.push_back(child.routing_table[i].hop_count);
        if (i != idx) {
            other_tis.push_back(child.routing_table[i].traffic_index);
            max_ti = std::max(max_ti, child.routing_table[i].traffic_index);
        }
    }
    const int sender_hops = child.routing_table[idx].hop_count;

    outcome.kind = classify_feedback(ack.traffic_index, other_tis, sender_hops,
                                     table_hops);
    switch (outcome.kind) {
    case FeedbackKind::Reward:
        outcome.step = compute_alpha(ack.traffic_index, sender_hops,
                                     dodag.max_hop, max_ti, cfg.automaton,
                                     &diag);
        child.automaton.reward(idx, outcome.step);
        break;
    case FeedbackKind::Penalty: {
        double avg = 0.0;
        for (double ti : other_tis)
            avg += ti;
        avg /= static_cast<double>(other_tis.size());
        outcome.step = compute_beta(avg, ack.traffic_index, sender_hops,
                                    dodag.max_hop, cfg.automaton, &diag);
        child.automaton.penalize(idx, outcome.step);
        break;
    }
    case FeedbackKind::Neutral:
        break;
    }

    child.routing_table[idx].traffic_index = ack.traffic_index;
    for (std::size_t i = 0; i < child.routing_table.size(); ++i)
        child.routing_table[i].selection_probability = child.automaton[i];
    return outcome;
}

} // namespace lalarpl
