#include "lalarpl/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace lalarpl {

namespace {

constexpr double kSpeedOfLight = 3e8; // m/s
constexpr double kPi = 3.141592653589793;
constexpr int kMaxPlacementAttempts = 1000000;

// Connected-growth shape: new nodes land between 40% and 100% of one radio
// range from their anchor and at least 35% of a range from everything else
// (a soft minimum separation, abandoned after kSeparationAttempts draws so
// saturated neighborhoods cannot stall placement).
constexpr double kAnnulusInnerFactor = 0.4;
constexpr double kMinSeparationFactor = 0.35;
constexpr int kSeparationAttempts = 200;

double dist(const Position& p, const Position& q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

} // namespace

std::vector<Position> place_nodes(std::size_t n, double width, double height,
                                  double radio_range, PlacementMode mode,
                                  RandomStream& rng) {
    if (n < 2)
        throw std::invalid_argument("place_nodes: need a sink and >= 1 sensor");
    if (!(width > 0.0 && height > 0.0))
        throw std::invalid_argument("place_nodes: area must be positive");
    if (!(radio_range > 0.0))
        throw std::invalid_argument("place_nodes: radio range must be positive");

    std::vector<Position> pos;
    pos.reserve(n);
    pos.push_back({width / 2.0, height / 2.0}); // sink
    for (std::size_t i = 1; i < n; ++i) {
        if (mode == PlacementMode::Uniform) {
            pos.push_back({rng.uniform(0.0, width), rng.uniform(0.0, height)});
            continue;
        }
        // Connected growth: a point uniform over an annulus of one radio
        // range around a uniformly chosen placed node, kept a minimum
        // separation away from everything else (relaxed if the draw keeps
        // failing). Connectivity holds by construction; the separation keeps
        // local degree moderate while most nodes still see several
        // candidate parents.
        const double min_sep = kMinSeparationFactor * radio_range;
        const double inner2 = kAnnulusInnerFactor * kAnnulusInnerFactor;
        int attempts = 0;
        for (;;) {
            const auto anchor = static_cast<std::size_t>(
                rng.uniform01() * static_cast<double>(pos.size()));
            const double r =
                radio_range * std::sqrt(rng.uniform(inner2, 1.0));
            const double theta = rng.uniform(0.0, 2.0 * kPi);
            Position p{pos[anchor].x + r * std::cos(theta),
                       pos[anchor].y + r * std::sin(theta)};
            ++attempts;
            if (p.x < 0.0 || p.x > width || p.y < 0.0 || p.y > height) {
                if (attempts > kMaxPlacementAttempts)
                    throw TopologyError(
                        "place_nodes: connected placement did not converge");
                continue;
            }
            if (attempts <= kSeparationAttempts) {
                bool crowded = false;
                for (const auto& q : pos) {
                    if (dist(p, q) < min_sep) {
                        crowded = true;
                        break;
                    }
                }
                if (crowded)
                    continue;
            }
            pos.push_back(p);
            break;
        }
    }
    return pos;
}

Topology build_links(const std::vector<Position>& positions,
                     double radio_range, bool require_connected) {
    if (positions.size() < 2)
        throw std::invalid_argument("build_links: need at least two nodes");
    if (!(radio_range > 0.0))
        throw std::invalid_argument("build_links: radio range must be positive");

    Topology topo;
    topo.positions = positions;
    topo.radio_range = radio_range;
    topo.neighbors.resize(positions.size());
    for (std::size_t a = 0; a < positions.size(); ++a) {
        for (std::size_t b = a + 1; b < positions.size(); ++b) {
            const double d = dist(positions[a], positions[b]);
            if (d > radio_range)
                continue;
            const double ratio = d / radio_range;
            Link link;
            link.a = static_cast<NodeId>(a);
            link.b = static_cast<NodeId>(b);
            link.distance = d;
            link.lqi = 1.0 - ratio * ratio;
            link.prop_delay = d / kSpeedOfLight;
            const auto idx = static_cast<std::uint32_t>(topo.links.size());
            topo.links.push_back(link);
            topo.neighbors[a].push_back({link.b, idx});
            topo.neighbors[b].push_back({link.a, idx});
        }
    }

    if (require_connected) {
        std::vector<char> alive(positions.size(), 1);
        DodagState dodag = compute_hop_counts(topo, alive);
        std::vector<NodeId> unreachable;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (dodag.hops[i] < 0)
                unreachable.push_back(static_cast<NodeId>(i));
        }
        if (!unreachable.empty()) {
            std::ostringstream os;
            os << "topology disconnected: " << unreachable.size()
               << " node(s) cannot reach the sink:";
            for (NodeId id : unreachable)
                os << ' ' << id;
            throw TopologyError(os.str());
        }
    }
    return topo;
}

DodagState compute_hop_counts(const Topology& topo,
                              const std::vector<char>& alive) {
    if (alive.size() != topo.positions.size())
        throw std::invalid_argument("compute_hop_counts: alive size mismatch");
    DodagState dodag;
    dodag.hops.assign(topo.positions.size(), -1);
    if (!alive[0])
        return dodag; // sink down: nothing is reachable
    std::queue<NodeId> frontier;
    dodag.hops[0] = 0;
    frontier.push(0);
    while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop();
        for (const auto& [v, li] : topo.neighbors[u]) {
            (void)li;
            if (!alive[v] || dodag.hops[v] >= 0)
                continue;
            dodag.hops[v] = dodag.hops[u] + 1;
            dodag.max_hop = std::max(dodag.max_hop, dodag.hops[v]);
            frontier.push(v);
        }
    }
    return dodag;
}

void consume_energy(NodeState& node, RadioState state, double duration,
                    double start_time) {
    if (!node.alive || duration <= 0.0)
        return;
    double* slot = nullptr;
    double power = 0.0;
    switch (state) {
    case RadioState::Tx:
        slot = &node.ledger.t_tx;
        power = node.ledger.p_tx;
        break;
    case RadioState::Rx:
        slot = &node.ledger.t_rx;
        power = node.ledger.p_rx;
        break;
    case RadioState::Idle:
        slot = &node.ledger.t_idle;
        power = node.ledger.p_idle;
        break;
    case RadioState::Sleep:
        slot = &node.ledger.t_sleep;
        power = node.ledger.p_sleep;
        break;
    }

    if (node.infinite_energy() || power == 0.0) {
        *slot += duration;
        return;
    }

    const double affordable = node.energy_remaining / power;
    if (duration < affordable) {
        *slot += duration;
        node.energy_remaining = node.initial_energy - energy_total(node.ledger);
        if (node.energy_remaining <= 0.0) { // exhausted to rounding
            node.energy_remaining = 0.0;
            node.alive = false;
            node.death_time = start_time + duration;
        }
        return;
    }
    // Depletes within this interval: charge exactly what the battery covers.
    *slot += affordable;
    node.energy_remaining = 0.0;
    node.alive = false;
    node.death_time = start_time + affordable;
}

} // namespace lalarpl
