#include "lalarpl/simcore.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <set>

namespace lalarpl {

namespace {

struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time)
            return a.time > b.time; // min-heap
        return a.seq > b.seq;
    }
};

struct ReportInputs {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t drops_link = 0;
    std::uint64_t drops_buffer = 0;
    std::uint64_t drops_no_route = 0;
    std::uint64_t drops_node_dead = 0;
    std::vector<double> latencies;        // delivery order
    std::vector<double> throughput;       // per sensor, node id order
    std::vector<double> weighted;         // per sensor
    std::vector<double> energy;           // per sensor
    std::vector<double> death_times;      // dead sensors, node id order
    std::uint64_t survivors = 0;
    double lifetime_cap = 0.0;
    std::uint64_t n_sensors = 0;
};

MetricsReport build_report(const ReportInputs& in) {
    MetricsReport r;
    r.pdr = pdr(in.sent, in.delivered);
    r.throughput_per_node = in.throughput;
    r.weighted_throughput_per_node = in.weighted;
    r.jfi_throughput = jain_fairness(in.weighted);
    r.aeed = avg_end_to_end_delay(in.latencies);
    r.energy_per_node = in.energy;
    r.jfi_energy = jain_fairness(in.energy);
    r.death_times = in.death_times;
    r.altn = altn(in.death_times, in.survivors, in.lifetime_cap, in.n_sensors);
    r.packets_sent = in.sent;
    r.packets_received = in.delivered;
    r.packets_dropped = in.dropped;
    r.drops_link = in.drops_link;
    r.drops_buffer = in.drops_buffer;
    r.drops_no_route = in.drops_no_route;
    r.drops_node_dead = in.drops_node_dead;
    return r;
}

class Engine {
public:
    explicit Engine(ScenarioConfig cfg)
        : cfg_(std::move(cfg)),
          loss_rng_(RandomStream::derive(0, StreamId::Loss)),
          automaton_rng_(RandomStream::derive(0, StreamId::Automaton)) {
        cfg_.validate();
        loss_rng_ = RandomStream::derive(cfg_.seed, StreamId::Loss);
        automaton_rng_ = RandomStream::derive(cfg_.seed, StreamId::Automaton);
        data_air_ = cfg_.packet_size * 8.0 / cfg_.data_rate;
        ack_air_ = cfg_.dao_ack_size * 8.0 / cfg_.data_rate;
        dio_air_ = cfg_.dio_size * 8.0 / cfg_.data_rate;
    }

    RunResult run() {
        setup();
        while (!events_.empty()) {
            const Event e = events_.top();
            events_.pop();
            now_ = e.time;
            if (e.kind == EventKind::EndOfSim) {
                handle_end();
                break;
            }
            switch (e.kind) {
            case EventKind::GenPacket:
                handle_gen(e);
                break;
            case EventKind::TxStart:
                handle_tx_start(e);
                break;
            case EventKind::RxComplete:
                handle_rx_complete(e);
                break;
            case EventKind::AckDelivery:
                handle_ack_delivery(e);
                break;
            case EventKind::DioRound:
                handle_dio_round(e);
                break;
            case EventKind::MetricSample:
                handle_metric_sample();
                break;
            case EventKind::EndOfSim:
                break;
            }
        }

        RunResult result;
        result.report = make_online_report();
        result.log = std::move(log_);
        result.topology = std::move(topo_);
        result.packets = std::move(packets_);
        result.nodes = std::move(nodes_);
        result.step_diagnostics = diag_;
        result.stale_acks = stale_acks_;
        return result;
    }

private:
    // --- setup -----------------------------------------------------------

    void setup() {
        RandomStream placement_rng =
            RandomStream::derive(cfg_.seed, StreamId::Placement);
        const auto positions =
            place_nodes(cfg_.n_nodes, cfg_.area_width, cfg_.area_height,
                        cfg_.radio_range, cfg_.placement, placement_rng);
        topo_ = build_links(positions, cfg_.radio_range, true);

        nodes_.resize(cfg_.n_nodes);
        alive_.assign(cfg_.n_nodes, 1);
        link_of_.resize(cfg_.n_nodes);
        for (NodeId i = 0; i < cfg_.n_nodes; ++i) {
            NodeState& node = nodes_[i];
            node.id = i;
            node.role = i == 0 ? NodeRole::Sink : NodeRole::Sensor;
            node.pos = positions[i];
            node.initial_energy =
                i == 0 ? std::numeric_limits<double>::infinity()
                       : cfg_.initial_energy;
            node.energy_remaining = node.initial_energy;
            node.ledger.p_tx = cfg_.power.tx;
            node.ledger.p_rx = cfg_.power.rx;
            node.ledger.p_idle = cfg_.power.idle;
            node.ledger.p_sleep = cfg_.power.sleep;
            for (const auto& [peer, li] : topo_.neighbors[i])
                link_of_[i][peer] = li;
        }

        // EndOfSim is scheduled first so it outranks any same-time event.
        schedule({cfg_.sim_time, 0, EventKind::EndOfSim});
        schedule({0.0, 0, EventKind::DioRound});
        for (std::uint64_t j = 1;; ++j) {
            const double t = static_cast<double>(j) * cfg_.dio_period;
            if (t >= cfg_.sim_time)
                break;
            schedule({t, 0, EventKind::DioRound});
        }
        for (std::uint64_t k = 1;; ++k) {
            const double t = static_cast<double>(k) * cfg_.metric_dt;
            if (t >= cfg_.sim_time)
                break;
            schedule({t, 0, EventKind::MetricSample});
        }
        const auto per_sensor = static_cast<std::uint64_t>(
            cfg_.lambda * cfg_.sim_time + 1e-9);
        for (NodeId i = 1; i < cfg_.n_nodes; ++i) {
            for (std::uint64_t k = 0; k < per_sensor; ++k) {
                Event e;
                e.time = static_cast<double>(k) / cfg_.lambda;
                e.kind = EventKind::GenPacket;
                e.node = i;
                schedule(e);
            }
        }
    }

    void schedule(Event e) {
        e.seq = next_seq_++;
        events_.push(e);
    }

    // --- energy bookkeeping ----------------------------------------------
    // Every charge ends at the current event time; the per-node ledger time
    // frontier (last_energy_update) therefore never leads the simulation,
    // and total ledger time always equals the frontier exactly.

    void log_energy(const NodeState& node, RadioState state, double dur,
                    double joules) {
        if (dur <= 0.0)
            return;
        LogRecord rec;
        rec.time = now_;
        rec.kind = LogKind::Energy;
        rec.a = node.id;
        rec.tag = static_cast<std::uint8_t>(state);
        rec.v0 = dur;
        rec.v1 = joules;
        log_.push_back(rec);
    }

    void check_death(NodeState& node) {
        if (node.alive || !alive_[node.id])
            return;
        alive_[node.id] = 0;
        for (const auto& q : node.queue)
            drop_packet(q.packet, PacketStatus::DroppedNodeDead, node.id);
        node.queue.clear();
        LogRecord rec;
        rec.time = now_;
        rec.kind = LogKind::Death;
        rec.a = node.id;
        rec.v0 = node.death_time;
        log_.push_back(rec);
    }

    void sync_idle(NodeState& node) {
        if (!node.alive)
            return;
        const double budget = now_ - node.last_energy_update;
        node.last_energy_update = now_;
        if (budget <= 0.0)
            return;
        consume_energy(node, RadioState::Idle, budget, now_ - budget);
        check_death(node);
    }

    // Idle gap first, then `dur` seconds of tx/rx ending exactly at the
    // event time. A frontier already inside the activity span truncates it
    // (overlapping airtime is charged once; the radio is a single resource).
    void sync_activity(NodeState& node, RadioState state, double dur) {
        if (!node.alive)
            return;
        const double budget = now_ - node.last_energy_update;
        node.last_energy_update = now_;
        if (budget <= 0.0)
            return;
        const double act = std::min(dur, budget);
        const double idle = budget - act;
        if (idle > 0.0) {
            consume_energy(node, RadioState::Idle, idle, now_ - budget);
            if (!node.alive) {
                check_death(node);
                return;
            }
        }
        if (act > 0.0) {
            const double t_before =
                state == RadioState::Tx ? node.ledger.t_tx : node.ledger.t_rx;
            const double e_before = energy_total(node.ledger);
            consume_energy(node, state, act, now_ - act);
            const double charged =
                (state == RadioState::Tx ? node.ledger.t_tx
                                         : node.ledger.t_rx) -
                t_before;
            log_energy(node, state, charged,
                       energy_total(node.ledger) - e_before);
            check_death(node);
        }
    }

    // --- packet plumbing ---------------------------------------------------

    void drop_packet(std::uint64_t pid, PacketStatus status, NodeId where) {
        packets_[pid].status = status;
        ++dropped_;
        switch (status) {
        case PacketStatus::DroppedLink:
            ++drops_link_;
            break;
        case PacketStatus::DroppedBuffer:
            ++drops_buffer_;
            break;
        case PacketStatus::DroppedNoRoute:
            ++drops_no_route_;
            break;
        case PacketStatus::DroppedNodeDead:
            ++drops_node_dead_;
            break;
        default:
            break;
        }
        LogRecord rec;
        rec.time = now_;
        rec.kind = LogKind::Drop;
        rec.a = where;
        rec.packet = pid;
        rec.tag = static_cast<std::uint8_t>(status);
        log_.push_back(rec);
    }

    void ensure_tx_scheduled(NodeState& node, double ready) {
        if (node.tx_scheduled)
            return;
        Event e;
        e.time = std::max(ready, node.busy_until);
        e.kind = EventKind::TxStart;
        e.node = node.id;
        schedule(e);
        node.tx_scheduled = true;
    }

    // Admission at a hop: route check, bounded FIFO, tx kick.
    void admit_packet(NodeState& node, std::uint64_t pid) {
        if (node.routing_table.empty()) {
            drop_packet(pid, PacketStatus::DroppedNoRoute, node.id);
            return;
        }
        if (node.queue.size() >= cfg_.queue_capacity) {
            drop_packet(pid, PacketStatus::DroppedBuffer, node.id);
            return;
        }
        const double ready = now_ + cfg_.proc_delay;
        node.queue.push_back({pid, ready});
        ensure_tx_scheduled(node, ready);
    }

    void handle_gen(const Event& e) {
        NodeState& node = nodes_[e.node];
        if (!node.alive)
            return; // a dead source offers nothing
        sync_idle(node);
        if (!node.alive)
            return;
        const std::uint64_t pid = packets_.size();
        PacketState pkt;
        pkt.src = e.node;
        pkt.created_at = now_;
        pkt.size_bytes = cfg_.packet_size;
        packets_.push_back(pkt);
        ++sent_;
        LogRecord rec;
        rec.time = now_;
        rec.kind = LogKind::Gen;
        rec.a = e.node;
        rec.packet = pid;
        rec.v0 = cfg_.packet_size * 8.0;
        log_.push_back(rec);
        admit_packet(node, pid);
    }

    void handle_tx_start(const Event& e) {
        NodeState& node = nodes_[e.node];
        node.tx_scheduled = false;
        if (!node.alive)
            return;
        sync_idle(node);
        if (!node.alive)
            return;
        while (!node.queue.empty()) {
            const QueuedPacket head = node.queue.front();
            if (head.ready_time > now_) {
                ensure_tx_scheduled(node, head.ready_time);
                return;
            }
            const auto pick =
                choose_parent(node, alive_, cfg_.protocol, automaton_rng_);
            node.queue.pop_front();
            if (!pick) {
                drop_packet(head.packet, PacketStatus::DroppedNoRoute, node.id);
                continue; // try the next queued packet at this instant
            }
            const ParentEntry& entry = node.routing_table[*pick];
            const std::uint32_t li = link_of_[node.id].at(entry.parent_id);
            const Link& link = topo_.links[li];
            const double wait = now_ - head.ready_time;
            packets_[head.packet].per_hop.push_back(
                {cfg_.proc_delay, wait, data_air_, link.prop_delay});
            node.busy_until = now_ + data_air_;
            if (!node.queue.empty())
                ensure_tx_scheduled(node, node.queue.front().ready_time);
            LogRecord rec;
            rec.time = now_;
            rec.kind = LogKind::DataTx;
            rec.a = node.id;
            rec.b = entry.parent_id;
            rec.packet = head.packet;
            rec.v0 = data_air_;
            rec.v1 = wait;
            log_.push_back(rec);
            Event rx;
            rx.time = now_ + data_air_ + link.prop_delay;
            rx.kind = EventKind::RxComplete;
            rx.node = entry.parent_id;
            rx.peer = node.id;
            rx.packet = head.packet;
            rx.link = li;
            schedule(rx);
            return;
        }
    }

    void ack_progress(NodeState& parent, NodeId child, std::uint32_t li) {
        if (!register_child_packet(parent, child, cfg_.protocol.batch_p))
            return;
        AckPacket ack;
        ack.sender = parent.id;
        ack.traffic_index = parent.current_ti;
        ack.covers = cfg_.protocol.batch_p;
        LogRecord rec;
        rec.time = now_;
        rec.kind = LogKind::AckTx;
        rec.a = parent.id;
        rec.b = child;
        rec.v0 = ack_air_;
        log_.push_back(rec);
        Event e;
        e.time = now_ + ack_air_ + topo_.links[li].prop_delay;
        e.kind = EventKind::AckDelivery;
        e.node = child;
        e.peer = parent.id;
        e.link = li;
        e.ack = ack;
        schedule(e);
    }

    void handle_rx_complete(const Event& e) {
        // The sender's airtime is charged here, at the end of the
        // transmission, so ledger time never leads the clock.
        NodeState& sender = nodes_[e.peer];
        if (sender.alive) {
            sync_activity(sender, RadioState::Tx, data_air_);
        }
        NodeState& node = nodes_[e.node];
        if (!node.alive) {
            drop_packet(e.packet, PacketStatus::DroppedNodeDead, e.node);
            return;
        }
        sync_activity(node, RadioState::Rx, data_air_);
        if (!node.alive) {
            drop_packet(e.packet, PacketStatus::DroppedNodeDead, e.node);
            return;
        }
        const Link& link = topo_.links[e.link];
        const double p_loss = cfg_.loss_scale * (1.0 - link.lqi);
        if (loss_rng_.uniform01() < p_loss) {
            drop_packet(e.packet, PacketStatus::DroppedLink, e.node);
            return;
        }
        PacketState& pkt = packets_[e.packet];
        ++pkt.hops_taken;
        const double bits = pkt.size_bytes * 8.0;
        node.window_bits += bits;
        node.window_weighted_bits += bits * link.lqi;
        node.window_child_bits[e.peer] += bits;
        if (node.role == NodeRole::Sink) {
            pkt.status = PacketStatus::Delivered;
            pkt.delivered_at = now_;
            ++delivered_;
            const double latency = now_ - pkt.created_at;
            latencies_.push_back(latency);
            LogRecord rec;
            rec.time = now_;
            rec.kind = LogKind::Deliver;
            rec.a = node.id;
            rec.b = e.peer;
            rec.packet = e.packet;
            rec.v0 = bits;
            rec.v1 = link.lqi;
            rec.v2 = latency;
            log_.push_back(rec);
            ack_progress(node, e.peer, e.link);
            return;
        }
        LogRecord rec;
        rec.time = now_;
        rec.kind = LogKind::DataRx;
        rec.a = node.id;
        rec.b = e.peer;
        rec.packet = e.packet;
        rec.v0 = bits;
        rec.v1 = link.lqi;
        log_.push_back(rec);
        if (node.routing_table.empty()) {
            drop_packet(e.packet, PacketStatus::DroppedNoRoute, node.id);
            return;
        }
        if (node.queue.size() >= cfg_.queue_capacity) {
            // No ack progress for a packet the buffer rejected.
            drop_packet(e.packet, PacketStatus::DroppedBuffer, node.id);
            return;
        }
        const double ready = now_ + cfg_.proc_delay;
        node.queue.push_back({e.packet, ready});
        ensure_tx_scheduled(node, ready);
        ack_progress(node, e.peer, e.link);
    }

    void handle_ack_delivery(const Event& e) {
        NodeState& parent = nodes_[e.peer];
        if (parent.alive)
            sync_activity(parent, RadioState::Tx, ack_air_);
        NodeState& child = nodes_[e.node];
        if (!child.alive)
            return;
        sync_activity(child, RadioState::Rx, ack_air_);
        if (!child.alive)
            return;
        const AckOutcome outcome =
            on_ack_received(child, e.ack, dodag_, cfg_.protocol, diag_);
        if (!outcome.known_parent) {
            ++stale_acks_;
            return;
        }
        LogRecord rec;
        rec.time = now_;
        rec.kind = LogKind::AckRx;
        rec.a = child.id;
        rec.b = e.peer;
        rec.v0 = e.ack.traffic_index;
        rec.tag = static_cast<std::uint8_t>(outcome.kind);
        log_.push_back(rec);
        if (outcome.kind != FeedbackKind::Neutral) {
            LogRecord upd;
            upd.time = now_;
            upd.kind = LogKind::Update;
            upd.a = child.id;
            upd.b = e.peer;
            upd.v0 = outcome.step;
            upd.tag = static_cast<std::uint8_t>(outcome.kind);
            log_.push_back(upd);
        }
    }

    // --- control plane -----------------------------------------------------

    void handle_dio_round(const Event& e) {
        const bool bootstrap = e.time == 0.0;
        dodag_ = compute_hop_counts(topo_, alive_);
        for (NodeId i = 0; i < cfg_.n_nodes; ++i)
            nodes_[i].hop_count = dodag_.hops[i];

        std::vector<char> is_sender(cfg_.n_nodes, 0);
        std::vector<DioIndicator> dio_of(cfg_.n_nodes);
        for (NodeId i = 0; i < cfg_.n_nodes; ++i) {
            if (alive_[i] && nodes_[i].hop_count >= 0) {
                is_sender[i] = 1;
                dio_of[i] = make_dio(nodes_[i]);
            }
        }

        if (!bootstrap) {
            for (NodeId i = 0; i < cfg_.n_nodes; ++i) {
                if (!alive_[i])
                    continue;
                if (is_sender[i]) {
                    LogRecord rec;
                    rec.time = now_;
                    rec.kind = LogKind::DioTx;
                    rec.a = i;
                    log_.push_back(rec);
                }
            }
            // Airtime for the whole round is squeezed into the gap since each
            // node's last activity, proportionally truncated if the gap is
            // shorter, so ledger time still equals elapsed time exactly.
            for (NodeId i = 0; i < cfg_.n_nodes; ++i) {
                NodeState& node = nodes_[i];
                if (!node.alive)
                    continue;
                std::vector<NodeId> heard_from;
                for (const auto& [peer, li] : topo_.neighbors[i]) {
                    (void)li;
                    if (is_sender[peer] && peer != i)
                        heard_from.push_back(peer);
                }
                std::sort(heard_from.begin(), heard_from.end());
                const double budget = now_ - node.last_energy_update;
                node.last_energy_update = now_;
                const double planned =
                    (is_sender[i] + static_cast<double>(heard_from.size())) *
                    dio_air_;
                if (budget <= 0.0)
                    continue;
                const double scale =
                    planned > budget && planned > 0.0 ? budget / planned : 1.0;
                const double control = planned * scale;
                double cursor = now_ - budget;
                if (budget - control > 0.0) {
                    consume_energy(node, RadioState::Idle, budget - control,
                                   cursor);
                    cursor += budget - control;
                    if (!node.alive) {
                        check_death(node);
                        continue;
                    }
                }
                if (is_sender[i] && control > 0.0) {
                    const double e_before = energy_total(node.ledger);
                    const double t_before = node.ledger.t_tx;
                    consume_energy(node, RadioState::Tx, dio_air_ * scale,
                                   cursor);
                    cursor += dio_air_ * scale;
                    log_energy(node, RadioState::Tx,
                               node.ledger.t_tx - t_before,
                               energy_total(node.ledger) - e_before);
                    if (!node.alive) {
                        check_death(node);
                        continue;
                    }
                }
                bool died = false;
                for (NodeId peer : heard_from) {
                    LogRecord rec;
                    rec.time = now_;
                    rec.kind = LogKind::DioRx;
                    rec.a = i;
                    rec.b = peer;
                    log_.push_back(rec);
                    if (control <= 0.0)
                        continue;
                    const double e_before = energy_total(node.ledger);
                    const double t_before = node.ledger.t_rx;
                    consume_energy(node, RadioState::Rx, dio_air_ * scale,
                                   cursor);
                    cursor += dio_air_ * scale;
                    log_energy(node, RadioState::Rx,
                               node.ledger.t_rx - t_before,
                               energy_total(node.ledger) - e_before);
                    if (!node.alive) {
                        check_death(node);
                        died = true;
                        break;
                    }
                }
                if (died)
                    continue;
            }
        }

        // Table maintenance, ascending node id, from the round's snapshot.
        for (NodeId i = 1; i < cfg_.n_nodes; ++i) {
            NodeState& node = nodes_[i];
            if (!node.alive)
                continue;
            if (node.hop_count < 0) {
                if (!node.routing_table.empty()) {
                    node.routing_table.clear();
                    node.tx_batch_counters.clear();
                    node.automaton = ProbabilityVector();
                    node.formation_hop = -1;
                    log_formation(node);
                }
                continue;
            }
            std::vector<DioIndicator> heard;
            for (const auto& [peer, li] : topo_.neighbors[i]) {
                (void)li;
                if (is_sender[peer])
                    heard.push_back(dio_of[peer]);
            }
            std::sort(heard.begin(), heard.end(),
                      [](const DioIndicator& a, const DioIndicator& b) {
                          return a.sender < b.sender;
                      });
            std::size_t eligible = 0;
            for (const auto& dio : heard) {
                if (dio.min_hops_to_root < node.hop_count)
                    ++eligible;
            }
            if (needs_reformation(node, heard, eligible)) {
                form_parent_set(node, heard, cfg_.protocol);
                log_formation(node);
            }
        }
    }

    // A fresh automaton forgets everything learned, so re-form only when the
    // current table is degraded. Otherwise refresh the stored columns from
    // this round's beacons.
    bool needs_reformation(NodeState& node,
                           const std::vector<DioIndicator>& heard,
                           std::size_t eligible) {
        if (node.routing_table.empty())
            return eligible > 0;
        if (node.formation_hop != node.hop_count)
            return true;
        if (node.routing_table.size() <
            std::min<std::size_t>(cfg_.protocol.min_parents, eligible))
            return true;
        for (auto& entry : node.routing_table) {
            if (!alive_[entry.parent_id])
                return true;
            const DioIndicator* dio = nullptr;
            for (const auto& h : heard) {
                if (h.sender == entry.parent_id) {
                    dio = &h;
                    break;
                }
            }
            if (dio == nullptr || dio->min_hops_to_root >= node.hop_count)
                return true;
            entry.hop_count = dio->min_hops_to_root;
            entry.traffic_index = dio->traffic_index;
        }
        return false;
    }

    void log_formation(const NodeState& node) {
        LogRecord rec;
        rec.time = now_;
        rec.kind = LogKind::Formation;
        rec.a = node.id;
        rec.v0 = static_cast<double>(node.routing_table.size());
        log_.push_back(rec);
    }

    // --- windows and reporting ---------------------------------------------

    void close_window() {
        for (NodeId i = 0; i < cfg_.n_nodes; ++i) {
            NodeState& node = nodes_[i];
            const double w_tput = node.window_bits / cfg_.metric_dt;
            const double w_weighted =
                (node.window_weighted_bits / cfg_.metric_dt) *
                std::log1p(static_cast<double>(node.window_child_bits.size()));
            std::vector<ChildContribution> contribs;
            contribs.reserve(node.window_child_bits.size());
            for (const auto& [child, bits] : node.window_child_bits) {
                (void)child;
                contribs.push_back({1.0, bits / cfg_.metric_dt});
            }
            node.current_ti = traffic_index(contribs, cfg_.capacity_bits);
            if (node.role == NodeRole::Sensor) {
                node.sum_window_throughput += w_tput;
                node.sum_window_weighted += w_weighted;
                LogRecord rec;
                rec.time = now_;
                rec.kind = LogKind::Sample;
                rec.a = i;
                rec.v0 = w_tput;
                rec.v1 = node.infinite_energy() ? 0.0 : node.energy_remaining;
                rec.tag = node.alive ? 1 : 0;
                log_.push_back(rec);
            }
            node.window_bits = 0.0;
            node.window_weighted_bits = 0.0;
            node.window_child_bits.clear();
        }
        ++windows_closed_;
    }

    void handle_metric_sample() {
        for (NodeId i = 0; i < cfg_.n_nodes; ++i)
            sync_idle(nodes_[i]);
        close_window();
    }

    void handle_end() {
        for (NodeId i = 0; i < cfg_.n_nodes; ++i)
            sync_idle(nodes_[i]);
        close_window();
        LogRecord rec;
        rec.time = now_;
        rec.kind = LogKind::End;
        log_.push_back(rec);
    }

    MetricsReport make_online_report() const {
        ReportInputs in;
        in.sent = sent_;
        in.delivered = delivered_;
        in.dropped = dropped_;
        in.drops_link = drops_link_;
        in.drops_buffer = drops_buffer_;
        in.drops_no_route = drops_no_route_;
        in.drops_node_dead = drops_node_dead_;
        in.latencies = latencies_;
        in.lifetime_cap = cfg_.lifetime_cap;
        in.n_sensors = cfg_.n_nodes - 1;
        const double w = static_cast<double>(windows_closed_);
        for (NodeId i = 1; i < cfg_.n_nodes; ++i) {
            const NodeState& node = nodes_[i];
            in.throughput.push_back(node.sum_window_throughput / w);
            in.weighted.push_back(node.sum_window_weighted / w);
            in.energy.push_back(energy_total(node.ledger));
            if (node.alive)
                ++in.survivors;
            else
                in.death_times.push_back(node.death_time);
        }
        return build_report(in);
    }

    ScenarioConfig cfg_;
    double data_air_ = 0.0;
    double ack_air_ = 0.0;
    double dio_air_ = 0.0;

    Topology topo_;
    std::vector<NodeState> nodes_;
    std::vector<char> alive_;
    std::vector<std::map<NodeId, std::uint32_t>> link_of_;
    DodagState dodag_;
    std::vector<PacketState> packets_;
    EventLog log_;

    std::priority_queue<Event, std::vector<Event>, EventOrder> events_;
    std::uint64_t next_seq_ = 0;
    double now_ = 0.0;

    RandomStream loss_rng_;
    RandomStream automaton_rng_;

    std::vector<double> latencies_;
    std::uint64_t sent_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t drops_link_ = 0;
    std::uint64_t drops_buffer_ = 0;
    std::uint64_t drops_no_route_ = 0;
    std::uint64_t drops_node_dead_ = 0;
    std::size_t windows_closed_ = 0;
    StepDiagnostics diag_;
    std::uint64_t stale_acks_ = 0;
};

} // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    Engine engine(cfg);
    return engine.run();
}

MetricsReport replay_oracle(const EventLog& log, const ScenarioConfig& cfg) {
    ScenarioConfig resolved = cfg;
    resolved.validate();
    if (log.empty() || log.back().kind != LogKind::End)
        throw std::runtime_error(
            "replay_oracle: truncated log (no end-of-run record)");

    // Window boundaries recomputed with the engine's own schedule predicate,
    // so bucketing agrees bit for bit.
    std::vector<double> boundaries;
    for (std::uint64_t k = 1;; ++k) {
        const double t = static_cast<double>(k) * resolved.metric_dt;
        if (t >= resolved.sim_time)
            break;
        boundaries.push_back(t);
    }
    const std::size_t W = boundaries.size() + 1;
    const std::uint32_t n = resolved.n_nodes;

    ReportInputs in;
    in.lifetime_cap = resolved.lifetime_cap;
    in.n_sensors = n - 1;

    std::vector<std::vector<double>> win_bits(n, std::vector<double>(W, 0.0));
    std::vector<std::vector<double>> win_weighted(n,
                                                  std::vector<double>(W, 0.0));
    std::vector<std::vector<std::set<NodeId>>> win_children(
        n, std::vector<std::set<NodeId>>(W));
    std::vector<double> t_tx(n, 0.0), t_rx(n, 0.0);
    std::vector<double> death_time(n, -1.0);

    auto window_of = [&](double t) {
        return static_cast<std::size_t>(
            std::upper_bound(boundaries.begin(), boundaries.end(), t) -
            boundaries.begin());
    };

    for (const LogRecord& rec : log) {
        switch (rec.kind) {
        case LogKind::Gen:
            ++in.sent;
            break;
        case LogKind::Deliver:
            ++in.delivered;
            in.latencies.push_back(rec.v2);
            break;
        case LogKind::DataRx: {
            const std::size_t w = window_of(rec.time);
            win_bits[rec.a][w] += rec.v0;
            win_weighted[rec.a][w] += rec.v0 * rec.v1;
            win_children[rec.a][w].insert(rec.b);
            break;
        }
        case LogKind::Drop:
            ++in.dropped;
            switch (static_cast<PacketStatus>(rec.tag)) {
            case PacketStatus::DroppedLink:
                ++in.drops_link;
                break;
            case PacketStatus::DroppedBuffer:
                ++in.drops_buffer;
                break;
            case PacketStatus::DroppedNoRoute:
                ++in.drops_no_route;
                break;
            case PacketStatus::DroppedNodeDead:
                ++in.drops_node_dead;
                break;
            default:
                break;
            }
            break;
        case LogKind::Energy:
            if (static_cast<RadioState>(rec.tag) == RadioState::Tx)
                t_tx[rec.a] += rec.v0;
            else if (static_cast<RadioState>(rec.tag) == RadioState::Rx)
                t_rx[rec.a] += rec.v0;
            break;
        case LogKind::Death:
            death_time[rec.a] = rec.v0;
            break;
        default:
            break;
        }
    }

    for (NodeId i = 1; i < n; ++i) {
        double sum_tput = 0.0;
        double sum_weighted = 0.0;
        for (std::size_t w = 0; w < W; ++w) {
            sum_tput += win_bits[i][w] / resolved.metric_dt;
            sum_weighted +=
                (win_weighted[i][w] / resolved.metric_dt) *
                std::log1p(static_cast<double>(win_children[i][w].size()));
        }
        in.throughput.push_back(sum_tput / static_cast<double>(W));
        in.weighted.push_back(sum_weighted / static_cast<double>(W));

        EnergyLedger ledger;
        ledger.p_tx = resolved.power.tx;
        ledger.p_rx = resolved.power.rx;
        ledger.p_idle = resolved.power.idle;
        ledger.p_sleep = resolved.power.sleep;
        ledger.t_tx = t_tx[i];
        ledger.t_rx = t_rx[i];
        const double end_time =
            death_time[i] >= 0.0 ? death_time[i] : resolved.sim_time;
        ledger.t_idle = std::max(0.0, end_time - t_tx[i] - t_rx[i]);
        in.energy.push_back(energy_total(ledger));

        if (death_time[i] >= 0.0)
            in.death_times.push_back(death_time[i]);
        else
            ++in.survivors;
    }

    return build_report(in);
}

std::optional<std::string> verify_replay(const RunResult& result,
                                         const ScenarioConfig& cfg,
                                         double rel_tol) {
    const MetricsReport replayed = replay_oracle(result.log, cfg);
    return compare_reports(result.report, replayed, rel_tol);
}

} // namespace lalarpl
