#include "lalarpl/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lalarpl {

double traffic_index(std::span<const ChildContribution> children, double cb) {
    if (!(cb > 0.0))
        throw std::invalid_argument("traffic_index: capacity must be > 0");
    double load = 0.0;
    for (const auto& c : children) {
        if (!(std::isfinite(c.theta) && c.theta >= 0.0 && c.theta <= 1.0))
            throw std::invalid_argument("traffic_index: theta outside [0,1]");
        if (!(std::isfinite(c.traffic) && c.traffic >= 0.0))
            throw std::invalid_argument("traffic_index: negative traffic");
        load += c.theta * c.traffic;
    }
    return std::min(1.0, load / cb);
}

double pdr(std::uint64_t sent, std::uint64_t received) {
    if (received > sent)
        throw std::invalid_argument("pdr: received exceeds sent");
    if (sent == 0)
        return 0.0;
    return static_cast<double>(received) / static_cast<double>(sent);
}

double throughput_basic(std::span<const double> received_bits, double dt) {
    if (!(dt > 0.0))
        throw std::invalid_argument("throughput_basic: dt must be > 0");
    double sum = 0.0;
    for (double b : received_bits) {
        if (!(std::isfinite(b) && b >= 0.0))
            throw std::invalid_argument("throughput_basic: negative bits");
        sum += b;
    }
    return sum / dt;
}

double throughput_weighted(std::span<const WeightedSample> samples, double dt,
                           double child_count) {
    if (!(dt > 0.0))
        throw std::invalid_argument("throughput_weighted: dt must be > 0");
    if (!(std::isfinite(child_count) && child_count >= 0.0))
        throw std::invalid_argument("throughput_weighted: bad child count");
    double sum = 0.0;
    for (const auto& s : samples) {
        if (!(std::isfinite(s.lqi) && s.lqi >= 0.0 && s.lqi <= 1.0))
            throw std::invalid_argument("throughput_weighted: lqi outside [0,1]");
        if (!(std::isfinite(s.bits) && s.bits >= 0.0))
            throw std::invalid_argument("throughput_weighted: negative bits");
        sum += s.bits * s.lqi;
    }
    return (sum / dt) * std::log1p(child_count);
}

double jain_fairness(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("jain_fairness: empty value vector");
    double sum = 0.0, sumsq = 0.0;
    for (double v : values) {
        if (!(std::isfinite(v) && v >= 0.0))
            throw std::invalid_argument("jain_fairness: negative value");
        sum += v;
        sumsq += v * v;
    }
    if (sumsq == 0.0)
        return 1.0; // all zero: equally (un)served
    return (sum * sum) / (static_cast<double>(values.size()) * sumsq);
}

double node_delay(const DelayBreakdown& d) {
    for (double v : {d.proc, d.queue, d.trans, d.prop}) {
        if (!(std::isfinite(v) && v >= 0.0))
            throw std::invalid_argument("node_delay: negative component");
    }
    return d.proc + d.queue + d.trans + d.prop;
}

double link_delay_index(std::span<const DelayBreakdown> hops) {
    double sum = 0.0;
    for (const auto& h : hops)
        sum += node_delay(h);
    return sum;
}

std::optional<double> avg_end_to_end_delay(std::span<const double> latencies) {
    if (latencies.empty())
        return std::nullopt;
    double sum = 0.0;
    for (double l : latencies) {
        if (!(std::isfinite(l) && l >= 0.0))
            throw std::invalid_argument("avg_end_to_end_delay: negative latency");
        sum += l;
    }
    return sum / static_cast<double>(latencies.size());
}

double energy_total(const EnergyLedger& ledger) {
    for (double v : {ledger.p_tx, ledger.p_rx, ledger.p_idle, ledger.p_sleep,
                     ledger.t_tx, ledger.t_rx, ledger.t_idle, ledger.t_sleep}) {
        if (!(std::isfinite(v) && v >= 0.0))
            throw std::invalid_argument("energy_total: negative ledger entry");
    }
    return ledger.p_tx * ledger.t_tx + ledger.p_rx * ledger.t_rx +
           ledger.p_idle * ledger.t_idle + ledger.p_sleep * ledger.t_sleep;
}

double altn(std::span<const double> death_times, std::uint64_t survivors,
            double lifetime_cap, std::uint64_t n) {
    if (!(lifetime_cap > 0.0))
        throw std::invalid_argument("altn: lifetime cap must be > 0");
    if (death_times.size() + survivors != n || n == 0)
        throw std::invalid_argument("altn: death count inconsistent with n");
    double sum = 0.0;
    for (double t : death_times) {
        if (!(std::isfinite(t) && t >= 0.0 && t <= lifetime_cap))
            throw std::invalid_argument("altn: death time outside [0, cap]");
        sum += t;
    }
    sum += static_cast<double>(survivors) * lifetime_cap;
    return (sum / static_cast<double>(n)) / lifetime_cap;
}

namespace {

bool close(double a, double b, double rel_tol) {
    if (a == b)
        return true;
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel_tol * scale;
}

std::optional<std::string> mismatch(const char* field, double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << "mismatch in " << field << ": online=" << a << " replay=" << b;
    return os.str();
}

std::optional<std::string> compare_vec(const char* field,
                                       const std::vector<double>& a,
                                       const std::vector<double>& b,
                                       double rel_tol) {
    if (a.size() != b.size()) {
        std::ostringstream os;
        os << "mismatch in " << field << ": size " << a.size() << " vs "
           << b.size();
        return os.str();
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!close(a[i], b[i], rel_tol)) {
            std::ostringstream os;
            os << field << "[" << i << "]";
            return mismatch(os.str().c_str(), a[i], b[i]);
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<std::string> compare_reports(const MetricsReport& a,
                                           const MetricsReport& b,
                                           double rel_tol) {
    if (!close(a.pdr, b.pdr, rel_tol))
        return mismatch("pdr", a.pdr, b.pdr);
    if (auto m = compare_vec("throughput_per_node", a.throughput_per_node,
                             b.throughput_per_node, rel_tol))
        return m;
    if (auto m = compare_vec("weighted_throughput_per_node",
                             a.weighted_throughput_per_node,
                             b.weighted_throughput_per_node, rel_tol))
        return m;
    if (!close(a.jfi_throughput, b.jfi_throughput, rel_tol))
        return mismatch("jfi_throughput", a.jfi_throughput, b.jfi_throughput);
    if (a.aeed.has_value() != b.aeed.has_value())
        return std::string("mismatch in aeed: defined on one side only");
    if (a.aeed && !close(*a.aeed, *b.aeed, rel_tol))
        return mismatch("aeed", *a.aeed, *b.aeed);
    if (auto m = compare_vec("energy_per_node", a.energy_per_node,
                             b.energy_per_node, rel_tol))
        return m;
    if (!close(a.jfi_energy, b.jfi_energy, rel_tol))
        return mismatch("jfi_energy", a.jfi_energy, b.jfi_energy);
    if (!close(a.altn, b.altn, rel_tol))
        return mismatch("altn", a.altn, b.altn);
    if (auto m = compare_vec("death_times", a.death_times, b.death_times,
                             rel_tol))
        return m;
    if (a.packets_sent != b.packets_sent)
        return mismatch("packets_sent", static_cast<double>(a.packets_sent),
                        static_cast<double>(b.packets_sent));
    if (a.packets_received != b.packets_received)
        return mismatch("packets_received",
                        static_cast<double>(a.packets_received),
                        static_cast<double>(b.packets_received));
    if (a.packets_dropped != b.packets_dropped)
        return mismatch("packets_dropped",
                        static_cast<double>(a.packets_dropped),
                        static_cast<double>(b.packets_dropped));
    if (a.drops_link != b.drops_link || a.drops_buffer != b.drops_buffer ||
        a.drops_no_route != b.drops_no_route ||
        a.drops_node_dead != b.drops_node_dead)
        return std::string("mismatch in drop-reason counters");
    return std::nullopt;
}

} // namespace lalarpl
