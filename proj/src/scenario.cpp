#include "lalarpl/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace lalarpl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& what) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << what;
    throw ConfigError(os.str());
}

double parse_double(std::string_view v, const std::string& origin, int line,
                    const std::string& key) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end)
        fail(origin, line, "key '" + key + "': expected a number, got '" +
                               std::string(v) + "'");
    return out;
}

std::uint64_t parse_uint(std::string_view v, const std::string& origin,
                         int line, const std::string& key) {
    std::uint64_t out = 0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end)
        fail(origin, line, "key '" + key +
                               "': expected a non-negative integer, got '" +
                               std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view v, const std::string& origin, int line,
                const std::string& key) {
    if (v == "true" || v == "on" || v == "1")
        return true;
    if (v == "false" || v == "off" || v == "0")
        return false;
    fail(origin, line,
         "key '" + key + "': expected true/false, got '" + std::string(v) + "'");
}

} // namespace

const char* variant_name(ProtocolVariant v) {
    switch (v) {
    case ProtocolVariant::Lalarpl:
        return "lalarpl";
    case ProtocolVariant::Minhop:
        return "minhop";
    case ProtocolVariant::Random:
        return "random";
    }
    return "?";
}

ProtocolVariant variant_from_name(std::string_view name) {
    if (name == "lalarpl")
        return ProtocolVariant::Lalarpl;
    if (name == "minhop")
        return ProtocolVariant::Minhop;
    if (name == "random")
        return ProtocolVariant::Random;
    throw ConfigError("unknown variant '" + std::string(name) +
                      "' (expected lalarpl, minhop or random)");
}

void ScenarioConfig::validate() {
    auto require = [](bool ok, const char* what) {
        if (!ok)
            throw ConfigError(std::string("invalid scenario: ") + what);
    };
    require(n_nodes >= 2, "n_nodes must be >= 2");
    require(area_width > 0 && area_height > 0, "area must be positive");
    require(sim_time > 0, "sim_time must be > 0");
    require(lambda > 0 && std::isfinite(lambda), "lambda must be > 0");
    require(data_rate > 0, "data_rate must be > 0");
    require(radio_range > 0, "radio_range must be > 0");
    require(packet_size > 0, "packet_size must be > 0");
    require(dio_size > 0 && dao_size > 0 && dis_size > 0 && dao_ack_size > 0,
            "control packet sizes must be > 0");
    require(initial_energy > 0, "initial_energy must be > 0");
    require(power.tx >= 0 && power.rx >= 0 && power.idle >= 0 &&
                power.sleep >= 0,
            "power draws must be >= 0");
    require(queue_capacity >= 1, "queue_capacity must be >= 1");
    require(loss_scale >= 0 && loss_scale <= 1, "loss_scale outside [0,1]");
    require(proc_delay >= 0, "proc_delay must be >= 0");
    require(metric_dt > 0, "metric_dt must be > 0");
    require(dio_period > 0, "dio_period must be > 0");
    if (lifetime_cap == 0.0)
        lifetime_cap = sim_time;
    require(lifetime_cap >= sim_time,
            "lifetime_cap must be >= sim_time (deaths must fit under the cap)");
    if (capacity_bits == 0.0)
        capacity_bits = data_rate;
    require(capacity_bits > 0, "capacity_bits must be > 0");
    try {
        protocol.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ScenarioConfig parse_scenario_text(std::string_view text,
                                   const std::string& origin) {
    ScenarioConfig cfg;

    using Setter = std::function<void(ScenarioConfig&, std::string_view,
                                      int line, const std::string&)>;
    auto dbl = [&origin](double ScenarioConfig::* field) {
        return Setter([field, &origin](ScenarioConfig& c, std::string_view v,
                                       int line, const std::string& key) {
            c.*field = parse_double(v, origin, line, key);
        });
    };
    static constexpr auto u32max = std::numeric_limits<std::uint32_t>::max();

    const std::map<std::string, Setter, std::less<>> keys = {
        {"n_nodes",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             const auto n = parse_uint(v, origin, line, key);
             if (n > u32max)
                 fail(origin, line, "n_nodes too large");
             c.n_nodes = static_cast<std::uint32_t>(n);
         }},
        {"area_width", dbl(&ScenarioConfig::area_width)},
        {"area_height", dbl(&ScenarioConfig::area_height)},
        {"sim_time", dbl(&ScenarioConfig::sim_time)},
        {"lambda", dbl(&ScenarioConfig::lambda)},
        {"data_rate", dbl(&ScenarioConfig::data_rate)},
        {"radio_range", dbl(&ScenarioConfig::radio_range)},
        {"packet_size",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.packet_size = static_cast<std::uint32_t>(
                 parse_uint(v, origin, line, key));
         }},
        {"dio_size",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.dio_size = static_cast<std::uint32_t>(
                 parse_uint(v, origin, line, key));
         }},
        {"dao_size",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.dao_size = static_cast<std::uint32_t>(
                 parse_uint(v, origin, line, key));
         }},
        {"dis_size",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.dis_size = static_cast<std::uint32_t>(
                 parse_uint(v, origin, line, key));
         }},
        {"dao_ack_size",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.dao_ack_size = static_cast<std::uint32_t>(
                 parse_uint(v, origin, line, key));
         }},
        {"initial_energy", dbl(&ScenarioConfig::initial_energy)},
        {"p_tx",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.power.tx = parse_double(v, origin, line, key);
         }},
        {"p_rx",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.power.rx = parse_double(v, origin, line, key);
         }},
        {"p_idle",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.power.idle = parse_double(v, origin, line, key);
         }},
        {"p_sleep",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.power.sleep = parse_double(v, origin, line, key);
         }},
        {"queue_capacity",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.queue_capacity = static_cast<std::size_t>(
                 parse_uint(v, origin, line, key));
         }},
        {"loss_scale", dbl(&ScenarioConfig::loss_scale)},
        {"proc_delay", dbl(&ScenarioConfig::proc_delay)},
        {"metric_dt", dbl(&ScenarioConfig::metric_dt)},
        {"lifetime_cap", dbl(&ScenarioConfig::lifetime_cap)},
        {"dio_period", dbl(&ScenarioConfig::dio_period)},
        {"capacity_bits", dbl(&ScenarioConfig::capacity_bits)},
        {"placement",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             if (v == "connected")
                 c.placement = PlacementMode::Connected;
             else if (v == "uniform")
                 c.placement = PlacementMode::Uniform;
             else
                 fail(origin, line, "key '" + key +
                                        "': expected connected or uniform");
         }},
        {"seed",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.seed = parse_uint(v, origin, line, key);
         }},
        {"variant",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             (void)key;
             try {
                 c.protocol.variant = variant_from_name(v);
             } catch (const ConfigError& e) {
                 fail(origin, line, e.what());
             }
         }},
        {"zeta",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.zeta = parse_double(v, origin, line, key);
         }},
        {"batch_p",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.batch_p = static_cast<std::uint32_t>(
                 parse_uint(v, origin, line, key));
         }},
        {"min_parents",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.min_parents = static_cast<std::size_t>(
                 parse_uint(v, origin, line, key));
         }},
        {"max_parents",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.max_parents = static_cast<std::size_t>(
                 parse_uint(v, origin, line, key));
         }},
        {"invert_traffic_term",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.invert_traffic_term = parse_bool(v, origin, line, key);
         }},
        {"alpha1",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.alpha1 = parse_double(v, origin, line, key);
         }},
        {"alpha2",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.alpha2 = parse_double(v, origin, line, key);
         }},
        {"delta",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.delta = parse_double(v, origin, line, key);
         }},
        {"gamma",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.gamma = parse_double(v, origin, line, key);
         }},
        {"eta",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.eta = parse_double(v, origin, line, key);
         }},
        {"xi",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.xi = parse_double(v, origin, line, key);
         }},
        {"c1",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.c1 = parse_double(v, origin, line, key);
         }},
        {"c2",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.c2 = parse_double(v, origin, line, key);
         }},
        {"clamp_min",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.clamp_min = parse_double(v, origin, line, key);
         }},
        {"clamp_max",
         [&origin](ScenarioConfig& c, std::string_view v, int line,
                   const std::string& key) {
             c.protocol.automaton.clamp_max = parse_double(v, origin, line, key);
         }},
    };

    std::set<std::string> seen;
    int line_no = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        ++line_no;
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = (nl == std::string_view::npos) ? std::string_view{}
                                              : rest.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
            fail(origin, line_no, "expected 'key: value'");
        const std::string key{trim(line.substr(0, colon))};
        const std::string_view value = trim(line.substr(colon + 1));
        const auto it = keys.find(key);
        if (it == keys.end())
            fail(origin, line_no, "unknown key '" + key + "'");
        if (!seen.insert(key).second)
            fail(origin, line_no, "duplicate key '" + key + "'");
        if (value.empty())
            fail(origin, line_no, "key '" + key + "': empty value");
        it->second(cfg, value, line_no, key);
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig parse_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

} // namespace lalarpl
