#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lalarpl/automaton.hpp"
#include "lalarpl/metrics.hpp"
#include "lalarpl/protocol.hpp"
#include "lalarpl/scenario.hpp"
#include "lalarpl/serialize.hpp"
#include "lalarpl/simcore.hpp"

namespace py = pybind11;
using namespace lalarpl;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Deterministic simulator core for load-balanced routing in "
              "low-power lossy networks";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<TopologyError>(m, "TopologyError",
                                          PyExc_RuntimeError);

    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def_static(
            "derive",
            [](std::uint64_t master, std::uint64_t id) {
                return RandomStream::derive(master, static_cast<StreamId>(id));
            },
            py::arg("master"), py::arg("stream_id"))
        .def("uniform01", &RandomStream::uniform01)
        .def("next_u64", &RandomStream::next_u64);

    py::class_<ProbabilityVector>(m, "ProbabilityVector")
        .def(py::init<std::vector<double>>(), py::arg("entries"))
        .def_static("uniform", &ProbabilityVector::uniform, py::arg("r"))
        .def("__len__", &ProbabilityVector::size)
        .def("__getitem__",
             [](const ProbabilityVector& v, std::size_t i) {
                 if (i >= v.size())
                     throw py::index_error();
                 return v[i];
             })
        .def_property_readonly("entries", &ProbabilityVector::entries)
        .def("reward", &ProbabilityVector::reward, py::arg("i"), py::arg("a"))
        .def("penalize", &ProbabilityVector::penalize, py::arg("i"),
             py::arg("b"))
        .def("sample", &ProbabilityVector::sample, py::arg("rng"))
        .def("argmax", &ProbabilityVector::argmax);

    py::class_<AutomatonConfig>(m, "AutomatonConfig")
        .def(py::init<>())
        .def_readwrite("alpha1", &AutomatonConfig::alpha1)
        .def_readwrite("alpha2", &AutomatonConfig::alpha2)
        .def_readwrite("delta", &AutomatonConfig::delta)
        .def_readwrite("gamma", &AutomatonConfig::gamma)
        .def_readwrite("eta", &AutomatonConfig::eta)
        .def_readwrite("xi", &AutomatonConfig::xi)
        .def_readwrite("c1", &AutomatonConfig::c1)
        .def_readwrite("c2", &AutomatonConfig::c2)
        .def_readwrite("clamp_min", &AutomatonConfig::clamp_min)
        .def_readwrite("clamp_max", &AutomatonConfig::clamp_max)
        .def("validate", &AutomatonConfig::validate);

    m.def("damping_f", &damping_f, py::arg("x"), py::arg("y"), py::arg("g"));
    m.def("log_modulation_g", &log_modulation_g, py::arg("x"), py::arg("xi"));
    m.def("deviation_h", &deviation_h, py::arg("x"), py::arg("y"),
          py::arg("eta"));
    m.def(
        "compute_alpha",
        [](double ti, int num_hop, int max_hop, double max_ti,
           const AutomatonConfig& cfg) {
            return compute_alpha(ti, num_hop, max_hop, max_ti, cfg);
        },
        py::arg("ti"), py::arg("num_hop"), py::arg("max_hop"),
        py::arg("max_ti"), py::arg("cfg") = AutomatonConfig{});
    m.def(
        "compute_beta",
        [](double avg_ti, double ti, int num_hop, int max_hop,
           const AutomatonConfig& cfg) {
            return compute_beta(avg_ti, ti, num_hop, max_hop, cfg);
        },
        py::arg("avg_ti"), py::arg("ti"), py::arg("num_hop"),
        py::arg("max_hop"), py::arg("cfg") = AutomatonConfig{});

    m.def(
        "run_stationary_trial",
        [](const std::vector<double>& reward_probs, double alpha, double beta,
           std::size_t iterations, std::uint64_t seed) {
            StationaryEnvironment env{reward_probs};
            RandomStream rng = RandomStream::derive(seed, StreamId::Automaton);
            const StationaryTrace trace =
                run_stationary_trial(env, alpha, beta, iterations, rng);
            py::dict out;
            out["final"] = trace.final_vector.entries();
            out["peak_optimal"] = trace.peak_optimal;
            out["optimal_action"] = trace.optimal_action;
            out["argmax_trace"] = trace.argmax_trace;
            return out;
        },
        py::arg("reward_probs"), py::arg("alpha"), py::arg("beta"),
        py::arg("iterations"), py::arg("seed"));

    m.def(
        "traffic_index",
        [](const std::vector<std::pair<double, double>>& children, double cb) {
            std::vector<ChildContribution> contribs;
            contribs.reserve(children.size());
            for (const auto& [theta, traffic] : children)
                contribs.push_back({theta, traffic});
            return traffic_index(contribs, cb);
        },
        py::arg("children"), py::arg("cb"),
        "children: list of (theta, traffic_bits_per_s)");
    m.def("pdr", &pdr, py::arg("sent"), py::arg("received"));
    m.def(
        "jain_fairness",
        [](const std::vector<double>& values) { return jain_fairness(values); },
        py::arg("values"));
    m.def(
        "avg_end_to_end_delay",
        [](const std::vector<double>& latencies) {
            return avg_end_to_end_delay(latencies);
        },
        py::arg("latencies"));
    m.def(
        "altn",
        [](const std::vector<double>& death_times, std::uint64_t survivors,
           double lifetime_cap, std::uint64_t n) {
            return altn(death_times, survivors, lifetime_cap, n);
        },
        py::arg("death_times"), py::arg("survivors"), py::arg("lifetime_cap"),
        py::arg("n"));
    m.def(
        "throughput_weighted",
        [](const std::vector<std::pair<double, double>>& samples, double dt,
           double child_count) {
            std::vector<WeightedSample> ws;
            ws.reserve(samples.size());
            for (const auto& [bits, lqi] : samples)
                ws.push_back({bits, lqi});
            return throughput_weighted(ws, dt, child_count);
        },
        py::arg("samples"), py::arg("dt"), py::arg("child_count"),
        "samples: list of (bits, lqi)");

    py::class_<EnergyLedger>(m, "EnergyLedger")
        .def(py::init<>())
        .def_readwrite("p_tx", &EnergyLedger::p_tx)
        .def_readwrite("p_rx", &EnergyLedger::p_rx)
        .def_readwrite("p_idle", &EnergyLedger::p_idle)
        .def_readwrite("p_sleep", &EnergyLedger::p_sleep)
        .def_readwrite("t_tx", &EnergyLedger::t_tx)
        .def_readwrite("t_rx", &EnergyLedger::t_rx)
        .def_readwrite("t_idle", &EnergyLedger::t_idle)
        .def_readwrite("t_sleep", &EnergyLedger::t_sleep);
    m.def("energy_total", &energy_total, py::arg("ledger"));

    m.def(
        "selection_probabilities",
        [](const std::vector<std::tuple<std::uint32_t, int, double>>& cands,
           double zeta, bool invert) {
            std::vector<DioIndicator> dios;
            dios.reserve(cands.size());
            for (const auto& [id, hops, ti] : cands)
                dios.push_back({id, hops, ti});
            return selection_probabilities(dios, zeta, invert);
        },
        py::arg("candidates"), py::arg("zeta"),
        py::arg("invert_traffic_term") = false,
        "candidates: list of (node_id, min_hops_to_root, traffic_index)");

    py::class_<ProtocolConfig>(m, "ProtocolConfig")
        .def(py::init<>())
        .def_property(
            "variant",
            [](const ProtocolConfig& c) {
                return std::string(variant_name(c.variant));
            },
            [](ProtocolConfig& c, const std::string& name) {
                c.variant = variant_from_name(name);
            })
        .def_readwrite("zeta", &ProtocolConfig::zeta)
        .def_readwrite("batch_p", &ProtocolConfig::batch_p)
        .def_readwrite("min_parents", &ProtocolConfig::min_parents)
        .def_readwrite("max_parents", &ProtocolConfig::max_parents)
        .def_readwrite("invert_traffic_term",
                       &ProtocolConfig::invert_traffic_term)
        .def_readwrite("automaton", &ProtocolConfig::automaton);

    py::class_<PowerProfile>(m, "PowerProfile")
        .def(py::init<>())
        .def_readwrite("tx", &PowerProfile::tx)
        .def_readwrite("rx", &PowerProfile::rx)
        .def_readwrite("idle", &PowerProfile::idle)
        .def_readwrite("sleep", &PowerProfile::sleep);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("n_nodes", &ScenarioConfig::n_nodes)
        .def_readwrite("area_width", &ScenarioConfig::area_width)
        .def_readwrite("area_height", &ScenarioConfig::area_height)
        .def_readwrite("sim_time", &ScenarioConfig::sim_time)
        .def_readwrite("lambda_", &ScenarioConfig::lambda)
        .def_readwrite("data_rate", &ScenarioConfig::data_rate)
        .def_readwrite("radio_range", &ScenarioConfig::radio_range)
        .def_readwrite("packet_size", &ScenarioConfig::packet_size)
        .def_readwrite("initial_energy", &ScenarioConfig::initial_energy)
        .def_readwrite("power", &ScenarioConfig::power)
        .def_readwrite("queue_capacity", &ScenarioConfig::queue_capacity)
        .def_readwrite("loss_scale", &ScenarioConfig::loss_scale)
        .def_readwrite("proc_delay", &ScenarioConfig::proc_delay)
        .def_readwrite("metric_dt", &ScenarioConfig::metric_dt)
        .def_readwrite("lifetime_cap", &ScenarioConfig::lifetime_cap)
        .def_readwrite("dio_period", &ScenarioConfig::dio_period)
        .def_readwrite("capacity_bits", &ScenarioConfig::capacity_bits)
        .def_property(
            "placement",
            [](const ScenarioConfig& c) {
                return c.placement == PlacementMode::Uniform
                           ? std::string("uniform")
                           : std::string("connected");
            },
            [](ScenarioConfig& c, const std::string& mode) {
                if (mode == "uniform")
                    c.placement = PlacementMode::Uniform;
                else if (mode == "connected")
                    c.placement = PlacementMode::Connected;
                else
                    throw ConfigError("placement: expected uniform|connected, "
                                      "got '" +
                                      mode + "'");
            })
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def_readwrite("protocol", &ScenarioConfig::protocol)
        .def("validate", &ScenarioConfig::validate);

    m.def("parse_scenario", &parse_scenario, py::arg("path"));
    m.def("parse_scenario_text", &parse_scenario_text, py::arg("text"),
          py::arg("origin") = std::string("<string>"));

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("pdr", &MetricsReport::pdr)
        .def_readonly("throughput_per_node", &MetricsReport::throughput_per_node)
        .def_readonly("weighted_throughput_per_node",
                      &MetricsReport::weighted_throughput_per_node)
        .def_readonly("jfi_throughput", &MetricsReport::jfi_throughput)
        .def_readonly("aeed", &MetricsReport::aeed)
        .def_readonly("energy_per_node", &MetricsReport::energy_per_node)
        .def_readonly("jfi_energy", &MetricsReport::jfi_energy)
        .def_readonly("altn", &MetricsReport::altn)
        .def_readonly("death_times", &MetricsReport::death_times)
        .def_readonly("packets_sent", &MetricsReport::packets_sent)
        .def_readonly("packets_received", &MetricsReport::packets_received)
        .def_readonly("packets_dropped", &MetricsReport::packets_dropped)
        .def_readonly("drops_link", &MetricsReport::drops_link)
        .def_readonly("drops_buffer", &MetricsReport::drops_buffer)
        .def_readonly("drops_no_route", &MetricsReport::drops_no_route)
        .def_readonly("drops_node_dead", &MetricsReport::drops_node_dead)
        .def("packets_in_flight", &MetricsReport::packets_in_flight);

    m.def(
        "run_scenario",
        [](ScenarioConfig cfg, bool check_replay) {
            py::gil_scoped_release release;
            RunResult result = run_scenario(cfg);
            if (check_replay) {
                const auto divergence = verify_replay(result, cfg);
                if (divergence)
                    throw std::runtime_error("replay check failed: " +
                                             *divergence);
            }
            return result.report;
        },
        py::arg("cfg"), py::arg("check_replay") = false,
        "Runs one scenario and returns its MetricsReport. With check_replay "
        "the report is recomputed from the event log and must match.");

    m.def("fmt_g9", &fmt_g9, py::arg("value"));
}
