// lln-balance: deterministic discrete-event simulator for load-balanced
// routing in low-power lossy networks.
//
// Subcommands:
//   run       one scenario -> metrics summary (+ JSON / log / topology dumps)
//   batch     manifest sweep -> results.csv + aggregate.csv
//   plotdata  long-format extraction of one metric from results.csv
//   converge  stand-alone learning-automaton convergence harness
//
// Exit codes: 0 success; 1 runtime failure (including partial batch
// failures); 2 configuration error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lalarpl/batch.hpp"
#include "lalarpl/serialize.hpp"
#include "lalarpl/simcore.hpp"

namespace {

using namespace lalarpl;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out)
        throw std::runtime_error("short write: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct RunOptions {
    std::string scenario_path;
    std::string variant;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_json;
    std::string export_log;
    std::string dump_topology;
};

int do_run(const RunOptions& opt) {
    ScenarioConfig cfg = parse_scenario(opt.scenario_path);
    if (!opt.variant.empty())
        cfg.protocol.variant = variant_from_name(opt.variant);
    if (opt.seed_set)
        cfg.seed = opt.seed;
    cfg.validate();

    RunResult result = run_scenario(cfg);

    std::cout << "scenario: " << opt.scenario_path << '\n'
              << "variant: " << variant_name(cfg.protocol.variant) << '\n'
              << "n_nodes: " << cfg.n_nodes << '\n'
              << "seed: " << cfg.seed << '\n'
              << "sim_time: " << fmt_g9(cfg.sim_time) << '\n'
              << "lambda: " << fmt_g9(cfg.lambda) << '\n';
    for (const auto& col : metric_columns())
        std::cout << col << ": " << fmt_g9(metric_value(result.report, col))
                  << '\n';
    std::cout << "stale_acks: " << result.stale_acks << '\n'
              << "zero_denominator_steps: "
              << result.step_diagnostics.zero_denominator << '\n';

    const auto divergence = verify_replay(result, cfg);
    if (divergence)
        throw std::runtime_error("replay check failed: " + *divergence);
    std::cout << "replay_check: ok\n";

    if (!opt.out_json.empty())
        write_file(opt.out_json, report_json(cfg, result));
    if (!opt.export_log.empty())
        write_file(opt.export_log, event_log_ndjson(result.log));
    if (!opt.dump_topology.empty()) {
        const auto dodag = compute_hop_counts(
            result.topology, std::vector<char>(cfg.n_nodes, 1));
        write_file(opt.dump_topology,
                   topology_json(result.topology, dodag.hops));
    }
    return 0;
}

int do_batch(const std::string& manifest_path) {
    const RunManifest manifest = parse_manifest(manifest_path);
    const BatchOutcome outcome = run_batch(manifest);

    std::filesystem::create_directories(manifest.output_dir);
    const auto results_path =
        (std::filesystem::path(manifest.output_dir) / "results.csv").string();
    const auto aggregate_path =
        (std::filesystem::path(manifest.output_dir) / "aggregate.csv")
            .string();
    write_file(results_path, outcome.results_text);
    write_file(aggregate_path, outcome.aggregate_text);

    std::cout << "runs: " << outcome.rows.size() << '\n'
              << "failures: " << outcome.failures << '\n'
              << "results: " << results_path << '\n'
              << "aggregate: " << aggregate_path << '\n';
    for (const auto& msg : outcome.failure_messages)
        std::cerr << "failed: " << msg << '\n';
    return outcome.failures == 0 ? 0 : 1;
}

int do_plotdata(const std::string& results_path, const std::string& metric,
                const std::string& out_path) {
    const auto rows = parse_results_csv(read_file(results_path));
    const std::string text = plot_data_csv(rows, metric);
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return 0;
}

struct ConvergeOptions {
    double alpha = 0.05;
    double beta = 0.05;
    std::vector<double> reward_probs = {0.9, 0.2};
    std::size_t iterations = 10000;
    std::uint64_t seeds = 100;
    double threshold = 0.95;
};

int do_converge(const ConvergeOptions& opt) {
    if (opt.reward_probs.empty())
        throw ConfigError("converge: --reward-probs must not be empty");
    StationaryEnvironment env;
    env.reward_probs = opt.reward_probs;

    std::uint64_t terminal_hits = 0;
    std::uint64_t peak_hits = 0;
    std::cout << "seed,terminal_optimal,terminal_max,peak_optimal\n";
    for (std::uint64_t s = 1; s <= opt.seeds; ++s) {
        RandomStream rng = RandomStream::derive(s, StreamId::Automaton);
        const StationaryTrace trace = run_stationary_trial(
            env, opt.alpha, opt.beta, opt.iterations, rng);
        double terminal_max = 0.0;
        for (std::size_t i = 0; i < trace.final_vector.size(); ++i)
            terminal_max = std::max(terminal_max, trace.final_vector[i]);
        const double terminal_optimal =
            trace.final_vector[trace.optimal_action];
        if (terminal_optimal > opt.threshold)
            ++terminal_hits;
        if (trace.peak_optimal > opt.threshold)
            ++peak_hits;
        std::cout << s << ',' << fmt_g9(terminal_optimal) << ','
                  << fmt_g9(terminal_max) << ',' << fmt_g9(trace.peak_optimal)
                  << '\n';
    }
    const double denom = static_cast<double>(opt.seeds);
    std::cout << "threshold: " << fmt_g9(opt.threshold) << '\n'
              << "terminal_fraction: "
              << fmt_g9(static_cast<double>(terminal_hits) / denom) << '\n'
              << "peak_fraction: "
              << fmt_g9(static_cast<double>(peak_hits) / denom) << '\n';
    // The reward-penalty scheme is ergodic: the optimal action's probability
    // fluctuates around its stationary mean forever, so the within-run peak,
    // not the terminal snapshot, is the meaningful convergence statistic.
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic load-balancing simulator for low-power lossy "
                 "networks"};
    app.require_subcommand(1);
    argv = app.ensure_utf8(argv);

    RunOptions run_opt;
    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    run_cmd->add_option("scenario", run_opt.scenario_path, "scenario file")
        ->required();
    run_cmd->add_option("--variant", run_opt.variant,
                        "protocol variant: lalarpl | minhop | random");
    auto* seed_opt =
        run_cmd->add_option("--seed", run_opt.seed, "override the seed");
    run_cmd->add_option("--out", run_opt.out_json, "write the report as JSON");
    run_cmd->add_option("--export-log", run_opt.export_log,
                        "write the event log as NDJSON");
    run_cmd->add_option("--dump-topology", run_opt.dump_topology,
                        "write node positions and links as JSON");

    std::string manifest_path;
    auto* batch_cmd =
        app.add_subcommand("batch", "run a manifest of scenario sweeps");
    batch_cmd->add_option("manifest", manifest_path, "manifest file")
        ->required();

    std::string results_path, metric, plot_out;
    auto* plot_cmd = app.add_subcommand(
        "plotdata", "extract one metric from results.csv in long format");
    plot_cmd->add_option("results", results_path, "results.csv from batch")
        ->required();
    plot_cmd->add_option("--metric", metric, "metric column name")->required();
    plot_cmd->add_option("--out", plot_out, "output file (default: stdout)");

    ConvergeOptions conv;
    auto* conv_cmd = app.add_subcommand(
        "converge", "stationary-environment automaton convergence study");
    conv_cmd->add_option("--alpha", conv.alpha, "reward step size");
    conv_cmd->add_option("--beta", conv.beta, "penalty step size");
    conv_cmd
        ->add_option("--reward-probs", conv.reward_probs,
                     "per-action reward probabilities")
        ->delimiter(',');
    conv_cmd->add_option("--iterations", conv.iterations, "iterations per seed");
    conv_cmd->add_option("--seeds", conv.seeds, "number of seeds");
    conv_cmd->add_option("--threshold", conv.threshold,
                         "convergence threshold on P(optimal)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            run_opt.seed_set = seed_opt->count() > 0;
            return do_run(run_opt);
        }
        if (batch_cmd->parsed())
            return do_batch(manifest_path);
        if (plot_cmd->parsed())
            return do_plotdata(results_path, metric, plot_out);
        if (conv_cmd->parsed())
            return do_converge(conv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
