"""Deterministic simulator for load-balanced routing in low-power lossy
networks: learning-automata parent selection, two baselines, and the full
metrics suite, driven by a seeded discrete-event engine written in C++."""

from ._core import (
    AutomatonConfig,
    ConfigError,
    EnergyLedger,
    MetricsReport,
    PowerProfile,
    ProbabilityVector,
    ProtocolConfig,
    RandomStream,
    ScenarioConfig,
    TopologyError,
    altn,
    avg_end_to_end_delay,
    compute_alpha,
    compute_beta,
    damping_f,
    deviation_h,
    energy_total,
    fmt_g9,
    jain_fairness,
    log_modulation_g,
    parse_scenario,
    parse_scenario_text,
    pdr,
    run_scenario,
    run_stationary_trial,
    selection_probabilities,
    throughput_weighted,
    traffic_index,
)

__version__ = "1.0.0"

__all__ = [
    "AutomatonConfig",
    "ConfigError",
    "EnergyLedger",
    "MetricsReport",
    "PowerProfile",
    "ProbabilityVector",
    "ProtocolConfig",
    "RandomStream",
    "ScenarioConfig",
    "TopologyError",
    "altn",
    "avg_end_to_end_delay",
    "compute_alpha",
    "compute_beta",
    "damping_f",
    "deviation_h",
    "energy_total",
    "fmt_g9",
    "jain_fairness",
    "log_modulation_g",
    "parse_scenario",
    "parse_scenario_text",
    "pdr",
    "run_scenario",
    "run_stationary_trial",
    "selection_probabilities",
    "throughput_weighted",
    "traffic_index",
]
