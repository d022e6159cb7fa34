#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lalarpl/rng.hpp"

namespace lalarpl {

// Action-probability vector of a linear reward-penalty learning automaton.
// Invariants: every entry in [0, 1], entries sum to 1 within 1e-9 (the
// updates renormalize whenever drift exceeds 1e-12), and the length is fixed
// for the lifetime of one vector; forming a new parent set creates a new one.
class ProbabilityVector {
public:
    ProbabilityVector() = default;
    explicit ProbabilityVector(std::vector<double> entries);

    // Uniform vector of r actions. r == 0 is invalid.
    static ProbabilityVector uniform(std::size_t r);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<double>& entries() const { return entries_; }

    // Reward action i: p_i += a(1 - p_i), p_j *= (1 - a) for j != i.
    void reward(std::size_t i, double a);

    // Penalize action i: p_i *= (1 - b), p_j = b/(r-1) + (1 - b) p_j.
    // A single-action vector has no alternative to shift mass to; that case
    // is a no-op and returns false.
    bool penalize(std::size_t i, double b);

    // One action sampled from the vector; consumes exactly one uniform draw.
    std::size_t sample(RandomStream& rng) const;

    std::size_t argmax() const;

private:
    void check_step(double s, const char* what) const;
    void renormalize();

    std::vector<double> entries_;
};

// Constants for the dynamic step-size formulas. Defaults keep both raw
// formulas positive and rely on clamping for stability.
struct AutomatonConfig {
    double alpha1 = 0.05;
    double alpha2 = 0.05;
    double delta = 1.0;
    double gamma = 0.1;
    double eta = 1.0;
    double xi = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double clamp_min = 0.01;
    double clamp_max = 0.9;

    // Throws std::invalid_argument on a malformed config. The clamp interval
    // may be degenerate (clamp_min == clamp_max).
    void validate() const;
};

// Counters for degenerate numerics in the step-size formulas.
struct StepDiagnostics {
    std::uint64_t zero_denominator = 0;
};

// Hop-damping helper: x - e^(g*y), floored at -1e12 so a huge exponent
// cannot poison downstream arithmetic.
double damping_f(double x, double y, double g);

// Logarithmic modulation: xi * ln(x + 1). Requires x >= 0.
double log_modulation_g(double x, double xi);

// Squared-deviation helper: eta * (x - y)^2.
double deviation_h(double x, double y, double eta);

// Reward step size from node load and depth:
//   clamp(alpha1 + (delta*ti + f(max_hop, num_hop, gamma))
//                  / (delta*max_ti + g(max_hop, xi)) + c1)
// A zero denominator yields clamp_max and bumps the diagnostics counter.
double compute_alpha(double ti, int num_hop, int max_hop, double max_ti,
                     const AutomatonConfig& cfg, StepDiagnostics* diag = nullptr);

// Penalty step size:
//   clamp(alpha2 + (delta*h(avg_ti, ti, eta) + num_hop)
//                  / (delta*avg_ti + g(max_hop, xi)) + c2)
double compute_beta(double avg_ti, double ti, int num_hop, int max_hop,
                    const AutomatonConfig& cfg, StepDiagnostics* diag = nullptr);

// Stand-alone stationary environment for convergence studies: action i is
// rewarded with probability reward_probs[i], else penalized.
struct StationaryEnvironment {
    std::vector<double> reward_probs;
};

struct StationaryTrace {
    ProbabilityVector final_vector;
    // argmax action recorded every sample_every iterations (and at the end).
    std::vector<std::size_t> argmax_trace;
    // Running peak of the optimal action's probability, where "optimal" is
    // the environment's highest reward probability (lowest index on ties).
    double peak_optimal = 0.0;
    std::size_t optimal_action = 0;
};

// Runs Algorithm-1 dynamics for `iterations` steps from the uniform vector.
// Each iteration consumes exactly two uniform draws (selection, environment).
// iterations == 0 returns the uniform vector unchanged.
StationaryTrace run_stationary_trial(const StationaryEnvironment& env,
                                     double alpha, double beta,
                                     std::size_t iterations, RandomStream& rng,
                                     std::size_t sample_every = 100);

} // namespace lalarpl
