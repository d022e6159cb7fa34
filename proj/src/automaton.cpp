#include "lalarpl/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lalarpl {

namespace {

constexpr double kSumDriftTolerance = 1e-12;
constexpr double kDampingFloor = -1e12;

bool is_probability(double v) {
    return std::isfinite(v) && v >= 0.0 && v <= 1.0;
}

} // namespace

ProbabilityVector::ProbabilityVector(std::vector<double> entries)
    : entries_(std::move(entries)) {
    if (entries_.empty())
        throw std::invalid_argument("ProbabilityVector: empty entry list");
    double sum = 0.0;
    for (double v : entries_) {
        if (!is_probability(v))
            throw std::invalid_argument("ProbabilityVector: entry outside [0,1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("ProbabilityVector: entries do not sum to 1");
    renormalize();
}

ProbabilityVector ProbabilityVector::uniform(std::size_t r) {
    if (r == 0)
        throw std::invalid_argument("ProbabilityVector::uniform: r == 0");
    ProbabilityVector pv;
    pv.entries_.assign(r, 1.0 / static_cast<double>(r));
    return pv;
}

void ProbabilityVector::check_step(double s, const char* what) const {
    if (!(std::isfinite(s) && s >= 0.0 && s <= 1.0))
        throw std::invalid_argument(std::string(what) + ": step outside [0,1]");
}

void ProbabilityVector::reward(std::size_t i, double a) {
    check_step(a, "reward");
    if (i >= entries_.size())
        throw std::out_of_range("reward: action index out of range");
    for (std::size_t j = 0; j < entries_.size(); ++j) {
        if (j == i)
            entries_[j] += a * (1.0 - entries_[j]);
        else
            entries_[j] *= (1.0 - a);
    }
    renormalize();
}

bool ProbabilityVector::penalize(std::size_t i, double b) {
    check_step(b, "penalize");
    if (i >= entries_.size())
        throw std::out_of_range("penalize: action index out of range");
    if (entries_.size() == 1)
        return false; // nowhere to shift mass; caller may log the warning
    const double share = b / static_cast<double>(entries_.size() - 1);
    for (std::size_t j = 0; j < entries_.size(); ++j) {
        if (j == i)
            entries_[j] *= (1.0 - b);
        else
            entries_[j] = share + (1.0 - b) * entries_[j];
    }
    renormalize();
    return true;
}

std::size_t ProbabilityVector::sample(RandomStream& rng) const {
    if (entries_.empty())
        throw std::invalid_argument("sample: empty vector");
    return rng.pick_index(entries_);
}

std::size_t ProbabilityVector::argmax() const {
    if (entries_.empty())
        throw std::invalid_argument("argmax: empty vector");
    return static_cast<std::size_t>(
        std::max_element(entries_.begin(), entries_.end()) - entries_.begin());
}

void ProbabilityVector::renormalize() {
    double sum = std::accumulate(entries_.begin(), entries_.end(), 0.0);
    if (std::abs(sum - 1.0) > kSumDriftTolerance) {
        for (double& v : entries_)
            v /= sum;
    }
}

void AutomatonConfig::validate() const {
    for (double v : {alpha1, alpha2, delta, gamma, eta, xi, c1, c2,
                     clamp_min, clamp_max}) {
        if (!std::isfinite(v))
            throw std::invalid_argument("AutomatonConfig: non-finite constant");
    }
    if (!(clamp_min > 0.0 && clamp_min <= clamp_max && clamp_max <= 1.0))
        throw std::invalid_argument(
            "AutomatonConfig: require 0 < clamp_min <= clamp_max <= 1");
}

double damping_f(double x, double y, double g) {
    const double e = std::exp(g * y);
    const double v = x - e;
    if (!(v >= kDampingFloor)) // also catches -inf from an overflowed exp
        return kDampingFloor;
    return v;
}

double log_modulation_g(double x, double xi) {
    if (!(x >= 0.0))
        throw std::invalid_argument("log_modulation_g: x must be >= 0");
    return xi * std::log1p(x);
}

double deviation_h(double x, double y, double eta) {
    const double d = x - y;
    return eta * d * d;
}

namespace {

double clamp_step(double raw, const AutomatonConfig& cfg) {
    return std::clamp(raw, cfg.clamp_min, cfg.clamp_max);
}

} // namespace

double compute_alpha(double ti, int num_hop, int max_hop, double max_ti,
                     const AutomatonConfig& cfg, StepDiagnostics* diag) {
    cfg.validate();
    const double den = cfg.delta * max_ti +
                       log_modulation_g(static_cast<double>(max_hop), cfg.xi);
    if (den == 0.0) {
        if (diag)
            ++diag->zero_denominator;
        return cfg.clamp_max;
    }
    const double num = cfg.delta * ti +
                       damping_f(static_cast<double>(max_hop),
                                 static_cast<double>(num_hop), cfg.gamma);
    return clamp_step(cfg.alpha1 + num / den + cfg.c1, cfg);
}

double compute_beta(double avg_ti, double ti, int num_hop, int max_hop,
                    const AutomatonConfig& cfg, StepDiagnostics* diag) {
    cfg.validate();
    const double den = cfg.delta * avg_ti +
                       log_modulation_g(static_cast<double>(max_hop), cfg.xi);
    if (den == 0.0) {
        if (diag)
            ++diag->zero_denominator;
        return cfg.clamp_max;
    }
    const double num = cfg.delta * deviation_h(avg_ti, ti, cfg.eta) +
                       static_cast<double>(num_hop);
    return clamp_step(cfg.alpha2 + num / den + cfg.c2, cfg);
}

StationaryTrace run_stationary_trial(const StationaryEnvironment& env,
                                     double alpha, double beta,
                                     std::size_t iterations, RandomStream& rng,
                                     std::size_t sample_every) {
    const std::size_t r = env.reward_probs.size();
    if (r == 0)
        throw std::invalid_argument("run_stationary_trial: empty environment");
    for (double d : env.reward_probs) {
        if (!(std::isfinite(d) && d >= 0.0 && d <= 1.0))
            throw std::invalid_argument(
                "run_stationary_trial: reward probability outside [0,1]");
    }
    if (sample_every == 0)
        sample_every = 1;

    StationaryTrace trace;
    trace.optimal_action = static_cast<std::size_t>(
        std::max_element(env.reward_probs.begin(), env.reward_probs.end()) -
        env.reward_probs.begin());

    ProbabilityVector pv = ProbabilityVector::uniform(r);
    trace.peak_optimal = pv[trace.optimal_action];
    for (std::size_t it = 0; it < iterations; ++it) {
        const std::size_t a = pv.sample(rng);
        const bool rewarded = rng.uniform01() < env.reward_probs[a];
        if (rewarded)
            pv.reward(a, alpha);
        else
            pv.penalize(a, beta);
        trace.peak_optimal = std::max(trace.peak_optimal, pv[trace.optimal_action]);
        if ((it + 1) % sample_every == 0)
            trace.argmax_trace.push_back(pv.argmax());
    }
    if (iterations % sample_every != 0 || iterations == 0)
        trace.argmax_trace.push_back(pv.argmax());
    trace.final_vector = pv;
    return trace;
}

} // namespace lalarpl
