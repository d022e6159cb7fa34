#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace lalarpl {

// splitmix64, used only to derive well-separated child seeds from a master
// seed. Keeping the mix explicit pins the stream-splitting scheme.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Purpose tags for per-stream seeds. Each consumer of randomness gets its own
// stream so toggling one feature (say the loss model) cannot perturb the
// draws seen by another (say placement).
enum class StreamId : std::uint64_t {
    Placement = 1,
    Traffic = 2,
    Loss = 3,
    Automaton = 4,
};

// Deterministic uniform source. mt19937_64 is fully specified by the
// standard; the 53-bit conversion below is ours, so uniform01() yields the
// same sequence on every platform and consumes exactly one engine step.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    static RandomStream derive(std::uint64_t master, StreamId id) {
        return RandomStream(splitmix64(master ^ (0x9e3779b97f4a7c15ULL *
                            (static_cast<std::uint64_t>(id) + 1))));
    }

    std::uint64_t next_u64() { return eng_(); }

    // One draw, uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Samples an index from a (sub)probability vector using a single
    // uniform01() draw and a cumulative scan. Entries with zero mass are
    // never selected. `total` rescales when the span sums to less than one
    // (e.g. after filtering dead parents).
    std::size_t pick_index(std::span<const double> weights, double total = 1.0) {
        if (weights.empty())
            throw std::invalid_argument("pick_index: empty weight vector");
        const double u = uniform01() * total;
        double acc = 0.0;
        std::size_t last_positive = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] > 0.0)
                last_positive = i;
            acc += weights[i];
            if (u < acc && weights[i] > 0.0)
                return i;
        }
        // Floating-point shortfall at the top of the scan: fall back to the
        // highest-index entry that carries mass.
        if (last_positive == weights.size())
            throw std::invalid_argument("pick_index: all weights are zero");
        return last_positive;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace lalarpl
