#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "carpet/matrix.hpp"

namespace carpet {

// mt19937_64 with hand-rolled sampling helpers. The engine is bit-specified by the
// standard; std::uniform_* distributions are not, so sampling is done here to keep
// results identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Modulo bias is irrelevant at these ranges and
    // keeps the sampling order deterministic.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    // Index sampled with probability proportional to weights (all >= 0, sum > 0).
    std::size_t weighted_index(const Vec& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::mt19937_64 eng_;
};

// Derives independent stream seeds from a base seed (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace carpet
