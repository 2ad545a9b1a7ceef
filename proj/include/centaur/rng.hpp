#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace centaur {

// splitmix64, used to decorrelate seeds when deriving sub-streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-purpose RNG stream. Streams derived with distinct
// (purpose, index) pairs are independent of evaluation order, which keeps
// seeded runs reproducible when work is distributed across threads.
inline std::mt19937_64 derive_stream(std::uint64_t master_seed, std::uint64_t purpose,
                                     std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(master_seed ^ splitmix64(purpose ^ 0xa0761d6478bd642fULL));
    s = splitmix64(s ^ splitmix64(index));
    return std::mt19937_64(s);
}

// Stream purposes. Fixed numbering: changing these renumbers every seeded run.
enum class StreamPurpose : std::uint64_t {
    Environment = 1,
    Planner = 2,
    Rollout = 3,
    Reinvigoration = 4,
    InstanceGeneration = 5,
};

inline std::mt19937_64 derive_stream(std::uint64_t master_seed, StreamPurpose purpose,
                                     std::uint64_t index = 0) {
    return derive_stream(master_seed, static_cast<std::uint64_t>(purpose), index);
}

// Samples an index from unnormalized non-negative weights.
template <typename Rng>
std::size_t sample_weighted(const std::vector<double>& weights, double total, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, total);
    double u = unif(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    // Numerical slack: fall back to the last positive weight.
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) return i;
    }
    return weights.size() - 1;
}

}  // namespace centaur
