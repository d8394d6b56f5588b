#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mrumor::rng {

// Seeding contract (stable across versions): every stochastic run owns a
// std::mt19937_64 seeded with mix64(seed); trial i of an ensemble with
// base seed B uses seed B + (i + 1) * 0x9E3779B97F4A7C15. Draws are made
// through the helpers below, so identical seeds reproduce identical
// streams on any platform.

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
    return base_seed + (trial_index + 1) * 0x9E3779B97F4A7C15ull;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(mix64(seed)); }

/// Unbiased integer in [0, bound) via rejection; bound must be positive.
inline std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t raw = engine();
        if (raw >= threshold) return raw % bound;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double canonical(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Engine& engine, double probability) {
    return canonical(engine) < probability;
}

/// Number of successes in `trials` independent Bernoulli(probability) draws.
inline std::int64_t binomial(Engine& engine, std::int64_t trials, double probability) {
    std::int64_t successes = 0;
    for (std::int64_t i = 0; i < trials; ++i) successes += bernoulli(engine, probability);
    return successes;
}

/// Fisher-Yates; unlike std::shuffle this is reproducible across standard
/// library implementations.
template <class T>
void shuffle(std::vector<T>& values, Engine& engine) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(engine, i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace mrumor::rng
