#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mrumor {

using count_t = std::int64_t;

/// Thrown by validate(); one distinct message per violated rule.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parameter bundle for the room-based rumor process. Kept as a plain
// aggregate so tests can build degenerate corners directly; validate()
// is the checked entry point used by everything else.
//
// The community has `community_size` agents: `seed_count` permanent
// Believers, `agnostic_count` permanent Indifferents, and ordinary
// agents that switch in both directions. Each round all agents are
// partitioned uniformly at random into rooms of `room_size`; an
// Indifferent ordinary agent sharing a room with at least
// `conversion_threshold` Believers converts, and each ordinary Believer
// independently loses interest with probability `flip_probability`.
struct ModelParams {
    count_t community_size = 0;       // agents = seats
    count_t seed_count = 0;           // permanently-believing initiators
    double agnostic_fraction = 0.0;   // share that never believes
    double flip_probability = 0.0;    // per-round Believer -> Indifferent chance
    count_t conversion_threshold = 0; // believers needed in a room to convert
    count_t room_size = 0;            // seats per room
    count_t agnostic_count = 0;       // round(agnostic_fraction * community_size), fixed at validation

    // Ceiling of believer counts: seeds plus every ordinary agent.
    count_t max_believers() const { return community_size - agnostic_count; }
    // Takeover means at least half the community believes.
    count_t takeover_count() const { return (community_size + 1) / 2; }
    count_t room_count() const { return community_size / room_size; }
    count_t ordinary_count() const { return community_size - seed_count - agnostic_count; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline count_t agnostic_count_for(double agnostic_fraction, count_t community_size) {
    return static_cast<count_t>(std::llround(agnostic_fraction * static_cast<double>(community_size)));
}

// The closed-form operations never materialize rooms, so they remain
// meaningful when room_size does not divide community_size; simulation
// requires the exact partition.
enum class ValidationScope { Full, AnalyticOnly };

inline ModelParams validate(count_t community_size, count_t seed_count, double agnostic_fraction,
                            double flip_probability, count_t conversion_threshold, count_t room_size,
                            ValidationScope scope = ValidationScope::Full) {
    if (community_size < 1)
        throw ValidationError("community size must be a positive integer");
    if (seed_count < 1)
        throw ValidationError("seed count must be a positive integer");
    if (conversion_threshold < 1)
        throw ValidationError("conversion threshold must be a positive integer");
    if (!(agnostic_fraction >= 0.0) || agnostic_fraction >= 1.0)
        throw ValidationError("agnostic fraction must lie in [0, 1)");
    if (!(flip_probability > 0.0) || flip_probability >= 1.0)
        throw ValidationError("flip probability must lie in (0, 1)");
    if (seed_count < conversion_threshold)
        throw ValidationError("seed count must be at least the conversion threshold");
    if (room_size <= conversion_threshold)
        throw ValidationError("room size must exceed the conversion threshold");
    if (scope == ValidationScope::Full && community_size % room_size != 0)
        throw ValidationError("room size must divide the community size");

    const count_t agnostics = agnostic_count_for(agnostic_fraction, community_size);
    if (seed_count + agnostics > community_size)
        throw ValidationError("seeds and agnostics together exceed the community size");

    return ModelParams{community_size, seed_count,          agnostic_fraction, flip_probability,
                       conversion_threshold, room_size, agnostics};
}

inline ModelParams validate(const ModelParams& raw, ValidationScope scope = ValidationScope::Full) {
    return validate(raw.community_size, raw.seed_count, raw.agnostic_fraction, raw.flip_probability,
                    raw.conversion_threshold, raw.room_size, scope);
}

// Per-round census of the four roles. Seeds and agnostics never change;
// every update only transfers ordinary agents between the two middle
// fields, so the total is conserved by construction.
struct Population {
    count_t seeds = 0;
    count_t other_believers = 0;
    count_t agnostics = 0;
    count_t other_indifferents = 0;

    count_t believers() const { return seeds + other_believers; }
    count_t total() const { return seeds + other_believers + agnostics + other_indifferents; }

    friend bool operator==(const Population&, const Population&) = default;
};

inline Population initial_population(const ModelParams& params, count_t initial_believers) {
    if (initial_believers < params.seed_count || initial_believers > params.max_believers())
        throw std::out_of_range("initial believer count must lie in [seed count, community size - agnostics]");
    return Population{params.seed_count, initial_believers - params.seed_count, params.agnostic_count,
                      params.community_size - initial_believers - params.agnostic_count};
}

enum class Outcome { TookOver, DiedOut, Truncated };

inline const char* to_string(Outcome kind) {
    switch (kind) {
        case Outcome::TookOver: return "took_over";
        case Outcome::DiedOut: return "died_out";
        case Outcome::Truncated: return "truncated";
    }
    return "unknown";
}

/// Classification of one stochastic run.
struct RunOutcome {
    Outcome kind = Outcome::Truncated;
    count_t rounds = 0;
    count_t final_believers = 0;

    friend bool operator==(const RunOutcome&, const RunOutcome&) = default;
};

}  // namespace mrumor
