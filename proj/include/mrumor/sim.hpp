#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "mrumor/analytic.hpp"
#include "mrumor/model.hpp"
#include "mrumor/rng.hpp"

namespace mrumor::sim {

enum class RoomAssignment { Shuffle, Hypergeometric };

/// Per-room role counts for one round's random partition.
struct RoomCensus {
    count_t room_size = 0;
    struct Room {
        count_t believers = 0;  // seeds and ordinary believers alike
        count_t agnostics = 0;
        count_t other_indifferents = 0;
    };
    std::vector<Room> rooms;
};

namespace detail {

enum Role : std::uint8_t { RoleSeed = 0, RoleOtherBeliever = 1, RoleAgnostic = 2, RoleOtherIndifferent = 3 };

inline void require_matching(const Population& population, const ModelParams& params) {
    if (population.total() != params.community_size || population.seeds != params.seed_count ||
        population.agnostics != params.agnostic_count || population.other_believers < 0 ||
        population.other_indifferents < 0)
        throw std::invalid_argument("population does not match the parameter bundle");
}

inline RoomCensus census_by_shuffle(const Population& population, const ModelParams& params, rng::Engine& engine) {
    std::vector<std::uint8_t> seats;
    seats.reserve(static_cast<std::size_t>(params.community_size));
    seats.insert(seats.end(), static_cast<std::size_t>(population.seeds), RoleSeed);
    seats.insert(seats.end(), static_cast<std::size_t>(population.other_believers), RoleOtherBeliever);
    seats.insert(seats.end(), static_cast<std::size_t>(population.agnostics), RoleAgnostic);
    seats.insert(seats.end(), static_cast<std::size_t>(population.other_indifferents), RoleOtherIndifferent);
    rng::shuffle(seats, engine);

    RoomCensus census{params.room_size, {}};
    census.rooms.resize(static_cast<std::size_t>(params.room_count()));
    std::size_t seat = 0;
    for (auto& room : census.rooms)
        for (count_t k = 0; k < params.room_size; ++k, ++seat) {
            switch (seats[seat]) {
                case RoleSeed:
                case RoleOtherBeliever: ++room.believers; break;
                case RoleAgnostic: ++room.agnostics; break;
                default: ++room.other_indifferents; break;
            }
        }
    return census;
}

// Fills rooms sequentially, drawing each seat from the remaining role
// pool; distributionally identical to the shuffle but never materializes
// the seat array.
inline RoomCensus census_by_hypergeometric(const Population& population, const ModelParams& params,
                                           rng::Engine& engine) {
    count_t remaining[4] = {population.seeds, population.other_believers, population.agnostics,
                            population.other_indifferents};
    count_t left = params.community_size;

    RoomCensus census{params.room_size, {}};
    census.rooms.resize(static_cast<std::size_t>(params.room_count()));
    for (auto& room : census.rooms)
        for (count_t k = 0; k < params.room_size; ++k) {
            std::uint64_t pick = rng::uniform_below(engine, static_cast<std::uint64_t>(left));
            int role = 0;
            while (pick >= static_cast<std::uint64_t>(remaining[role])) {
                pick -= static_cast<std::uint64_t>(remaining[role]);
                ++role;
            }
            --remaining[role];
            --left;
            if (role <= RoleOtherBeliever)
                ++room.believers;
            else if (role == RoleAgnostic)
                ++room.agnostics;
            else
                ++room.other_indifferents;
        }
    return census;
}

}  // namespace detail

/// One uniform random partition of the population into equal rooms.
inline RoomCensus assign_rooms(const Population& population, const ModelParams& params, rng::Engine& engine,
                               RoomAssignment strategy = RoomAssignment::Shuffle) {
    detail::require_matching(population, params);
    return strategy == RoomAssignment::Shuffle ? detail::census_by_shuffle(population, params, engine)
                                               : detail::census_by_hypergeometric(population, params, engine);
}

// One synchronous round. Stream order contract: the room draw comes
// first, then one Bernoulli per start-of-round ordinary believer. Both
// transfers act on the start-of-round state: conversions touch ordinary
// indifferents in rooms at or above the threshold, flips touch ordinary
// believers only, so newly converted agents cannot flip within the round.
inline Population step(const Population& population, const ModelParams& params, rng::Engine& engine,
                       RoomAssignment strategy = RoomAssignment::Shuffle) {
    const RoomCensus census = assign_rooms(population, params, engine, strategy);
    count_t converted = 0;
    for (const auto& room : census.rooms)
        if (room.believers >= params.conversion_threshold) converted += room.other_indifferents;
    const count_t flips = rng::binomial(engine, population.other_believers, params.flip_probability);

    Population next = population;
    next.other_believers += converted - flips;
    next.other_indifferents += flips - converted;
    return next;
}

/// 50 * ceil(log2 N): comfortably above the logarithmic absorption bounds.
inline count_t default_max_rounds(count_t community_size) {
    return 50 * static_cast<count_t>(std::ceil(std::log2(static_cast<double>(community_size))));
}

inline count_t default_max_rounds(const ModelParams& params) {
    return default_max_rounds(params.community_size);
}

// Steps until the run is classified. Takeover means at least half the
// community believes. The seed state is not literally absorbing (seeds
// sharing a room can still convert), so die-out is declared when the
// believer count sits at seed_count with expected conversions below 1e-3,
// or has stayed at seed_count for room_size consecutive rounds.
inline RunOutcome run(const ModelParams& params, count_t initial_believers, std::uint64_t seed,
                      count_t max_rounds, RoomAssignment strategy = RoomAssignment::Shuffle) {
    Population population = initial_population(params, initial_believers);
    rng::Engine engine = rng::make_engine(seed);

    const double residual_conversions =
        analytic::conversion_probability(static_cast<double>(params.seed_count), params) *
        static_cast<double>(params.max_believers() - params.seed_count);
    const bool seed_state_quiet = residual_conversions < 1e-3;

    count_t rounds_at_seed = 0;
    for (count_t t = 0;; ++t) {
        const count_t believers = population.believers();
        rounds_at_seed = believers == params.seed_count ? rounds_at_seed + 1 : 0;
        if (believers >= params.takeover_count()) return {Outcome::TookOver, t, believers};
        if (believers == params.seed_count && (seed_state_quiet || rounds_at_seed >= params.room_size))
            return {Outcome::DiedOut, t, believers};
        if (t == max_rounds) return {Outcome::Truncated, t, believers};
        population = step(population, params, engine, strategy);
    }
}

struct RoundsQuantiles {
    count_t min = 0;
    double median = 0.0;
    count_t p95 = 0;
    count_t max = 0;

    friend bool operator==(const RoundsQuantiles&, const RoundsQuantiles&) = default;
};

/// Aggregate of independently seeded runs.
struct EnsembleStats {
    count_t trials = 0;
    count_t took_over = 0;
    count_t died_out = 0;
    count_t truncated = 0;
    std::optional<RoundsQuantiles> rounds_took_over;
    std::optional<RoundsQuantiles> rounds_died_out;
    std::optional<RoundsQuantiles> rounds_truncated;
    std::uint64_t base_seed = 0;

    friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;
};

namespace detail {

inline std::optional<RoundsQuantiles> quantiles(std::vector<count_t>& rounds) {
    if (rounds.empty()) return std::nullopt;
    std::sort(rounds.begin(), rounds.end());
    const std::size_t k = rounds.size();
    RoundsQuantiles q;
    q.min = rounds.front();
    q.max = rounds.back();
    q.median = k % 2 == 1 ? static_cast<double>(rounds[k / 2])
                          : (static_cast<double>(rounds[k / 2 - 1]) + static_cast<double>(rounds[k / 2])) / 2.0;
    const std::size_t rank = (k * 95 + 99) / 100;  // nearest-rank ceil(0.95 k)
    q.p95 = rounds[std::min(rank, k) - 1];
    return q;
}

}  // namespace detail

// Independent runs with per-trial seeds derived from the base seed (see
// rng::trial_seed). Workers fill a preallocated slot per trial, so the
// aggregate is identical for any thread count or scheduling order.
inline EnsembleStats ensemble(const ModelParams& params, count_t initial_believers, count_t trials,
                              std::uint64_t base_seed, count_t max_rounds, unsigned threads = 0,
                              RoomAssignment strategy = RoomAssignment::Shuffle) {
    if (trials < 1) throw std::invalid_argument("trial count must be positive");
    initial_population(params, initial_believers);  // fail fast on a bad start count

    std::vector<RunOutcome> outcomes(static_cast<std::size_t>(trials));
    auto work = [&](std::atomic<count_t>& next) {
        for (;;) {
            const count_t i = next.fetch_add(1);
            if (i >= trials) return;
            outcomes[static_cast<std::size_t>(i)] =
                run(params, initial_believers, rng::trial_seed(base_seed, static_cast<std::uint64_t>(i)),
                    max_rounds, strategy);
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<count_t>(threads, trials));
    std::atomic<count_t> next{0};
    if (threads <= 1) {
        work(next);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back([&] { work(next); });
        for (auto& worker : pool) worker.join();
    }

    EnsembleStats stats;
    stats.trials = trials;
    stats.base_seed = base_seed;
    std::vector<count_t> rounds_by_kind[3];
    for (const auto& outcome : outcomes) rounds_by_kind[static_cast<int>(outcome.kind)].push_back(outcome.rounds);
    stats.took_over = static_cast<count_t>(rounds_by_kind[static_cast<int>(Outcome::TookOver)].size());
    stats.died_out = static_cast<count_t>(rounds_by_kind[static_cast<int>(Outcome::DiedOut)].size());
    stats.truncated = static_cast<count_t>(rounds_by_kind[static_cast<int>(Outcome::Truncated)].size());
    stats.rounds_took_over = detail::quantiles(rounds_by_kind[static_cast<int>(Outcome::TookOver)]);
    stats.rounds_died_out = detail::quantiles(rounds_by_kind[static_cast<int>(Outcome::DiedOut)]);
    stats.rounds_truncated = detail::quantiles(rounds_by_kind[static_cast<int>(Outcome::Truncated)]);
    return stats;
}

}  // namespace mrumor::sim
