#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "mrumor/oracle.hpp"
#include "mrumor/sim.hpp"
#include "test_util.hpp"

using namespace mrumor;
using sim::RoomAssignment;
using Catch::Matchers::WithinAbs;

namespace {

constexpr RoomAssignment kBothStrategies[] = {RoomAssignment::Shuffle, RoomAssignment::Hypergeometric};

}  // namespace

TEST_CASE("census conserves every role under both strategies", "[sim]") {
    const ModelParams p = validate(16, 2, 0.25, 0.1, 2, 4);
    for (RoomAssignment strategy : kBothStrategies) {
        rng::Engine engine = rng::make_engine(7);
        for (count_t n0 = 2; n0 <= 12; ++n0) {
            const Population pop = initial_population(p, n0);
            const sim::RoomCensus census = sim::assign_rooms(pop, p, engine, strategy);
            REQUIRE(census.rooms.size() == 4);
            count_t believers = 0, agnostics = 0, indifferents = 0;
            for (const auto& room : census.rooms) {
                CHECK(room.believers + room.agnostics + room.other_indifferents == 4);
                believers += room.believers;
                agnostics += room.agnostics;
                indifferents += room.other_indifferents;
            }
            CHECK(believers == pop.believers());
            CHECK(agnostics == pop.agnostics);
            CHECK(indifferents == pop.other_indifferents);
        }
    }
}

TEST_CASE("rooms hold no believers when nobody believes", "[sim]") {
    ModelParams p;  // seedless corner, built directly
    p.community_size = 12;
    p.flip_probability = 0.1;
    p.conversion_threshold = 1;
    p.room_size = 3;
    const Population pop{0, 0, 0, 12};
    for (RoomAssignment strategy : kBothStrategies) {
        rng::Engine engine = rng::make_engine(3);
        for (const auto& room : sim::assign_rooms(pop, p, engine, strategy).rooms)
            CHECK(room.believers == 0);
    }
}

TEST_CASE("seed pair shares a room two fifths of the time", "[sim]") {
    // 2 believers, 6 seats, rooms of 3: P = C(4,1)/C(5,2) = 2/5 by enumeration
    const ModelParams p = validate(6, 2, 0.0, 0.1, 2, 3);
    const Population pop = initial_population(p, 2);
    const int draws = 100000;
    const double sigma = std::sqrt(0.4 * 0.6 / draws);
    for (RoomAssignment strategy : kBothStrategies) {
        rng::Engine engine = rng::make_engine(11);
        int together = 0;
        for (int i = 0; i < draws; ++i) {
            const sim::RoomCensus census = sim::assign_rooms(pop, p, engine, strategy);
            for (const auto& room : census.rooms)
                if (room.believers == 2) {
                    ++together;
                    break;
                }
        }
        CHECK_THAT(static_cast<double>(together) / draws, WithinAbs(0.4, 3.0 * sigma));
    }
}

TEST_CASE("a step moves only ordinary agents", "[sim]") {
    for (auto [N, s, b, d, m, r] :
         {std::tuple<count_t, count_t, double, double, count_t, count_t>{16, 2, 0.25, 0.1, 2, 4},
          {60, 1, 0.0, 0.5, 1, 3},
          {24, 3, 0.25, 0.9, 3, 4}}) {
        const ModelParams p = validate(N, s, b, d, m, r);
        rng::Engine engine = rng::make_engine(5);
        Population pop = initial_population(p, (s + p.max_believers()) / 2);
        for (int t = 0; t < 200; ++t) {
            const Population next = sim::step(pop, p, engine);
            CHECK(next.seeds == pop.seeds);
            CHECK(next.agnostics == pop.agnostics);
            CHECK(next.total() == N);
            CHECK(next.other_believers >= 0);
            CHECK(next.other_indifferents >= 0);
            pop = next;
        }
    }
}

TEST_CASE("step draws the rooms first, then one flip per ordinary believer", "[sim]") {
    // At the seed state no flips are drawn, so a cloned engine sees the
    // census that step consumed; only a room at the threshold converts.
    const ModelParams p = validate(16, 2, 0.25, 0.1, 2, 4);
    const Population pop = initial_population(p, 2);
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        rng::Engine census_engine = rng::make_engine(seed);
        const sim::RoomCensus census = sim::assign_rooms(pop, p, census_engine);
        count_t expected_conversions = 0;
        for (const auto& room : census.rooms)
            if (room.believers >= 2) expected_conversions += room.other_indifferents;

        rng::Engine step_engine = rng::make_engine(seed);
        const Population next = sim::step(pop, p, step_engine);
        CHECK(next.other_believers == expected_conversions);
        if (expected_conversions == 0) CHECK(next == pop);
    }
}

TEST_CASE("with conversions impossible the flip count is binomial", "[sim]") {
    // all ordinary agents already believe; d = 1/2 flips half of them on average
    const ModelParams p = validate(12, 2, 0.0, 0.5, 2, 3);
    const Population pop = initial_population(p, 12);
    const int trials = 100000;
    rng::Engine engine = rng::make_engine(17);
    double mean_flips = 0.0;
    for (int i = 0; i < trials; ++i) {
        const Population next = sim::step(pop, p, engine);
        mean_flips += static_cast<double>(12 - next.believers());
    }
    mean_flips /= trials;
    const double standard_error = std::sqrt(10.0 * 0.25 / trials);
    CHECK_THAT(mean_flips, WithinAbs(5.0, 4.0 * standard_error));
}

TEST_CASE("believers never shrink once flips are disabled", "[sim]") {
    ModelParams p = validate(60, 2, 0.25, 0.1, 2, 4);
    p.flip_probability = 0.0;  // test hook: validate() forbids d = 0, the dynamics do not
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        rng::Engine engine = rng::make_engine(seed);
        Population pop = initial_population(p, 6);
        count_t previous = pop.believers();
        for (int t = 0; t < 60; ++t) {
            pop = sim::step(pop, p, engine);
            CHECK(pop.believers() >= previous);
            previous = pop.believers();
        }
    }
}

TEST_CASE("one-step sample mean agrees with the closed form", "[sim]") {
    const ModelParams p = validate(6, 1, 0.0, 0.1, 1, 3);
    const Population pop = initial_population(p, 2);
    const int trials = 100000;
    for (RoomAssignment strategy : kBothStrategies) {
        rng::Engine engine = rng::make_engine(23);
        double sum = 0.0, sum_squares = 0.0;
        for (int i = 0; i < trials; ++i) {
            const double value = static_cast<double>(sim::step(pop, p, engine, strategy).believers());
            sum += value;
            sum_squares += value * value;
        }
        const double mean = sum / trials;
        const double variance = (sum_squares - sum * sum / trials) / (trials - 1);
        const double standard_error = std::sqrt(variance / trials);
        CHECK_THAT(mean, WithinAbs(4.7, 4.0 * standard_error));
    }
}

TEST_CASE("both strategies reproduce the exact one-step law", "[sim]") {
    const ModelParams p = validate(6, 1, 0.0, 0.1, 1, 3);
    const Population pop = initial_population(p, 2);
    const auto exact = oracle::exact_one_step_distribution(pop, p);
    const std::int64_t draws = 100000;
    for (RoomAssignment strategy : kBothStrategies) {
        rng::Engine engine = rng::make_engine(29);
        std::vector<std::int64_t> observed(exact.support.size(), 0);
        for (std::int64_t i = 0; i < draws; ++i) {
            const count_t believers = sim::step(pop, p, engine, strategy).believers();
            for (std::size_t k = 0; k < exact.support.size(); ++k)
                if (exact.support[k] == believers) {
                    ++observed[k];
                    break;
                }
        }
        const auto result = testutil::chi_square_goodness(exact.probabilities, observed, draws);
        INFO("strategy " << (strategy == RoomAssignment::Shuffle ? "shuffle" : "hypergeometric")
                         << " chi2=" << result.statistic << " df=" << result.df);
        CHECK(result.pass);
    }
}

TEST_CASE("an over-half start is classified at round zero", "[sim]") {
    const ModelParams p = validate(16, 2, 0.25, 0.1, 2, 4);
    const RunOutcome outcome = sim::run(p, 8, 42, 100);
    CHECK(outcome.kind == Outcome::TookOver);
    CHECK(outcome.rounds == 0);
    CHECK(outcome.final_believers == 8);
}

TEST_CASE("a quiet seed state dies out immediately", "[sim]") {
    // expected conversions from the seed state are ~3.6e-5, far below 1e-3
    const ModelParams p = validate(1000000, 4, 0.25, 0.1, 2, 4);
    const RunOutcome outcome = sim::run(p, 4, 42, 100);
    CHECK(outcome.kind == Outcome::DiedOut);
    CHECK(outcome.rounds == 0);
    CHECK(outcome.final_believers == 4);
}

TEST_CASE("golden seeded runs reproduce their recorded outcomes", "[sim]") {
    // Fixed-seed desk-scale runs, recorded once and frozen as regression anchors.
    const ModelParams viral = validate(10000, 4, 0.25, 0.1, 1, 4);
    const RunOutcome spread = sim::run(viral, 4, 1, 700);
    CHECK(spread == RunOutcome{Outcome::TookOver, 7, 5806});
    CHECK(spread.rounds <= 60);

    const ModelParams fading = validate(10000, 4, 0.25, 0.1, 2, 4);
    const RunOutcome faded = sim::run(fading, 500, 1, 700);
    CHECK(faded == RunOutcome{Outcome::DiedOut, 117, 4});
}

TEST_CASE("runs are reproducible and ensembles ignore the thread count", "[sim]") {
    const ModelParams p = validate(1000, 4, 0.25, 0.1, 2, 4);
    const RunOutcome a = sim::run(p, 50, 7, 500);
    const RunOutcome b = sim::run(p, 50, 7, 500);
    CHECK(a == b);

    const sim::EnsembleStats one = sim::ensemble(p, 50, 40, 99, 500, 1);
    const sim::EnsembleStats two = sim::ensemble(p, 50, 40, 99, 500, 2);
    const sim::EnsembleStats four = sim::ensemble(p, 50, 40, 99, 500, 4);
    CHECK(one == two);
    CHECK(one == four);
    CHECK(one.took_over + one.died_out + one.truncated == 40);
}

TEST_CASE("a one-trial ensemble reflects its single run", "[sim]") {
    const ModelParams p = validate(1000, 4, 0.25, 0.1, 1, 4);
    const std::uint64_t base_seed = 5;
    const sim::EnsembleStats stats = sim::ensemble(p, 4, 1, base_seed, 500);
    const RunOutcome only = sim::run(p, 4, rng::trial_seed(base_seed, 0), 500);
    CHECK(stats.trials == 1);
    CHECK(stats.took_over + stats.died_out + stats.truncated == 1);
    const auto& quantiles = only.kind == Outcome::TookOver   ? stats.rounds_took_over
                            : only.kind == Outcome::DiedOut ? stats.rounds_died_out
                                                            : stats.rounds_truncated;
    REQUIRE(quantiles.has_value());
    CHECK(quantiles->min == only.rounds);
    CHECK(quantiles->max == only.rounds);
    CHECK(quantiles->median == static_cast<double>(only.rounds));
    CHECK(quantiles->p95 == only.rounds);
}

TEST_CASE("truncation reports the round bound", "[sim]") {
    // one room of four: nothing interesting can resolve in zero allowed rounds
    const ModelParams p = validate(16, 2, 0.25, 0.1, 2, 4);
    const RunOutcome outcome = sim::run(p, 4, 3, 0);
    CHECK(outcome.kind == Outcome::Truncated);
    CHECK(outcome.rounds == 0);
}

TEST_CASE("ensemble rejects empty trial counts", "[sim]") {
    const ModelParams p = validate(16, 2, 0.25, 0.1, 2, 4);
    CHECK_THROWS_AS(sim::ensemble(p, 4, 0, 1, 10), std::invalid_argument);
    CHECK_THROWS_AS(sim::ensemble(p, 100, 10, 1, 10), std::out_of_range);
}
