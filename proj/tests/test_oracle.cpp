#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numeric>

#include "mrumor/analytic.hpp"
#include "mrumor/oracle.hpp"

using namespace mrumor;
using Catch::Matchers::WithinAbs;

TEST_CASE("roommate enumeration on six agents", "[oracle]") {
    const ModelParams pair_needed = validate(6, 2, 0.0, 0.1, 2, 3);
    CHECK(oracle::exact_conversion_probability(2, pair_needed) == 0.1);
    const ModelParams one_enough = validate(6, 1, 0.0, 0.1, 1, 3);
    CHECK(oracle::exact_conversion_probability(2, one_enough) == 0.7);
    CHECK(oracle::exact_conversion_probability(5, one_enough) == 1.0);
    CHECK(oracle::exact_conversion_probability(1, pair_needed) == 0.0);  // below the threshold
    CHECK(oracle::exact_conversion_probability(0, one_enough) == 0.0);
}

TEST_CASE("enumeration budgets are enforced", "[oracle]") {
    const ModelParams big = validate(25, 1, 0.0, 0.1, 1, 5);
    CHECK_THROWS_AS(oracle::exact_conversion_probability(3, big), std::invalid_argument);
    const ModelParams wide = validate(16, 1, 0.0, 0.1, 1, 4);
    CHECK_THROWS_AS(oracle::exact_one_step_distribution(initial_population(wide, 4), wide),
                    std::invalid_argument);
    CHECK_THROWS_AS(oracle::exact_conversion_probability(16, wide), std::out_of_range);
}

TEST_CASE("no ordinary agents leaves a point mass at the seed count", "[oracle]") {
    const ModelParams p = validate(6, 2, 0.6, 0.1, 2, 3);  // 2 seeds + 4 agnostics fill the community
    REQUIRE(p.ordinary_count() == 0);
    const auto dist = oracle::exact_one_step_distribution(initial_population(p, 2), p);
    REQUIRE(dist.support.size() == 1);
    CHECK(dist.support[0] == 2);
    CHECK(dist.probabilities[0] == 1.0);
}

TEST_CASE("with conversion impossible only the binomial flip remains", "[oracle]") {
    // every ordinary agent already believes, so nobody can convert
    const ModelParams p = validate(6, 1, 0.5, 0.1, 1, 2);
    const auto dist = oracle::exact_one_step_distribution(initial_population(p, 3), p);
    REQUIRE(dist.support == std::vector<count_t>{1, 2, 3});
    CHECK_THAT(dist.probabilities[0], WithinAbs(0.01, 1e-15));  // both believers flip
    CHECK_THAT(dist.probabilities[1], WithinAbs(0.18, 1e-15));
    CHECK_THAT(dist.probabilities[2], WithinAbs(0.81, 1e-15));
}

TEST_CASE("six-agent one-step law has mean 4.7", "[oracle]") {
    const ModelParams p = validate(6, 1, 0.0, 0.1, 1, 3);
    const auto dist = oracle::exact_one_step_distribution(initial_population(p, 2), p);
    CHECK_THAT(dist.mean(), WithinAbs(4.7, 1e-12));
    CHECK_THAT(dist.mean(), WithinAbs(analytic::expected_next(2.0, p), 1e-12));
}

TEST_CASE("one-step law is a tight probability distribution", "[oracle]") {
    for (auto [N, s, b, d, m, r] :
         {std::tuple<count_t, count_t, double, double, count_t, count_t>{12, 2, 0.25, 0.1, 2, 4},
          {12, 1, 0.0, 0.5, 1, 3},
          {10, 2, 0.2, 0.3, 1, 2},
          {9, 3, 0.0, 0.1, 2, 3}}) {
        const ModelParams p = validate(N, s, b, d, m, r);
        for (count_t n0 = s; n0 <= p.max_believers(); ++n0) {
            const auto dist = oracle::exact_one_step_distribution(initial_population(p, n0), p);
            const double total = std::accumulate(dist.probabilities.begin(), dist.probabilities.end(), 0.0);
            CHECK_THAT(total, WithinAbs(1.0, 1e-12));
            for (count_t value : dist.support) {
                CHECK(value >= s);
                CHECK(value <= p.max_believers());
            }
            CHECK_THAT(dist.mean(), WithinAbs(analytic::expected_next(static_cast<double>(n0), p), 1e-10));
        }
    }
}

TEST_CASE("exhaustive and closed-form conversion probabilities coincide", "[oracle]") {
    for (count_t r : {2, 3, 4}) {
        for (count_t N = r; N <= 24; N += r) {
            for (count_t m = 1; m < r; ++m) {
                const ModelParams p = validate(N, m, 0.0, 0.5, m, r);
                for (count_t n = 0; n <= N - 1; ++n) {
                    const double exact = oracle::exact_conversion_probability(n, p);
                    ModelParams open = p;  // allow n below the seed count for the scan
                    open.seed_count = 0;
                    const double closed = analytic::conversion_probability(static_cast<double>(n), open);
                    CHECK_THAT(closed, WithinAbs(exact, 1e-12 * std::max(1.0, exact)));
                }
            }
        }
    }
}
