#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "mrumor/model.hpp"

namespace mrumor::analytic {

namespace detail {

// Believer counts are allowed a whisker outside [seeds, max_believers]
// so that real-valued trajectory iterates never trip the domain check on
// rounding dust.
inline void require_believer_range(double believers, const ModelParams& params) {
    const double slack = 1e-9 * static_cast<double>(params.community_size) + 1e-12;
    if (believers < static_cast<double>(params.seed_count) - slack ||
        believers > static_cast<double>(params.max_believers()) + slack)
        throw std::out_of_range("believer count outside [seed count, community size - agnostics]");
}

/// C(k, j) for small integers, by the multiplicative formula.
inline double choose_small(count_t k, count_t j) {
    if (j < 0 || j > k) return 0.0;
    j = std::min(j, k - j);
    double value = 1.0;
    for (count_t i = 1; i <= j; ++i) value *= static_cast<double>(k - j + i) / static_cast<double>(i);
    return value;
}

inline double log_choose(double a, double b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

}  // namespace detail

// Probability that a fixed non-believing agent lands in a room holding at
// least `conversion_threshold` believers, given `believers` of the other
// community_size - 1 agents believe. This is the upper tail of a
// hypergeometric draw of room_size - 1 roommates.
//
// Each tail term C(n,j) C(N-1-n,k-j) / C(N-1,k) is evaluated as C(k,j)
// times k interleaved factor ratios, each of order one, so the value is
// overflow-safe far beyond N = 10^7. Believer counts may be real: for
// integer j, C(x,j) is the polynomial x(x-1)...(x-j+1)/j!, which lets the
// iterated mean map run without rounding between rounds.
inline double conversion_probability(double believers, const ModelParams& params) {
    detail::require_believer_range(believers, params);
    const double n = believers;
    const double N = static_cast<double>(params.community_size);
    const count_t k = params.room_size - 1;  // roommate seats
    if (n > N - 1.0) return 1.0;  // agnostic-free corner: every roommate believes
    double tail = 0.0;
    for (count_t j = params.conversion_threshold; j <= k; ++j) {
        double term = detail::choose_small(k, j);
        count_t seat = 1;
        for (count_t i = 0; i < j; ++i, ++seat)
            term *= (n - static_cast<double>(i)) / (N - static_cast<double>(seat));
        for (count_t i = 0; i < k - j; ++i, ++seat)
            term *= (N - 1.0 - n - static_cast<double>(i)) / (N - static_cast<double>(seat));
        tail += term;
    }
    return std::clamp(tail, 0.0, 1.0);
}

// Same probability computed the way one counts seat assignments:
// N * sum_j C(n,j) C(N-n-1,r-j-1) (r-1)! (N-r)! / N!, in log-gamma space.
// Integer-only and kept deliberately on a different numerical path from
// conversion_probability, as a cross-checking route.
inline double conversion_probability_permutation_route(count_t believers, const ModelParams& params) {
    detail::require_believer_range(static_cast<double>(believers), params);
    const count_t n = believers;
    const count_t N = params.community_size;
    const count_t r = params.room_size;
    if (n > N - 1) return 1.0;
    double sum = 0.0;
    const double base = std::log(static_cast<double>(N)) + std::lgamma(static_cast<double>(r)) +
                        std::lgamma(static_cast<double>(N - r + 1)) - std::lgamma(static_cast<double>(N + 1));
    for (count_t j = params.conversion_threshold; j <= std::min(r - 1, n); ++j) {
        if (r - 1 - j > N - n - 1) continue;  // not enough non-believers to fill the room
        const double log_term = detail::log_choose(static_cast<double>(n), static_cast<double>(j)) +
                                detail::log_choose(static_cast<double>(N - n - 1), static_cast<double>(r - 1 - j));
        sum += std::exp(base + log_term);
    }
    return std::clamp(sum, 0.0, 1.0);
}

// Expected believer count after one round given `believers` now: seeds
// persist, each ordinary believer survives the flip with probability
// 1 - d, and each of the remaining ordinary indifferents converts with
// conversion_probability.
inline double expected_next(double believers, const ModelParams& params) {
    detail::require_believer_range(believers, params);
    const double seeds = static_cast<double>(params.seed_count);
    const double cap = static_cast<double>(params.max_believers());
    const double value = seeds + (believers - seeds) * (1.0 - params.flip_probability) +
                         (cap - believers) * conversion_probability(believers, params);
    return std::clamp(value, seeds, cap);  // clamp strips rounding dust only
}

/// Expected one-round change of the believer count.
inline double drift(double believers, const ModelParams& params) {
    return expected_next(believers, params) - believers;
}

/// Deterministic iterate of the mean map; values[0] is the start count.
struct Trajectory {
    std::vector<double> values;
};

// Iterates believers -> expected_next(believers) for `rounds` rounds with
// no rounding between rounds. This treats the expectation of the map as
// the map of the expectation, which is how the plateau and die-out curves
// are conventionally drawn; it is an approximation of the true
// expectation process.
inline Trajectory expectation_trajectory(count_t initial_believers, const ModelParams& params, count_t rounds) {
    if (rounds < 0) throw std::out_of_range("round count must be nonnegative");
    detail::require_believer_range(static_cast<double>(initial_believers), params);
    Trajectory trajectory;
    trajectory.values.reserve(static_cast<std::size_t>(rounds) + 1);
    double value = static_cast<double>(initial_believers);
    trajectory.values.push_back(value);
    for (count_t t = 0; t < rounds; ++t) {
        value = expected_next(value, params);
        trajectory.values.push_back(value);
    }
    return trajectory;
}

// First round whose value is at most seed_count + 1, if any. The mean map
// never returns to seed_count exactly (conversion_probability stays
// positive there), so the +1 margin defines the die-out round.
inline std::optional<count_t> die_out_round(const Trajectory& trajectory, const ModelParams& params) {
    const double threshold = static_cast<double>(params.seed_count) + 1.0;
    for (std::size_t t = 0; t < trajectory.values.size(); ++t)
        if (trajectory.values[t] <= threshold) return static_cast<count_t>(t);
    return std::nullopt;
}

}  // namespace mrumor::analytic
