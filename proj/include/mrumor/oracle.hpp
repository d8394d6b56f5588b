#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mrumor/model.hpp"

// Exact small-community ground truth by exhaustive enumeration. Nothing
// here shares a code path with the closed-form engine; that is the point.
namespace mrumor::oracle {

namespace detail {

inline double choose_exact(count_t a, count_t b) {
    if (b < 0 || b > a) return 0.0;
    double value = 1.0;
    for (count_t i = 1; i <= b; ++i) value = value * static_cast<double>(a - b + i) / static_cast<double>(i);
    return value;
}

}  // namespace detail

// Walks every (room_size - 1)-subset of the other community_size - 1
// agents as the fixed indifferent agent's roommates and counts the
// subsets holding at least conversion_threshold believers.
inline double exact_conversion_probability(count_t believers, const ModelParams& params) {
    const count_t N = params.community_size;
    if (N > 24) throw std::invalid_argument("exhaustive roommate enumeration is budgeted for community size <= 24");
    if (believers < 0 || believers > N - 1)
        throw std::out_of_range("believer count must lie in [0, community size - 1]");
    const count_t k = params.room_size - 1;
    // others 0 .. N-2; believers take the labels below `believers`
    std::vector<count_t> subset(static_cast<std::size_t>(k));
    std::iota(subset.begin(), subset.end(), 0);
    std::uint64_t total = 0;
    std::uint64_t hits = 0;
    for (;;) {
        ++total;
        count_t in_room = 0;
        for (count_t label : subset) in_room += label < believers;
        hits += in_room >= params.conversion_threshold;
        // next combination in lexicographic order
        count_t i = k - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == N - 1 - k + i) --i;
        if (i < 0) break;
        ++subset[static_cast<std::size_t>(i)];
        for (count_t j = i + 1; j < k; ++j)
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

/// Probability mass of next-round believer counts.
struct ExactDistribution {
    std::vector<count_t> support;
    std::vector<double> probabilities;

    double mean() const {
        double value = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i)
            value += static_cast<double>(support[i]) * probabilities[i];
        return value;
    }
};

namespace detail {

inline std::uint32_t pack_counts(count_t a, count_t b, count_t c, count_t d) {
    return static_cast<std::uint32_t>(a) | static_cast<std::uint32_t>(b) << 8 |
           static_cast<std::uint32_t>(c) << 16 | static_cast<std::uint32_t>(d) << 24;
}

// Distribution of the number of conversions produced by filling the
// remaining seats room by room. Rooms are enumerated as role-count
// compositions; the telescoping product of hypergeometric factors
// C(rem_role, take_role) / C(rem_total, room_size) weighs each profile
// exactly as the uniform seat assignment does.
inline const std::vector<double>& conversion_distribution(
    count_t seeds, count_t other_believers, count_t agnostics, count_t other_indifferents,
    const ModelParams& params, std::unordered_map<std::uint32_t, std::vector<double>>& memo) {
    const std::uint32_t key = pack_counts(seeds, other_believers, agnostics, other_indifferents);
    if (auto found = memo.find(key); found != memo.end()) return found->second;

    const count_t remaining = seeds + other_believers + agnostics + other_indifferents;
    std::vector<double> dist(static_cast<std::size_t>(other_indifferents) + 1, 0.0);
    if (remaining == 0) {
        dist = {1.0};
    } else {
        const count_t r = params.room_size;
        const double room_ways = choose_exact(remaining, r);
        for (count_t cs = 0; cs <= std::min(r, seeds); ++cs)
            for (count_t cb = 0; cb <= std::min(r - cs, other_believers); ++cb)
                for (count_t ca = 0; ca <= std::min(r - cs - cb, agnostics); ++ca) {
                    const count_t ci = r - cs - cb - ca;
                    if (ci < 0 || ci > other_indifferents) continue;
                    const double weight = choose_exact(seeds, cs) * choose_exact(other_believers, cb) *
                                          choose_exact(agnostics, ca) * choose_exact(other_indifferents, ci) /
                                          room_ways;
                    if (weight == 0.0) continue;
                    const count_t here = (cs + cb >= params.conversion_threshold) ? ci : 0;
                    const auto& rest = conversion_distribution(seeds - cs, other_believers - cb, agnostics - ca,
                                                               other_indifferents - ci, params, memo);
                    for (std::size_t c = 0; c < rest.size(); ++c)
                        if (rest[c] != 0.0) dist[static_cast<std::size_t>(here) + c] += weight * rest[c];
                }
    }
    return memo.emplace(key, std::move(dist)).first->second;
}

}  // namespace detail

// Exact law of the next-round believer count: enumerate the random room
// partition for the conversion count, then convolve with the binomial
// flip of the start-of-round ordinary believers.
inline ExactDistribution exact_one_step_distribution(const Population& population, const ModelParams& params) {
    const count_t N = params.community_size;
    if (N > 12) throw std::invalid_argument("exhaustive partition enumeration is budgeted for community size <= 12");
    if (population.total() != N || population.seeds != params.seed_count ||
        population.agnostics != params.agnostic_count)
        throw std::invalid_argument("population does not match the parameter bundle");

    std::unordered_map<std::uint32_t, std::vector<double>> memo;
    const auto& conversions = detail::conversion_distribution(
        population.seeds, population.other_believers, population.agnostics, population.other_indifferents,
        params, memo);

    const count_t ob = population.other_believers;
    const double d = params.flip_probability;
    // believer count = seeds + ob + conversions - flips
    const count_t lowest = params.seed_count;
    std::vector<double> mass(static_cast<std::size_t>(ob + static_cast<count_t>(conversions.size())), 0.0);
    for (std::size_t c = 0; c < conversions.size(); ++c) {
        if (conversions[c] == 0.0) continue;
        for (count_t flips = 0; flips <= ob; ++flips) {
            const double flip_mass = detail::choose_exact(ob, flips) *
                                     std::pow(d, static_cast<double>(flips)) *
                                     std::pow(1.0 - d, static_cast<double>(ob - flips));
            mass[static_cast<std::size_t>(ob - flips) + c] += conversions[c] * flip_mass;
        }
    }

    ExactDistribution distribution{};
    for (std::size_t i = 0; i < mass.size(); ++i)
        if (mass[i] > 0.0) {
            distribution.support.push_back(lowest + static_cast<count_t>(i));
            distribution.probabilities.push_back(mass[i]);
        }
    return distribution;
}

}  // namespace mrumor::oracle
