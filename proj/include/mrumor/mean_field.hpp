#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mrumor/analytic.hpp"
#include "mrumor/model.hpp"

namespace mrumor::analytic {

// Density-level approximation of the round map: seats are treated as
// independently believer-occupied with probability P. Two parameter pairs
// admit closed forms; everything else falls back to the binomial tail,
// which is an extension beyond the closed-form cases and is labeled as
// such in reports.
enum class MapKind { ClosedFormM1R2, ClosedFormM2R3, GeneralBinomial };

inline const char* to_string(MapKind kind) {
    switch (kind) {
        case MapKind::ClosedFormM1R2: return "closed_form_m1_r2";
        case MapKind::ClosedFormM2R3: return "closed_form_m2_r3";
        case MapKind::GeneralBinomial: return "general_binomial";
    }
    return "unknown";
}

inline MapKind map_kind_for(const ModelParams& params) {
    if (params.conversion_threshold == 1 && params.room_size == 2) return MapKind::ClosedFormM1R2;
    if (params.conversion_threshold == 2 && params.room_size == 3) return MapKind::ClosedFormM2R3;
    return MapKind::GeneralBinomial;
}

/// Pr[Binomial(trials, probability) >= threshold].
inline double binomial_tail(count_t trials, double probability, count_t threshold) {
    double tail = 0.0;
    for (count_t k = threshold; k <= trials; ++k)
        tail += detail::choose_small(trials, k) * std::pow(probability, static_cast<double>(k)) *
                std::pow(1.0 - probability, static_cast<double>(trials - k));
    return std::clamp(tail, 0.0, 1.0);
}

// One application of the mean-field map to a believer density in
// [0, 1 - b]: (1-d) P + (1-b-P) P for threshold 1 in rooms of 2,
// (1-d) P + (1-b-P) P^2 for threshold 2 in rooms of 3, and
// (1-d) P + (1-b-P) Pr[Binomial(r-1, P) >= m] in general.
inline double mean_field_map(double density, const ModelParams& params) {
    const double b = params.agnostic_fraction;
    const double d = params.flip_probability;
    if (density < -1e-12 || density > 1.0 - b + 1e-12)
        throw std::out_of_range("density must lie in [0, 1 - agnostic fraction]");
    const double open = 1.0 - b - density;
    switch (map_kind_for(params)) {
        case MapKind::ClosedFormM1R2: return (1.0 - d) * density + open * density;
        case MapKind::ClosedFormM2R3: return (1.0 - d) * density + open * density * density;
        case MapKind::GeneralBinomial:
            return (1.0 - d) * density +
                   open * binomial_tail(params.room_size - 1, density, params.conversion_threshold);
    }
    return density;
}

enum class Stability { Attracting, Repelling };

inline const char* to_string(Stability stability) {
    return stability == Stability::Attracting ? "attracting" : "repelling";
}

struct FixedPoint {
    double density = 0.0;
    Stability stability = Stability::Repelling;
};

/// Interior fixed points of the mean-field map, sorted by density.
struct FixedPointReport {
    MapKind map_kind = MapKind::GeneralBinomial;
    std::vector<FixedPoint> fixed_points;
};

namespace detail {

// Sign of the drift on a symmetric bracket around the root decides the
// classification; anything that does not attract from both sides is
// reported as repelling.
inline Stability classify(double root, const ModelParams& params) {
    constexpr double h = 1e-6;
    const double below = mean_field_map(root - h, params) - (root - h);
    const double above = mean_field_map(root + h, params) - (root + h);
    return (below > 0.0 && above < 0.0) ? Stability::Attracting : Stability::Repelling;
}

}  // namespace detail

// Interior fixed points on (0, 1-b). Threshold 1, rooms of 2: the single
// point 1 - b - d. Threshold 2, rooms of 3: the roots of
// P^2 - (1-b) P + d = 0, which take opposite branches of the square root;
// no interior point exists once (1-b)^2 < 4d.
inline FixedPointReport mean_field_fixed_points(const ModelParams& params) {
    const MapKind kind = map_kind_for(params);
    if (kind == MapKind::GeneralBinomial)
        throw std::invalid_argument(
            "fixed points have closed forms only for threshold 1 in rooms of 2 or threshold 2 in rooms of 3");
    const double b = params.agnostic_fraction;
    const double d = params.flip_probability;
    FixedPointReport report{kind, {}};
    if (kind == MapKind::ClosedFormM1R2) {
        const double root = 1.0 - b - d;
        if (root > 0.0 && root < 1.0 - b)
            report.fixed_points.push_back({root, detail::classify(root, params)});
        return report;
    }
    const double discriminant = (1.0 - b) * (1.0 - b) - 4.0 * d;
    if (discriminant < 0.0) return report;
    const double sq = std::sqrt(discriminant);
    const double lower = ((1.0 - b) - sq) / 2.0;
    const double upper = ((1.0 - b) + sq) / 2.0;
    for (double root : {lower, upper}) {
        if (root > 0.0 && root < 1.0 - b)
            report.fixed_points.push_back({root, detail::classify(root, params)});
        if (discriminant == 0.0) break;  // double root, report once
    }
    return report;
}

}  // namespace mrumor::analytic
