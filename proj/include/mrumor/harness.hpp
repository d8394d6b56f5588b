#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "mrumor/analytic.hpp"
#include "mrumor/mean_field.hpp"
#include "mrumor/model.hpp"
#include "mrumor/sim.hpp"

namespace mrumor::harness {

inline constexpr int kSchemaVersion = 1;

/// Thrown when a sweep grid exceeds its cell budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

// Every knob of every subcommand, mirroring the CLI long option names.
// Negative sentinels mean "derive the default"; resolve() bakes them in
// so that echoes and config files always carry the effective values.
struct RunConfig {
    count_t community_size = 1000;
    count_t seed_count = 10;
    double agnostic_fraction = 0.25;
    double flip_probability = 0.1;
    count_t conversion_threshold = 1;
    count_t room_size = 4;

    count_t initial_believers = -1;  // default: seed_count
    count_t rounds = 20;             // trajectory length
    count_t trials = 100;
    std::uint64_t base_seed = 1;
    count_t max_rounds = -1;  // default: 50 * ceil(log2 N)

    double grid_min = -1.0;     // default: seed_count
    double grid_max = -1.0;     // default: N / 2
    count_t grid_points = 200;  // log-spaced evaluation points

    std::vector<count_t> initial_believers_list;  // sweep axes; empty = the single config value
    std::vector<count_t> threshold_list;
    std::vector<double> flip_list;
    std::vector<double> agnostic_list;
    count_t max_cells = 512;

    std::string assignment = "shuffle";  // or "hypergeometric"
    OutputFormat format = OutputFormat::Csv;

    ModelParams validated(ValidationScope scope) const {
        return validate(community_size, seed_count, agnostic_fraction, flip_probability,
                        conversion_threshold, room_size, scope);
    }

    RunConfig resolve() const {
        RunConfig out = *this;
        if (out.initial_believers < 0) out.initial_believers = out.seed_count;
        if (out.max_rounds < 0) out.max_rounds = sim::default_max_rounds(out.community_size);
        if (out.grid_min < 0.0) out.grid_min = static_cast<double>(out.seed_count);
        if (out.grid_max < 0.0) out.grid_max = static_cast<double>(out.community_size) / 2.0;
        return out;
    }

    sim::RoomAssignment room_assignment() const {
        if (assignment == "shuffle") return sim::RoomAssignment::Shuffle;
        if (assignment == "hypergeometric") return sim::RoomAssignment::Hypergeometric;
        throw ValidationError("assignment must be 'shuffle' or 'hypergeometric'");
    }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string fmt(const char* pattern, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), pattern, value);
    return buffer;
}

/// Shortest decimal that parses back to the same binary64.
inline std::string lossless(double value) {
    for (int precision = 6; precision <= 17; ++precision) {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
        if (std::strtod(buffer, nullptr) == value) return buffer;
    }
    return fmt("%.17g", value);
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_same_v<T, double>)
            out += lossless(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

}  // namespace detail

// Flat key=value document; keys equal the CLI long option names, so the
// same file feeds --config. Emitting a resolved config and parsing it
// back yields the identical resolved config.
inline std::string to_config_text(const RunConfig& config) {
    const RunConfig c = config.resolve();
    std::ostringstream out;
    out << "community-size=" << c.community_size << '\n';
    out << "seeds=" << c.seed_count << '\n';
    out << "agnostic-fraction=" << detail::lossless(c.agnostic_fraction) << '\n';
    out << "flip-probability=" << detail::lossless(c.flip_probability) << '\n';
    out << "threshold=" << c.conversion_threshold << '\n';
    out << "room-size=" << c.room_size << '\n';
    out << "initial-believers=" << c.initial_believers << '\n';
    out << "rounds=" << c.rounds << '\n';
    out << "trials=" << c.trials << '\n';
    out << "seed=" << c.base_seed << '\n';
    out << "max-rounds=" << c.max_rounds << '\n';
    out << "grid-min=" << detail::lossless(c.grid_min) << '\n';
    out << "grid-max=" << detail::lossless(c.grid_max) << '\n';
    out << "grid-points=" << c.grid_points << '\n';
    if (!c.initial_believers_list.empty()) out << "n0-list=" << detail::join(c.initial_believers_list) << '\n';
    if (!c.threshold_list.empty()) out << "m-list=" << detail::join(c.threshold_list) << '\n';
    if (!c.flip_list.empty()) out << "d-list=" << detail::join(c.flip_list) << '\n';
    if (!c.agnostic_list.empty()) out << "b-list=" << detail::join(c.agnostic_list) << '\n';
    out << "max-cells=" << c.max_cells << '\n';
    out << "assignment=" << c.assignment << '\n';
    out << "format=" << (c.format == OutputFormat::Csv ? "csv" : "json") << '\n';
    return out.str();
}

inline nlohmann::json config_echo(const RunConfig& config) {
    const RunConfig c = config.resolve();
    nlohmann::json echo{
        {"community-size", c.community_size},
        {"seeds", c.seed_count},
        {"agnostic-fraction", c.agnostic_fraction},
        {"flip-probability", c.flip_probability},
        {"threshold", c.conversion_threshold},
        {"room-size", c.room_size},
        {"initial-believers", c.initial_believers},
        {"rounds", c.rounds},
        {"trials", c.trials},
        {"seed", c.base_seed},
        {"max-rounds", c.max_rounds},
        {"grid-min", c.grid_min},
        {"grid-max", c.grid_max},
        {"grid-points", c.grid_points},
        {"max-cells", c.max_cells},
        {"assignment", c.assignment},
        {"format", c.format == OutputFormat::Csv ? "csv" : "json"},
    };
    if (!c.initial_believers_list.empty()) echo["n0-list"] = c.initial_believers_list;
    if (!c.threshold_list.empty()) echo["m-list"] = c.threshold_list;
    if (!c.flip_list.empty()) echo["d-list"] = c.flip_list;
    if (!c.agnostic_list.empty()) echo["b-list"] = c.agnostic_list;
    return echo;
}

inline nlohmann::json envelope(const std::string& command, const RunConfig& config) {
    return nlohmann::json{{"schema_version", kSchemaVersion}, {"command", command}, {"config", config_echo(config)}};
}

// ---------------------------------------------------------------------------
// expect: closed-form believer flow on a log-spaced grid

struct ExpectRow {
    double believers = 0.0;
    double expected_next = 0.0;
    double drift = 0.0;
};

struct ExpectTable {
    std::vector<ExpectRow> rows;
};

/// Log-spaced grid with exact endpoints; points = 0 yields an empty grid.
inline std::vector<double> log_grid(double lo, double hi, count_t points) {
    std::vector<double> grid;
    if (points <= 0) return grid;
    grid.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        grid.push_back(lo);
        return grid;
    }
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / static_cast<double>(points - 1);
    for (count_t i = 0; i < points; ++i) grid.push_back(std::exp(log_lo + static_cast<double>(i) * step));
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

inline ExpectTable cmd_expect(const RunConfig& raw) {
    const RunConfig config = raw.resolve();
    const ModelParams params = config.validated(ValidationScope::AnalyticOnly);
    ExpectTable table;
    for (double n : log_grid(config.grid_min, config.grid_max, config.grid_points)) {
        const double next = analytic::expected_next(n, params);
        table.rows.push_back({n, next, next - n});
    }
    return table;
}

inline void write_csv(std::ostream& out, const ExpectTable& table) {
    out << "believers,expected_next,drift\n";
    for (const auto& row : table.rows)
        out << detail::fmt("%.10g", row.believers) << ',' << detail::fmt("%.10g", row.expected_next) << ','
            << detail::fmt("%.10g", row.drift) << '\n';
}

inline nlohmann::json to_json(const RunConfig& config, const ExpectTable& table) {
    nlohmann::json doc = envelope("expect", config);
    auto& rows = doc["results"] = nlohmann::json::array();
    for (const auto& row : table.rows)
        rows.push_back({{"believers", row.believers}, {"expected_next", row.expected_next}, {"drift", row.drift}});
    return doc;
}

// ---------------------------------------------------------------------------
// trajectory: iterated mean map

struct TrajectoryRow {
    count_t round = 0;
    double believers = 0.0;
    double percent = 0.0;
};

struct TrajectoryTable {
    std::vector<TrajectoryRow> rows;
};

inline TrajectoryTable cmd_trajectory(const RunConfig& raw) {
    const RunConfig config = raw.resolve();
    const ModelParams params = config.validated(ValidationScope::AnalyticOnly);
    const analytic::Trajectory trajectory =
        analytic::expectation_trajectory(config.initial_believers, params, config.rounds);
    TrajectoryTable table;
    for (std::size_t t = 0; t < trajectory.values.size(); ++t) {
        const double value = trajectory.values[t];
        table.rows.push_back({static_cast<count_t>(t), value,
                              100.0 * value / static_cast<double>(params.community_size)});
    }
    return table;
}

inline void write_csv(std::ostream& out, const TrajectoryTable& table) {
    out << "round,believers,percent\n";
    for (const auto& row : table.rows)
        out << row.round << ',' << detail::fmt("%.10g", row.believers) << ','
            << detail::fmt("%.4f", row.percent) << '\n';
}

inline nlohmann::json to_json(const RunConfig& config, const TrajectoryTable& table) {
    nlohmann::json doc = envelope("trajectory", config);
    auto& rows = doc["results"] = nlohmann::json::array();
    for (const auto& row : table.rows)
        rows.push_back({{"round", row.round}, {"believers", row.believers}, {"percent", row.percent}});
    return doc;
}

// ---------------------------------------------------------------------------
// simulate / ensemble: the stochastic process itself (JSON output only)

inline RunOutcome cmd_simulate(const RunConfig& raw) {
    const RunConfig config = raw.resolve();
    const ModelParams params = config.validated(ValidationScope::Full);
    return sim::run(params, config.initial_believers, config.base_seed, config.max_rounds,
                    config.room_assignment());
}

inline nlohmann::json to_json(const RunOutcome& outcome) {
    return {{"kind", to_string(outcome.kind)},
            {"rounds", outcome.rounds},
            {"final_believers", outcome.final_believers}};
}

inline nlohmann::json to_json(const RunConfig& config, const RunOutcome& outcome) {
    nlohmann::json doc = envelope("simulate", config);
    doc["results"] = to_json(outcome);
    return doc;
}

inline sim::EnsembleStats cmd_ensemble(const RunConfig& raw, unsigned threads = 0) {
    const RunConfig config = raw.resolve();
    const ModelParams params = config.validated(ValidationScope::Full);
    return sim::ensemble(params, config.initial_believers, config.trials, config.base_seed,
                         config.max_rounds, threads, config.room_assignment());
}

inline nlohmann::json to_json(const sim::EnsembleStats& stats) {
    auto quantiles = [](const std::optional<sim::RoundsQuantiles>& q) -> nlohmann::json {
        if (!q) return nullptr;
        return {{"min", q->min}, {"median", q->median}, {"p95", q->p95}, {"max", q->max}};
    };
    return {{"trials", stats.trials},
            {"took_over", stats.took_over},
            {"died_out", stats.died_out},
            {"truncated", stats.truncated},
            {"base_seed", stats.base_seed},
            {"rounds_quantiles",
             {{"took_over", quantiles(stats.rounds_took_over)},
              {"died_out", quantiles(stats.rounds_died_out)},
              {"truncated", quantiles(stats.rounds_truncated)}}}};
}

inline nlohmann::json to_json(const RunConfig& config, const sim::EnsembleStats& stats) {
    nlohmann::json doc = envelope("ensemble", config);
    doc["results"] = to_json(stats);
    return doc;
}

// ---------------------------------------------------------------------------
// sweep: ensembles over a parameter grid

struct SweepCell {
    count_t conversion_threshold = 0;
    double flip_probability = 0.0;
    double agnostic_fraction = 0.0;
    count_t initial_believers = 0;
    sim::EnsembleStats stats;
};

struct SweepTable {
    std::vector<SweepCell> cells;
};

// Cells iterate threshold, then flip, then agnostic fraction, then start
// count; cell i runs with base seed `seed + i`, so a one-cell sweep is
// bit-identical to cmd_ensemble.
inline SweepTable cmd_sweep(const RunConfig& raw, unsigned threads = 0) {
    const RunConfig config = raw.resolve();
    const auto thresholds = config.threshold_list.empty() ? std::vector<count_t>{config.conversion_threshold}
                                                          : config.threshold_list;
    const auto flips = config.flip_list.empty() ? std::vector<double>{config.flip_probability} : config.flip_list;
    const auto agnostics =
        config.agnostic_list.empty() ? std::vector<double>{config.agnostic_fraction} : config.agnostic_list;
    const auto starts = config.initial_believers_list.empty()
                            ? std::vector<count_t>{config.initial_believers}
                            : config.initial_believers_list;

    const std::size_t cells = thresholds.size() * flips.size() * agnostics.size() * starts.size();
    if (cells > static_cast<std::size_t>(config.max_cells))
        throw BudgetError("sweep grid of " + std::to_string(cells) + " cells exceeds max-cells=" +
                          std::to_string(config.max_cells));

    SweepTable table;
    std::uint64_t cell_index = 0;
    for (count_t m : thresholds)
        for (double d : flips)
            for (double b : agnostics)
                for (count_t n0 : starts) {
                    const ModelParams params = validate(config.community_size, config.seed_count, b, d, m,
                                                        config.room_size, ValidationScope::Full);
                    auto stats = sim::ensemble(params, n0, config.trials, config.base_seed + cell_index,
                                               config.max_rounds, threads, config.room_assignment());
                    table.cells.push_back({m, d, b, n0, std::move(stats)});
                    ++cell_index;
                }
    return table;
}

inline void write_csv(std::ostream& out, const SweepTable& table) {
    out << "threshold,flip_probability,agnostic_fraction,initial_believers,trials,"
           "took_over,died_out,truncated,takeover_frequency\n";
    for (const auto& cell : table.cells) {
        const double frequency =
            static_cast<double>(cell.stats.took_over) / static_cast<double>(cell.stats.trials);
        out << cell.conversion_threshold << ',' << detail::fmt("%.10g", cell.flip_probability) << ','
            << detail::fmt("%.10g", cell.agnostic_fraction) << ',' << cell.initial_believers << ','
            << cell.stats.trials << ',' << cell.stats.took_over << ',' << cell.stats.died_out << ','
            << cell.stats.truncated << ',' << detail::fmt("%.4f", frequency) << '\n';
    }
}

inline nlohmann::json to_json(const RunConfig& config, const SweepTable& table) {
    nlohmann::json doc = envelope("sweep", config);
    auto& cells = doc["results"] = nlohmann::json::array();
    for (const auto& cell : table.cells)
        cells.push_back({{"threshold", cell.conversion_threshold},
                         {"flip_probability", cell.flip_probability},
                         {"agnostic_fraction", cell.agnostic_fraction},
                         {"initial_believers", cell.initial_believers},
                         {"takeover_frequency", static_cast<double>(cell.stats.took_over) /
                                                    static_cast<double>(cell.stats.trials)},
                         {"stats", to_json(cell.stats)}});
    return doc;
}

// ---------------------------------------------------------------------------
// fixed-points: mean-field analysis

inline analytic::FixedPointReport cmd_fixed_points(const RunConfig& raw) {
    const RunConfig config = raw.resolve();
    const ModelParams params = config.validated(ValidationScope::AnalyticOnly);
    return analytic::mean_field_fixed_points(params);
}

inline std::string fixed_point_note(analytic::MapKind kind) {
    switch (kind) {
        case analytic::MapKind::ClosedFormM1R2:
            return "unique interior fixed point at 1 - b - d";
        case analytic::MapKind::ClosedFormM2R3:
            return "interior fixed points are the roots of P^2 - (1-b)P + d = 0; the lower root takes the "
                   "minus branch of the square root and the upper root the plus branch";
        case analytic::MapKind::GeneralBinomial:
            return "binomial-tail map; extension beyond the two closed-form parameter pairs";
    }
    return {};
}

inline void write_csv(std::ostream& out, const analytic::FixedPointReport& report) {
    out << "density,stability\n";
    for (const auto& point : report.fixed_points)
        out << detail::fmt("%.10g", point.density) << ',' << to_string(point.stability) << '\n';
}

inline nlohmann::json to_json(const RunConfig& config, const analytic::FixedPointReport& report) {
    nlohmann::json doc = envelope("fixed-points", config);
    auto points = nlohmann::json::array();
    for (const auto& point : report.fixed_points)
        points.push_back({{"density", point.density}, {"stability", to_string(point.stability)}});
    doc["results"] = {{"map_kind", to_string(report.map_kind)},
                      {"fixed_points", points},
                      {"note", fixed_point_note(report.map_kind)}};
    return doc;
}

}  // namespace mrumor::harness
