#pragma once

#include <map>
#include <string>

#include <CLI11.hpp>

#include "mrumor/harness.hpp"

namespace mrumor::harness {

// Wires every RunConfig knob onto a CLI11 (sub)command. Shared between
// the tool and the config round-trip tests so both sides agree on the
// key names; the same names work in --config files.
inline void attach_options(CLI::App& app, RunConfig& config) {
    app.add_option("-N,--community-size", config.community_size, "number of agents (equals the number of seats)");
    app.add_option("-s,--seeds", config.seed_count, "permanently-believing initiators");
    app.add_option("-b,--agnostic-fraction", config.agnostic_fraction, "share of agents that never believe");
    app.add_option("-d,--flip-probability", config.flip_probability,
                   "per-round chance an ordinary believer loses interest");
    app.add_option("-m,--threshold", config.conversion_threshold, "believers needed in a room to convert");
    app.add_option("-r,--room-size", config.room_size, "seats per room");
    app.add_option("--n0,--initial-believers", config.initial_believers,
                   "start-of-run believer count (default: seeds)");
    app.add_option("-T,--rounds", config.rounds, "trajectory length in rounds");
    app.add_option("--trials", config.trials, "independent runs per ensemble");
    app.add_option("--seed", config.base_seed, "base random seed (64-bit)");
    app.add_option("--max-rounds", config.max_rounds, "truncation bound (default: 50*ceil(log2 N))");
    app.add_option("--grid-min", config.grid_min, "lowest believer count on the evaluation grid");
    app.add_option("--grid-max", config.grid_max, "highest believer count on the evaluation grid");
    app.add_option("--grid-points", config.grid_points, "log-spaced grid size");
    app.add_option("--n0-list", config.initial_believers_list, "sweep start counts")->delimiter(',');
    app.add_option("--m-list", config.threshold_list, "sweep conversion thresholds")->delimiter(',');
    app.add_option("--d-list", config.flip_list, "sweep flip probabilities")->delimiter(',');
    app.add_option("--b-list", config.agnostic_list, "sweep agnostic fractions")->delimiter(',');
    app.add_option("--max-cells", config.max_cells, "sweep cell budget");
    app.add_option("--assignment", config.assignment, "room assignment: shuffle | hypergeometric");
    app.add_option("--format", config.format, "output format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, OutputFormat>{{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}},
            CLI::ignore_case));
    app.set_config("--config", "", "flat key=value config file; command-line flags take precedence");
}

}  // namespace mrumor::harness
