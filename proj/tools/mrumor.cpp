// Command-line front end for the room-based rumor spreading toolkit.
//
// Subcommands: expect, trajectory, simulate, ensemble, sweep,
// fixed-points. Exit codes: 0 success, 2 configuration or validation
// error, 3 budget guard tripped. MRUMOR_THREADS overrides the ensemble
// worker count (results do not depend on it).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "mrumor/cli_options.hpp"
#include "mrumor/harness.hpp"

namespace {

using mrumor::harness::OutputFormat;
using mrumor::harness::RunConfig;

unsigned threads_from_env() {
    const char* value = std::getenv("MRUMOR_THREADS");
    if (!value) return 0;
    const long parsed = std::strtol(value, nullptr, 10);
    return parsed > 0 ? static_cast<unsigned>(parsed) : 0;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + out_path);
    file << text;
}

template <class Table>
std::string render(const RunConfig& config, const Table& table) {
    if (config.format == OutputFormat::Json) return mrumor::harness::to_json(config, table).dump(2) + "\n";
    std::ostringstream out;
    mrumor::harness::write_csv(out, table);
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"m-threshold rumor spreading: exact believer-flow formulas, mean-field fixed points, "
                 "and a seeded Monte Carlo simulator of the room process"};
    app.require_subcommand(1);

    RunConfig config;
    std::string out_path;
    std::string command;
    // Shared options live on the root; subcommands select the command and
    // let their flags fall through, so `mrumor ensemble --trials 50` and a
    // flat --config file both work.
    mrumor::harness::attach_options(app, config);
    app.add_option("--out", out_path, "write output to this file instead of stdout");
    for (const char* name : {"expect", "trajectory", "simulate", "ensemble", "sweep", "fixed-points"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough(true);
        sub->callback([&command, name] { command = name; });
    }
    app.get_subcommand("expect")->description("expected next-round believers and drift on a believer grid");
    app.get_subcommand("trajectory")->description("iterated mean trajectory of the believer count");
    app.get_subcommand("simulate")->description("one seeded stochastic run (JSON)");
    app.get_subcommand("ensemble")->description("seeded independent runs with outcome statistics (JSON)");
    app.get_subcommand("sweep")->description("ensembles over a grid of thresholds, rates, and start counts");
    app.get_subcommand("fixed-points")->description("mean-field fixed points and their stability (closed forms)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const unsigned threads = threads_from_env();
        if (command == "expect") {
            emit(out_path, render(config, mrumor::harness::cmd_expect(config)));
        } else if (command == "trajectory") {
            emit(out_path, render(config, mrumor::harness::cmd_trajectory(config)));
        } else if (command == "simulate") {
            emit(out_path, mrumor::harness::to_json(config, mrumor::harness::cmd_simulate(config)).dump(2) + "\n");
        } else if (command == "ensemble") {
            emit(out_path,
                 mrumor::harness::to_json(config, mrumor::harness::cmd_ensemble(config, threads)).dump(2) + "\n");
        } else if (command == "sweep") {
            emit(out_path, render(config, mrumor::harness::cmd_sweep(config, threads)));
        } else if (command == "fixed-points") {
            emit(out_path, render(config, mrumor::harness::cmd_fixed_points(config)));
        }
    } catch (const mrumor::harness::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
