// Command-line front end: scenario analysis, gain synthesis, Monte Carlo
// simulation, mean-square stability verification, and the built-in
// six-agent benchmark reproduction.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "mscons/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mean-square consensus synthesis and verification toolkit"};
    app.require_subcommand(1);

    std::string file;
    std::string out_path;
    std::string out_dir;
    std::optional<int> trials;
    std::optional<int> horizon;
    std::optional<std::uint64_t> seed;

    auto* analyze = app.add_subcommand("analyze", "graph spectrum, Mahler measure, condition report");
    analyze->add_option("file", file, "scenario JSON file")->required();

    auto* synth = app.add_subcommand("synthesize", "solve the Riccati design and emit the gain");
    synth->add_option("file", file, "scenario JSON file")->required();
    synth->add_option("-o,--output", out_path, "write the gain JSON here");

    auto* sim = app.add_subcommand("simulate", "run the seeded Monte Carlo ensemble");
    sim->add_option("file", file, "scenario JSON file")->required();
    sim->add_option("-o,--output", out_dir, "output directory for CSV files")->required();
    sim->add_option("--trials", [&](const CLI::results_t& r) { trials = std::stoi(r[0]); return true; },
                    "override trial count");
    sim->add_option("--horizon", [&](const CLI::results_t& r) { horizon = std::stoi(r[0]); return true; },
                    "override horizon");
    sim->add_option("--seed", [&](const CLI::results_t& r) { seed = std::stoull(r[0]); return true; },
                    "override noise seed");

    auto* verify = app.add_subcommand("verify", "exact moment-operator stability verdict");
    verify->add_option("file", file, "scenario JSON file")->required();

    auto* repro = app.add_subcommand("reproduce-paper", "run the built-in cycle benchmark bundle");
    repro->add_option("-o,--output", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    return mscons::run_guarded(
        [&] {
            if (analyze->parsed()) {
                mscons::cmd_analyze(file, std::cout);
            } else if (synth->parsed()) {
                std::optional<std::filesystem::path> out_json;
                if (!out_path.empty()) out_json = out_path;
                mscons::cmd_synthesize(file, out_json, std::cout);
            } else if (sim->parsed()) {
                mscons::cmd_simulate(file, out_dir, trials, horizon, seed, std::cout);
            } else if (verify->parsed()) {
                mscons::cmd_verify(file, std::cout);
            } else if (repro->parsed()) {
                mscons::cmd_reproduce_paper(out_dir, std::cout);
            }
        },
        std::cerr);
}
