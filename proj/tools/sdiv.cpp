// Command-line front end: breakdown-bound grids, contamination sweeps,
// scenario bounds, and randomized property-check batches, all written as
// deterministic CSV.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure,
// 3 property violation (check commands).

#include <cstdio>
#include <deque>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sdiv/commands.hpp"
#include "sdiv/run_config.hpp"

namespace {

struct FlagCapture {
    std::deque<std::string> storage;  // stable addresses for CLI11 bindings
    std::vector<std::pair<std::string, CLI::Option*>> options;

    void add(CLI::App* cmd, const std::string& flag, const std::string& key,
             const std::string& help) {
        storage.emplace_back();
        options.emplace_back(key, cmd->add_option(flag, storage.back(), help));
    }

    void apply(sdiv::RunConfig& cfg) const {
        for (std::size_t i = 0; i < options.size(); ++i) {
            if (options[i].second->count() > 0) {
                sdiv::apply_config_key(cfg, options[i].first, storage[i]);
            }
        }
    }
};

void add_common_flags(CLI::App* cmd, FlagCapture& flags) {
    flags.add(cmd, "--alpha", "alpha", "comma-separated alpha values");
    flags.add(cmd, "--lambda", "lambda", "comma-separated lambda values");
    flags.add(cmd, "--family", "family", "model family / scenario name");
    flags.add(cmd, "--mu0", "mu0", "contaminant location (normal families)");
    flags.add(cmd, "--sigma0", "sigma0", "contaminant scale (normal families)");
    flags.add(cmd, "--rate0", "rate0", "contaminant rate (exponential/gamma)");
    flags.add(cmd, "--shape", "shape", "gamma shape parameter t");
    flags.add(cmd, "--eta", "eta", "contaminant location for scenario bounds");
    flags.add(cmd, "--dim", "dim", "data dimension p (mv-scatter scenario)");
    flags.add(cmd, "--size", "size", "binomial size parameter n");
    flags.add(cmd, "--eps", "eps", "contamination grid start:stop:step (or one value)");
    flags.add(cmd, "--integrator", "integrator", "integration backend: quadrature or mc");
    flags.add(cmd, "--mc-samples", "mc_samples", "Monte Carlo sample count");
    flags.add(cmd, "--seed", "seed", "64-bit RNG seed");
    flags.add(cmd, "--rel-tol", "rel_tol", "quadrature relative tolerance");
    flags.add(cmd, "--abs-tol", "abs_tol", "quadrature absolute tolerance");
    flags.add(cmd, "--max-subdiv", "max_subdiv", "quadrature subdivision budget");
    flags.add(cmd, "--n-grid", "n_grid", "optimizer grid points per dimension");
    flags.add(cmd, "--count", "check_count", "number of randomized check instances");
    flags.add(cmd, "--out", "out", "output CSV path (default $SDIV_OUT_DIR/<command>.csv)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sdiv: S-divergence estimation and breakdown-bound experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string check_kind = "divergence-floor";
    bool split = false;

    CLI::App* bound_grid = app.add_subcommand("bound-grid", "breakdown-bound (alpha, lambda) grid");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "estimates as a function of contamination");
    CLI::App* scenario = app.add_subcommand("scenario-bound", "scale-family scenario bounds");
    CLI::App* check = app.add_subcommand("check", "randomized inequality check batches");

    FlagCapture flags;
    for (CLI::App* cmd : {bound_grid, sweep_cmd, scenario, check}) {
        add_common_flags(cmd, flags);
        cmd->add_option("--config", config_path, "flat key=value config file; flags override");
    }
    sweep_cmd->add_flag("--split", split, "one output file per (alpha, lambda) combination");
    check->add_option("--kind", check_kind,
                      "divergence-floor, breakdown-inequality, or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        sdiv::RunConfig cfg;
        if (!config_path.empty()) cfg = sdiv::load_config_file(config_path);
        flags.apply(cfg);
        cfg.split_output = split || cfg.split_output;

        std::vector<sdiv::RunConfig::Command> commands;
        if (app.got_subcommand(bound_grid)) {
            commands.push_back(sdiv::RunConfig::Command::bound_grid);
        } else if (app.got_subcommand(sweep_cmd)) {
            commands.push_back(sdiv::RunConfig::Command::sweep);
        } else if (app.got_subcommand(scenario)) {
            commands.push_back(sdiv::RunConfig::Command::scenario_bound);
        } else {
            if (check_kind == "divergence-floor" || check_kind == "all") {
                commands.push_back(sdiv::RunConfig::Command::check_divergence_floor);
            }
            if (check_kind == "breakdown-inequality" || check_kind == "all") {
                commands.push_back(sdiv::RunConfig::Command::check_breakdown_inequality);
            }
            if (commands.empty()) {
                std::fprintf(stderr, "unknown check kind '%s'\n", check_kind.c_str());
                return 1;
            }
        }

        int violations = 0;
        const std::string out_base = cfg.out;
        for (auto command : commands) {
            cfg.command = command;
            cfg.out = out_base;
            if (commands.size() > 1 && !out_base.empty()) {
                // Several commands, one --out: suffix each file by command.
                std::string path = out_base;
                const std::string tag = "-" + sdiv::detail::command_name(command);
                const auto dot = path.rfind(".csv");
                if (dot != std::string::npos && dot == path.size() - 4) {
                    path.insert(dot, tag);
                } else {
                    path += tag;
                }
                cfg.out = path;
            }
            violations += sdiv::run_and_write(cfg);
            std::printf("%s -> %s\n", sdiv::detail::command_name(command).c_str(),
                        sdiv::resolve_out_path(cfg).c_str());
        }
        if (violations > 0) {
            std::fprintf(stderr, "%d property violation(s) detected\n", violations);
            return 3;
        }
        return 0;
    } catch (const sdiv::IOFailure& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const sdiv::UnknownScenario& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const sdiv::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
}
