// fcsl: simulator and property-check harness for stochastic fractional
// conservation laws on the periodic torus.
//
// Subcommands: simulate | check | ergodic | report. Every run is driven by
// one JSON config; --threads only changes wall-clock time, never results.
#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <iostream>

#include "fcsl/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"stochastic fractional conservation laws on the torus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "path to the JSON run configuration")
                ->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--threads", threads, "OpenMP thread count (speed only, never results)");
        sub->add_option("--seed-override", seed_override, "replace the config seed")
            ->each([&](const std::string&) { has_seed_override = true; });
    };

    auto* sim = app.add_subcommand("simulate", "integrate one path and write trajectory artifacts");
    auto* chk = app.add_subcommand("check", "run the configured property check");
    auto* erg = app.add_subcommand("ergodic", "long-run sampling, coupling decay, empirical laws");
    auto* rep = app.add_subcommand("report", "aggregate prior check CSVs into one table");
    add_common(sim, true);
    add_common(chk, true);
    add_common(erg, true);
    add_common(rep, false);

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (rep->parsed()) {
            return fcsl::run_report(out_dir.empty() ? "out" : out_dir);
        }
        fcsl::RunConfig cfg = fcsl::load_config(config_path);
        if (has_seed_override) cfg.solver.seed = seed_override;
        const std::string dir = out_dir.empty() ? cfg.output.directory : out_dir;
        if (sim->parsed()) return fcsl::run_simulate(std::move(cfg), dir);
        if (chk->parsed()) return fcsl::run_check(std::move(cfg), dir);
        if (erg->parsed()) return fcsl::run_ergodic(std::move(cfg), dir);
    } catch (const fcsl::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
