#include "fcsl/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "fcsl/csv.hpp"
#include "fcsl/ergodic.hpp"
#include "fcsl/reduce.hpp"
#include "fcsl/snapshot.hpp"
#include "fcsl/theory.hpp"

namespace fcsl {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

LogLevel current_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("FCSL_LOG");
        if (!env) return LogLevel::Warn;
        const std::string v(env);
        if (v == "error") return LogLevel::Error;
        if (v == "warn") return LogLevel::Warn;
        if (v == "info") return LogLevel::Info;
        if (v == "debug") return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

void write_resolved_config(const RunConfig& cfg, const std::string& out_dir) {
    std::ofstream os(out_dir + "/resolved_config.json", std::ios::trunc);
    os << cfg.to_json() << '\n';
}

void require_valid_model(const ModelSpec& model) {
    auto rep = validate(model, -10.0, 10.0, 200);
    if (!rep.all_passed()) {
        log_message(LogLevel::Error, "model validation failed:\n" + rep.summary());
        throw ConfigError("model fails its structural assumptions; see log");
    }
}

void write_check_csv(const CheckReport& rep, const std::string& out_dir) {
    CsvWriter summary(out_dir + "/check_" + rep.name + ".csv",
                      {"name", "passed", "statistic", "threshold", "n_paths"});
    summary.row({rep.name, rep.passed, rep.statistic, rep.threshold,
                 static_cast<long>(rep.n_paths)});
    CsvWriter details(out_dir + "/check_" + rep.name + "_details.csv", {"time", "value"});
    for (const auto& [t, v] : rep.details) details.row({t, v});
}

Field perturbed_start(const Field& u0, const ExperimentSpec& e) {
    Field out = u0;
    for (int i = 0; i < out.size(); ++i)
        out[i] += e.perturbation_amplitude *
                  std::sin(kTwoPi * e.perturbation_mode * out.grid->cell_center(i));
    return out;
}

} // namespace

void log_message(LogLevel level, const std::string& msg) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (static_cast<int>(level) <= static_cast<int>(current_level()))
        std::cerr << "[fcsl:" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

int run_simulate(RunConfig cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto model = cfg.model.build();
    require_valid_model(model);
    auto grid = make_grid(cfg.solver.grid_n);
    Field u0 = cfg.initial.build(grid);
    cfg.resolve(u0, model);
    write_resolved_config(cfg, out_dir);

    log_message(LogLevel::Info, "simulate: dt=" + std::to_string(cfg.solver.dt) +
                                    ", t_end=" + std::to_string(cfg.solver.t_end));
    auto traj = evolve(u0, model, cfg.solver);

    const bool want_csv = std::find(cfg.output.formats.begin(), cfg.output.formats.end(),
                                    "csv") != cfg.output.formats.end();
    const bool want_snap = std::find(cfg.output.formats.begin(), cfg.output.formats.end(),
                                     "snapshot") != cfg.output.formats.end();

    if (want_csv) {
        std::vector<std::string> header = {"time"};
        for (int i = 0; i < grid->n; ++i) header.push_back("x" + std::to_string(i));
        CsvWriter csv(out_dir + "/trajectory.csv", header);
        for (std::size_t s = 0; s < traj.states.size(); ++s) {
            std::vector<CsvCell> row = {traj.times[s]};
            for (int i = 0; i < grid->n; ++i) row.emplace_back(traj.states[s][i]);
            csv.row(row);
        }
    }
    if (want_snap) {
        fs::create_directories(out_dir + "/snapshots");
        for (std::size_t s = 0; s < traj.states.size(); ++s) {
            const auto step =
                static_cast<std::uint64_t>(std::llround(traj.times[s] / cfg.solver.dt));
            char name[64];
            std::snprintf(name, sizeof(name), "state_%08llu.fcsl",
                          static_cast<unsigned long long>(step));
            write_snapshot(make_snapshot(traj.states[s], traj.times[s], cfg.solver.seed, step),
                           out_dir + "/snapshots/" + name);
        }
    }
    return 0;
}

int run_check(RunConfig cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto model = cfg.model.build();
    require_valid_model(model);
    auto grid = make_grid(cfg.solver.grid_n);
    Field u0 = cfg.initial.build(grid);
    cfg.resolve(u0, model);
    write_resolved_config(cfg, out_dir);

    const std::string& which = cfg.experiment.check;
    log_message(LogLevel::Info, "check: " + which);

    if (which == "contraction") {
        Field u0b = perturbed_start(u0, cfg.experiment);
        auto rep = contraction_check(u0, u0b, model, cfg.solver, cfg.experiment.n_paths);
        write_check_csv(rep, out_dir);
        return rep.passed ? 0 : 1;
    }
    if (which == "lp_bound") {
        auto rep = lp_bound_check(u0, model, cfg.solver, cfg.experiment.p, cfg.experiment.n_paths);
        write_check_csv(rep, out_dir);
        return rep.passed ? 0 : 1;
    }
    if (which == "mean_conservation") {
        auto rep = mean_martingale_check(u0, model, cfg.solver);
        write_check_csv(rep, out_dir);
        return rep.passed ? 0 : 1;
    }
    if (which == "viscosity_cauchy") {
        auto rep = viscosity_cauchy(u0, model, cfg.solver, cfg.experiment.tau_ladder,
                                    cfg.experiment.n_paths);
        write_check_csv(rep, out_dir);
        return rep.passed ? 0 : 1;
    }
    if (which == "nld") {
        auto res = nld_exponent_fit(model, cfg.experiment.gamma_ladder);
        CsvWriter summary(out_dir + "/check_nld.csv",
                          {"name", "passed", "statistic", "threshold", "n_paths"});
        // degeneracy is a classification, not a failure
        summary.row({std::string("nld_exponent"), true,
                     res.degenerate ? std::numeric_limits<double>::quiet_NaN() : res.fitted_s,
                     1.05, static_cast<long>(0)});
        CsvWriter details(out_dir + "/check_nld_details.csv",
                          {"gamma", "eta", "fitted_s", "fitted_C", "degenerate", "note"});
        for (std::size_t i = 0; i < res.gamma_ladder.size(); ++i)
            details.row({res.gamma_ladder[i], res.eta_values[i], res.fitted_s, res.fitted_C,
                         res.degenerate, res.k_scan_note});
        return 0;
    }
    if (which == "defect") {
        auto traj = evolve(u0, model, cfg.solver);
        double sup = 0.0;
        for (const auto& s : traj.states) sup = std::max(sup, lp_norm(s, kLpInf));
        auto zg = make_zeta_grid(-sup - 1.0, sup + 1.0, cfg.experiment.zeta_levels);
        auto est = estimate_defect(traj, model, zg, 8.0, 2048);
        std::ofstream os(out_dir + "/defect_estimate.csv", std::ios::trunc);
        write_csv(est, os);
        CsvWriter tails(out_dir + "/defect_tails.csv", {"L", "tail_mass"});
        bool monotone = true;
        double prev = measure_tail(est, 0.0);
        tails.row({0.0, prev});
        for (double L = 0.5; L <= sup + 1.5; L += 0.5) {
            const double tail = measure_tail(est, L);
            monotone = monotone && tail <= prev + 1e-15;
            tails.row({L, tail});
            prev = tail;
        }
        return monotone ? 0 : 1;
    }
    if (which == "residual") {
        auto traj = evolve(u0, model, cfg.solver);
        double sup = 0.0;
        for (const auto& s : traj.states) sup = std::max(sup, lp_norm(s, kLpInf));
        auto phi = mass_test_function(sup + 0.5, 0.5);
        auto series = kinetic_residual(traj, model, phi);
        CsvWriter csv(out_dir + "/residual_series.csv", {"time", "residual_mass"});
        for (std::size_t s = 0; s < series.times.size(); ++s)
            csv.row({series.times[s], series.values[s]});
        return 0;
    }
    throw ConfigError("config: unknown check '" + which + "'");
}

int run_ergodic(RunConfig cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto model = cfg.model.build();
    require_valid_model(model);
    auto grid = make_grid(cfg.solver.grid_n);
    Field u0 = cfg.initial.build(grid);
    cfg.resolve(u0, model);
    write_resolved_config(cfg, out_dir);

    const auto& e = cfg.experiment;
    log_message(LogLevel::Info, "ergodic: T=" + std::to_string(e.T));
    auto run = simulate_long(u0, model, cfg.solver, e.T, e.burn_in, e.stride);

    {
        CsvWriter csv(out_dir + "/functionals.csv", {"time", e.functional});
        for (std::size_t i = 0; i < run.samples.size(); ++i)
            csv.row({run.times[i], evaluate_functional(e.functional, run.samples[i])});
    }
    if (!run.samples.empty()) {
        // W1 between the two half-windows after burn-in
        const double t0 = run.times.front(), t1 = run.times.back();
        const double mid = 0.5 * (t0 + t1);
        auto first = empirical_measure(run, e.functional, t0, mid);
        auto second = empirical_measure(run, e.functional, mid, t1);
        CsvWriter csv(out_dir + "/w1_summary.csv",
                      {"functional", "window_a", "window_b", "w1"});
        csv.row({e.functional, std::string("first_half"), std::string("second_half"),
                 w1_distance(first, second)});

        auto track = sobolev_norm_track(run.samples, e.sobolev_r, e.sobolev_q);
        CsvWriter so(out_dir + "/sobolev.csv", {"time", "seminorm"});
        for (std::size_t i = 0; i < track.per_sample.size(); ++i)
            so.row({run.times[i], track.per_sample[i]});

        fs::create_directories(out_dir + "/snapshots");
        const std::size_t thin = std::max<std::size_t>(1, run.samples.size() / 16);
        for (std::size_t i = 0; i < run.samples.size(); i += thin) {
            char name[64];
            std::snprintf(name, sizeof(name), "state_%08zu.fcsl", i);
            write_snapshot(make_snapshot(run.samples[i], run.times[i], cfg.solver.seed, i),
                           out_dir + "/snapshots/" + name);
        }
    }

    // coupled two-start decay with a zero-mean perturbation
    Field u0b = perturbed_start(u0, e);
    auto dist = two_start_coupling(u0, u0b, model, cfg.solver, e.T);
    CsvWriter csv(out_dir + "/distance_series.csv", {"time", "l1_distance"});
    for (std::size_t i = 0; i < dist.times.size(); ++i) csv.row({dist.times[i], dist.values[i]});

    if (run.diverged) {
        log_message(LogLevel::Error, "ergodic: path diverged at t=" + std::to_string(run.t_reached) +
                                         "; partial data written");
        return 1;
    }
    return 0;
}

int run_report(const std::string& out_dir) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& entry : fs::directory_iterator(out_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("check_", 0) != 0 || name.find("_details") != std::string::npos ||
            entry.path().extension() != ".csv")
            continue;
        std::ifstream is(entry.path());
        std::string header, line;
        std::getline(is, header);
        while (std::getline(is, line)) {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (cells.size() >= 5) rows.push_back(cells);
        }
    }
    std::sort(rows.begin(), rows.end());

    CsvWriter csv(out_dir + "/report.csv", {"name", "passed", "statistic", "threshold", "n_paths"});
    bool all_ok = true;
    std::cout << "check                        passed   statistic      threshold\n";
    for (const auto& r : rows) {
        csv.row({r[0], r[1] == "true", r[2].empty() ? 0.0 : std::stod(r[2]),
                 r[3].empty() ? 0.0 : std::stod(r[3]), r[4].empty() ? 0L : std::stol(r[4])});
        std::printf("%-28s %-8s %-14s %s\n", r[0].c_str(), r[1].c_str(), r[2].c_str(),
                    r[3].c_str());
        all_ok = all_ok && (r[1] == "true");
    }
    if (rows.empty()) log_message(LogLevel::Warn, "report: no check summaries found in " + out_dir);
    return all_ok ? 0 : 1;
}

} // namespace fcsl
