#include "fcsl/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fcsl {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// Misspellings that map to a differently named option.
const std::vector<std::pair<std::string, std::string>>& alias_table() {
    static const std::vector<std::pair<std::string, std::string>> aliases = {
        {"viscosity", "tau"}, {"nu", "tau"}, {"timestep", "dt"}, {"grid", "n"},
    };
    return aliases;
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key,
                              const std::vector<std::string>& known) {
    std::string best;
    int best_d = 1000;
    for (const auto& k : known) {
        const int d = edit_distance(key, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    for (const auto& [alias, target] : alias_table()) {
        const int d = edit_distance(key, alias);
        if (d < best_d && d <= 2) {
            best_d = d;
            best = target;
        }
    }
    std::string msg = "config: unknown key '" + key + "' in section '" + section + "'";
    if (best_d <= 3 && !best.empty()) msg += "; did you mean '" + best + "'?";
    throw ConfigError(msg);
}

void check_keys(const json& obj, const std::string& section,
                const std::vector<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            unknown_key(section, it.key(), known);
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
}

} // namespace

Field InitialSpec::build(const GridPtr& grid) const {
    const double a = amplitude, m = mean;
    const int k = mode;
    if (kind == "sine")
        return sample_field(grid, [a, m, k](double x) { return m + a * std::sin(kTwoPi * k * x); });
    if (kind == "cosine")
        return sample_field(grid, [a, m, k](double x) { return m + a * std::cos(kTwoPi * k * x); });
    if (kind == "constant")
        return sample_field(grid, [m](double) { return m; });
    if (kind == "two_mode") {
        const double a2 = amplitude2;
        const int k2 = mode2;
        return sample_field(grid, [a, m, k, a2, k2](double x) {
            return m + a * std::sin(kTwoPi * k * x) + a2 * std::sin(kTwoPi * k2 * x);
        });
    }
    if (kind == "step")
        return sample_field(grid, [a, m](double x) { return m + ((x < 0.5) ? a : -a); });
    throw ConfigError("config: unknown initial kind '" + kind + "'");
}

ModelSpec ModelConfig::build() const {
    ModelSpec spec = builtin_model(name);
    if (name == "linear_advection" && advection_speed != 1.0) {
        const double c = advection_speed;
        spec.flux.flux = [c](double z) { return c * z; };
        spec.flux.flux_prime = [c](double) { return c; };
        spec.flux.eo_plus = [c](double a) { return std::max(c, 0.0) * a; };
        spec.flux.eo_minus = [c](double b) { return std::min(c, 0.0) * b; };
    }
    spec.alpha = FractionalOrder(alpha);
    if (noise.kind == "none" || noise.K == 0) {
        spec.noise = NoiseSpec{};
    } else if (noise.kind == "additive") {
        spec.noise = additive_noise(noise.family, noise.K, noise.q, noise.amplitude);
        spec.noise.cancellation = noise.cancellation;
    } else if (noise.kind == "multiplicative") {
        spec.noise = multiplicative_noise(noise.K, noise.q, noise.amplitude);
    } else {
        throw ConfigError("config: unknown noise kind '" + noise.kind + "'");
    }
    if (!spec.alpha_in_wellposed_regime())
        throw ConfigError(
            "config: alpha=" + std::to_string(alpha) +
            " violates the well-posedness regime: x-dependent noise requires alpha in (0,1/2)");
    return spec;
}

void RunConfig::resolve(const Field& u0, const ModelSpec& model_spec) {
    if (auto_cfl || solver.dt <= 0.0) {
        solver.dt = resolve_dt(u0, model_spec, solver);
        auto_cfl = false;
    }
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }

    check_keys(doc, "top-level", {"model", "initial", "solver", "experiment", "output"});

    RunConfig cfg;
    if (doc.contains("model")) {
        const auto& m = doc["model"];
        check_keys(m, "model", {"name", "advection_speed", "alpha", "noise"});
        cfg.model.name = get_or<std::string>(m, "name", cfg.model.name);
        cfg.model.advection_speed = get_or<double>(m, "advection_speed", cfg.model.advection_speed);
        cfg.model.alpha = get_or<double>(m, "alpha", cfg.model.alpha);
        if (m.contains("noise")) {
            const auto& n = m["noise"];
            check_keys(n, "model.noise", {"kind", "family", "K", "q", "amplitude", "cancellation"});
            cfg.model.noise.kind = get_or<std::string>(n, "kind", cfg.model.noise.kind);
            cfg.model.noise.family = get_or<std::string>(n, "family", cfg.model.noise.family);
            cfg.model.noise.K = get_or<int>(n, "K", cfg.model.noise.K);
            cfg.model.noise.q = get_or<double>(n, "q", cfg.model.noise.q);
            cfg.model.noise.amplitude = get_or<double>(n, "amplitude", cfg.model.noise.amplitude);
            cfg.model.noise.cancellation = get_or<bool>(n, "cancellation", cfg.model.noise.cancellation);
        }
    }
    if (doc.contains("initial")) {
        const auto& s = doc["initial"];
        check_keys(s, "initial", {"kind", "amplitude", "mode", "mean", "amplitude2", "mode2"});
        cfg.initial.kind = get_or<std::string>(s, "kind", cfg.initial.kind);
        cfg.initial.amplitude = get_or<double>(s, "amplitude", cfg.initial.amplitude);
        cfg.initial.mode = get_or<int>(s, "mode", cfg.initial.mode);
        cfg.initial.mean = get_or<double>(s, "mean", cfg.initial.mean);
        cfg.initial.amplitude2 = get_or<double>(s, "amplitude2", cfg.initial.amplitude2);
        cfg.initial.mode2 = get_or<int>(s, "mode2", cfg.initial.mode2);
    }
    if (doc.contains("solver")) {
        const auto& s = doc["solver"];
        check_keys(s, "solver", {"n", "dt", "t_end", "tau", "cfl_safety", "sample_stride", "seed"});
        cfg.solver.grid_n = get_or<int>(s, "n", cfg.solver.grid_n);
        if (s.contains("dt")) {
            if (s["dt"].is_string()) {
                if (s["dt"].get<std::string>() != "auto-cfl")
                    throw ConfigError("config: dt must be a positive number or \"auto-cfl\"");
                cfg.auto_cfl = true;
                cfg.solver.dt = 0.0;
            } else {
                cfg.solver.dt = s["dt"].get<double>();
                if (cfg.solver.dt <= 0.0) throw ConfigError("config: dt must be positive");
                cfg.auto_cfl = false;
            }
        }
        cfg.solver.t_end = get_or<double>(s, "t_end", cfg.solver.t_end);
        cfg.solver.tau = get_or<double>(s, "tau", cfg.solver.tau);
        cfg.solver.cfl_safety = get_or<double>(s, "cfl_safety", cfg.solver.cfl_safety);
        cfg.solver.sample_stride = get_or<int>(s, "sample_stride", cfg.solver.sample_stride);
        cfg.solver.seed = get_or<std::uint64_t>(s, "seed", cfg.solver.seed);
    }
    if (doc.contains("experiment")) {
        const auto& e = doc["experiment"];
        check_keys(e, "experiment",
                   {"check", "n_paths", "perturbation_amplitude", "perturbation_mode", "p",
                    "tau_ladder", "gamma_ladder", "T", "burn_in", "stride", "functional",
                    "sobolev_r", "sobolev_q", "zeta_levels"});
        cfg.experiment.check = get_or<std::string>(e, "check", cfg.experiment.check);
        cfg.experiment.n_paths = get_or<int>(e, "n_paths", cfg.experiment.n_paths);
        cfg.experiment.perturbation_amplitude =
            get_or<double>(e, "perturbation_amplitude", cfg.experiment.perturbation_amplitude);
        cfg.experiment.perturbation_mode =
            get_or<int>(e, "perturbation_mode", cfg.experiment.perturbation_mode);
        cfg.experiment.p = get_or<double>(e, "p", cfg.experiment.p);
        cfg.experiment.tau_ladder =
            get_or<std::vector<double>>(e, "tau_ladder", cfg.experiment.tau_ladder);
        cfg.experiment.gamma_ladder =
            get_or<std::vector<double>>(e, "gamma_ladder", cfg.experiment.gamma_ladder);
        cfg.experiment.T = get_or<double>(e, "T", cfg.experiment.T);
        cfg.experiment.burn_in = get_or<double>(e, "burn_in", cfg.experiment.burn_in);
        cfg.experiment.stride = get_or<double>(e, "stride", cfg.experiment.stride);
        cfg.experiment.functional = get_or<std::string>(e, "functional", cfg.experiment.functional);
        cfg.experiment.sobolev_r = get_or<double>(e, "sobolev_r", cfg.experiment.sobolev_r);
        cfg.experiment.sobolev_q = get_or<double>(e, "sobolev_q", cfg.experiment.sobolev_q);
        cfg.experiment.zeta_levels = get_or<int>(e, "zeta_levels", cfg.experiment.zeta_levels);
    }
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        check_keys(o, "output", {"directory", "formats"});
        cfg.output.directory = get_or<std::string>(o, "directory", cfg.output.directory);
        cfg.output.formats = get_or<std::vector<std::string>>(o, "formats", cfg.output.formats);
    }

    // semantic validation happens at build time; run it now so bad configs
    // fail before any work starts
    (void)cfg.model.build();
    if (cfg.solver.grid_n < 8 || cfg.solver.grid_n > (1 << 20) || cfg.solver.grid_n % 2 != 0)
        throw ConfigError("config: solver.n must be even and within [8, 2^20]");
    if (cfg.experiment.burn_in < 0.0) cfg.experiment.burn_in = cfg.experiment.T / 10.0;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string RunConfig::to_json() const {
    json doc;
    doc["model"] = {{"name", model.name},
                    {"advection_speed", model.advection_speed},
                    {"alpha", model.alpha},
                    {"noise",
                     {{"kind", model.noise.kind},
                      {"family", model.noise.family},
                      {"K", model.noise.K},
                      {"q", model.noise.q},
                      {"amplitude", model.noise.amplitude},
                      {"cancellation", model.noise.cancellation}}}};
    doc["initial"] = {{"kind", initial.kind},     {"amplitude", initial.amplitude},
                      {"mode", initial.mode},     {"mean", initial.mean},
                      {"amplitude2", initial.amplitude2}, {"mode2", initial.mode2}};
    if (auto_cfl || solver.dt <= 0.0)
        doc["solver"]["dt"] = "auto-cfl";
    else
        doc["solver"]["dt"] = solver.dt;
    doc["solver"]["n"] = solver.grid_n;
    doc["solver"]["t_end"] = solver.t_end;
    doc["solver"]["tau"] = solver.tau;
    doc["solver"]["cfl_safety"] = solver.cfl_safety;
    doc["solver"]["sample_stride"] = solver.sample_stride;
    doc["solver"]["seed"] = solver.seed;
    doc["experiment"] = {{"check", experiment.check},
                         {"n_paths", experiment.n_paths},
                         {"perturbation_amplitude", experiment.perturbation_amplitude},
                         {"perturbation_mode", experiment.perturbation_mode},
                         {"p", experiment.p},
                         {"tau_ladder", experiment.tau_ladder},
                         {"gamma_ladder", experiment.gamma_ladder},
                         {"T", experiment.T},
                         {"burn_in", experiment.burn_in},
                         {"stride", experiment.stride},
                         {"functional", experiment.functional},
                         {"sobolev_r", experiment.sobolev_r},
                         {"sobolev_q", experiment.sobolev_q},
                         {"zeta_levels", experiment.zeta_levels}};
    doc["output"] = {{"directory", output.directory}, {"formats", output.formats}};
    return doc.dump(2);
}

} // namespace fcsl
