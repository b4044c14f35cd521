// Run configuration: strict JSON parsing (unknown keys are errors, with a
// suggestion), defaulting, semantic validation, and a canonical resolved
// echo so every accepted run is reproducible from its own output.
#pragma once

#include <optional>
#include <string>

#include "fcsl/kinetic.hpp"
#include "fcsl/model.hpp"
#include "fcsl/solver.hpp"

namespace fcsl {

struct InitialSpec {
    std::string kind = "sine"; // sine | cosine | two_mode | constant | step
    double amplitude = 0.5;
    int mode = 1;
    double mean = 0.0;
    double amplitude2 = 0.0; // second component for two_mode
    int mode2 = 2;

    Field build(const GridPtr& grid) const;
};

struct ExperimentSpec {
    std::string check = "contraction"; // contraction | lp_bound | mean_conservation |
                                       // viscosity_cauchy | nld | kinetic_residual | defect
    int n_paths = 16;
    double perturbation_amplitude = 0.2;
    int perturbation_mode = 2;
    double p = 2.0;
    std::vector<double> tau_ladder = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    std::vector<double> gamma_ladder = {1e-1, 1e-2, 1e-3};
    double T = 100.0;      // ergodic horizon
    double burn_in = -1.0; // < 0: default T/10
    double stride = 0.5;
    std::string functional = "L1_norm";
    double sobolev_r = 0.5;
    double sobolev_q = 2.0;
    int zeta_levels = 64;
};

struct OutputSpec {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "snapshot"};
};

struct NoiseConfig {
    std::string kind = "additive"; // additive | multiplicative | none
    std::string family = "sin";    // sin | mixed
    int K = 8;
    double q = 2.0;
    double amplitude = 0.25;
    bool cancellation = true;
};

struct ModelConfig {
    std::string name = "burgers_frac";
    double advection_speed = 1.0;
    double alpha = 0.3;
    NoiseConfig noise;

    ModelSpec build() const;
};

struct RunConfig {
    ModelConfig model;
    InitialSpec initial;
    SolverConfig solver;   // dt <= 0 encodes "auto-cfl"
    bool auto_cfl = true;
    ExperimentSpec experiment;
    OutputSpec output;

    // Fills solver.dt from the CFL rule when auto_cfl is set.
    void resolve(const Field& u0, const ModelSpec& model_spec);

    std::string to_json() const; // canonical resolved echo
};

// Parses and validates a config document. Unknown keys raise ConfigError
// with a nearest-key suggestion; semantic violations (e.g. alpha outside the
// regime its noise family allows) name the violated assumption.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

} // namespace fcsl
