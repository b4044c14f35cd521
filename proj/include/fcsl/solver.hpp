// Time integrator for the viscous approximation: explicit monotone
// (Engquist-Osher) flux + explicit spectral fractional diffusion of A(u),
// implicit spectral solve for the linear viscous term, Euler-Maruyama noise
// applied after the implicit solve.
//
// Under the time-step rule below the deterministic update is monotone and
// conservative, which is what makes the contraction and comparison
// properties hold path by path in the tests.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fcsl/model.hpp"
#include "fcsl/torus.hpp"

namespace fcsl {

struct SolverConfig {
    int grid_n = 128;
    double dt = 0.0;          // <= 0 means: derive from the CFL rule at start
    double t_end = 1.0;
    double tau = 0.0;         // vanishing-viscosity parameter
    double cfl_safety = 0.45; // joint explicit update stays monotone below 1/2
    int sample_stride = 1;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0; // RNG stream within an ensemble

    // CFL bound dt <= cfl_safety * min(dx/max|F'|, dx^2a/(c_a Lip A),
    // dx^2/(2 tau)) evaluated over the solution range [lo,hi]. The fractional
    // stability constant folds the full symbol sum: c_a = dx^(1+2a) *
    // sum_{k!=0} (2 pi |k|)^(2a), so dx^2a/(c_a) = 1/(dx sum_k symbol).
    double cfl_dt(const ModelSpec& model, const TorusGrid& grid, double lo, double hi) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> states;
    // Realized Brownian increments dbeta_k = sqrt(dt) xi_k, one row per step.
    std::vector<std::vector<double>> noise_record;
    SolverConfig config;
    ModelSpec model;

    const Field& final_state() const { return states.back(); }
};

// One deterministic-plus-noise update. `dbeta` carries the realized mode
// increments for this step (may be empty when K == 0).
Field step(const Field& u, const ModelSpec& model, const SolverConfig& config,
           std::span<const double> dbeta);

Trajectory evolve(const Field& u0, const ModelSpec& model, const SolverConfig& config);

// Re-runs the recorded path; used by diagnostics that need every step and by
// the bit-exact replay contract.
Trajectory replay(const Field& u0, const ModelSpec& model, const SolverConfig& config,
                  const std::vector<std::vector<double>>& noise_record);

// Two trajectories driven by the identical realized mode increments.
std::pair<Trajectory, Trajectory> evolve_pair(const Field& u0_a, const Field& u0_b,
                                              const ModelSpec& model, const SolverConfig& config);

// Resolves an automatic time step from the CFL rule, padding the range of u0
// by three noise standard deviations over the horizon.
double resolve_dt(const Field& u0, const ModelSpec& model, const SolverConfig& config);

// Internal stepping engine, exposed for diagnostics that walk a path step by
// step without storing every state.
class Stepper {
public:
    Stepper(GridPtr grid, const ModelSpec& model, const SolverConfig& config);

    // Applies the full update in place. Throws StabilityError on a CFL
    // violation and DivergenceError on NaN/overflow, tagged with step index.
    void advance(Field& u, std::span<const double> dbeta, long step_index);

    double dt() const { return dt_; }
    long n_steps() const { return n_steps_; }

private:
    GridPtr grid_;
    const ModelSpec* model_;
    SolverConfig config_;
    double dt_ = 0.0;
    long n_steps_ = 0;
    std::vector<double> frac_sym_;      // (2 pi |k|)^(2 alpha)
    std::vector<double> resolvent_sym_; // 1/(1 + dt tau (2 pi k)^2)
    double frac_diag_ = 0.0;            // dx * sum_k frac symbol
};

// Deterministic parallel ensemble: runs per_path(path_index) for each path
// on the OpenMP pool and returns results in path order. Reductions over the
// returned vector are identical for every thread count.
std::vector<Trajectory> run_ensemble(int n_paths,
                                     const std::function<Trajectory(int)>& per_path);
std::vector<Trajectory> run_ensemble_serial(int n_paths,
                                            const std::function<Trajectory(int)>& per_path);

} // namespace fcsl
