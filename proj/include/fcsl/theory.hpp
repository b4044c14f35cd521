// Executable forms of the structural theorems: pathwise and expectation
// L1 contraction, uniform-in-tau Lp bounds, spatial-mean conservation,
// the vanishing-viscosity Cauchy property, and the quantitative
// nonlinearity-diffusivity integral eta(gamma).
#pragma once

#include <limits>
#include <string>
#include <vector>

#include "fcsl/model.hpp"
#include "fcsl/solver.hpp"

namespace fcsl {

struct CheckReport {
    std::string name;
    bool passed = false;
    double statistic = 0.0;
    double threshold = 0.0;
    int n_paths = 0;
    // per-time-sample detail series (time, value)
    std::vector<std::pair<double, double>> details;
};

// Shared-noise two-start contraction. Additive (or zero) noise runs in
// pathwise mode: the statistic is the largest increase of the L1 distance
// between consecutive samples over all paths (threshold 1e-10), which is
// stronger than comparing against the initial distance alone.
// Multiplicative noise runs in expectation mode over n_paths:
// statistic = max_t (E||u_a-u_b||_1 / ||u0_a-u0_b||_1 - 1)^+ with threshold
// 0.05 + 3 * MC standard error. Throws PreconditionError in expectation mode
// when the initial distance vanishes.
CheckReport contraction_check(const Field& u0_a, const Field& u0_b, const ModelSpec& model,
                              const SolverConfig& config, int n_paths);

// E sup_t ||u(t)||_p^p at tau, tau/2, tau/4 with shared per-path noise;
// passes when the three statistics stay within 10% of the value fitted at
// the coarsest tau (the claim under test is tau-uniformity).
CheckReport lp_bound_check(const Field& u0, const ModelSpec& model, const SolverConfig& config,
                           double p, int n_paths);

// max_t |mean u(t) - mean u0| for additive cancellation noise, threshold
// 1e-10. Throws NotApplicableError for multiplicative noise.
CheckReport mean_martingale_check(const Field& u0, const ModelSpec& model,
                                  const SolverConfig& config);

// d_i = sup_t E||u^{tau_i} - u^{tau_i+1}||_1 along a strictly decreasing tau
// ladder with shared noise; passes when the d_i decrease strictly and the
// last is at most half the first. statistic = d_last / d_first.
CheckReport viscosity_cauchy(const Field& u0, const ModelSpec& model,
                             const SolverConfig& base_config, const std::vector<double>& tau_ladder,
                             int n_paths);

inline constexpr double kNldDiverged = std::numeric_limits<double>::infinity();

// eta(gamma): sup over tau (grid + local refinement; in one dimension the
// two unit directions fold into the symmetric tau scan) and over the
// dissipativity values b = |k|^(2 alpha - 1) for k in k_set plus the b -> 0
// limit, of the whole-line integral of
//   gamma (A'(z) b + gamma) / ((gamma + A'(z) b)^2 + (F'(z) + tau)^2).
// The line is folded through z = tan(theta), so the tail extension is exact;
// returns kNldDiverged when partial sums pass 1e6.
double nld_eta(const ModelSpec& model, double gamma, std::pair<double, double> zeta_range,
               const std::vector<double>& tau_grid, const std::vector<int>& k_set);

struct NldResult {
    std::vector<double> gamma_ladder;
    std::vector<double> eta_values;
    double fitted_s = 0.0;
    double fitted_C = 0.0;
    bool degenerate = false;
    std::string k_scan_note; // records the k truncation for alpha > 1/2
};

// Least-squares fit of log eta against log gamma over a ladder spanning at
// least two decades. degenerate = true when any eta diverged (no fit).
NldResult nld_exponent_fit(const ModelSpec& model, const std::vector<double>& gamma_ladder);

// Default scan grids used by the fit and the CLI.
std::vector<double> default_tau_grid(const ModelSpec& model, std::pair<double, double> zeta_range);
std::vector<int> default_k_set();

} // namespace fcsl
