// Problem data: flux F, diffusion A, truncated cylindrical noise {h_k}, and
// numerical validation of the structural assumptions the theory needs
// (flux regularity and growth, monotone Lipschitz diffusion, summable noise,
// zero-mean cancellation).
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fcsl/operators.hpp"
#include "fcsl/rng.hpp"
#include "fcsl/torus.hpp"

namespace fcsl {

using ScalarFn = std::function<double(double)>;

enum class FluxBoundKind { Subquadratic, SublinearSecondDerivative, Custom };

struct FluxSpec {
    std::string name;
    ScalarFn flux;        // F
    ScalarFn flux_prime;  // F'
    FluxBoundKind second_derivative_bound = FluxBoundKind::Custom;

    // Engquist-Osher splitting: eo_plus(a) = int_0^a max(F',0),
    // eo_minus(b) = int_0^b min(F',0). Closed forms for builtins.
    ScalarFn eo_plus;
    ScalarFn eo_minus;

    // max |F'| over [lo,hi]; endpoint evaluation plus a coarse interior scan.
    double max_flux_prime(double lo, double hi) const;
};

struct DiffusionSpec {
    std::string name;
    ScalarFn diffusion;        // A, non-decreasing Lipschitz
    ScalarFn diffusion_prime;  // A'
    double lipschitz_const = 0.0;
};

enum class NoiseKind { Additive, Multiplicative };

struct NoiseMode {
    // Additive: profile(x). Multiplicative: profile(x) * shape(u).
    std::function<double(double)> profile;
    std::function<double(double)> shape; // identity shape == nullptr for additive
};

struct NoiseSpec {
    NoiseKind kind = NoiseKind::Additive;
    std::vector<NoiseMode> modes;
    int K = 0;                  // mode count
    double decay_exponent = 2.0; // amplitudes scale like k^-q
    double amplitude = 0.0;
    bool cancellation = true;   // every mode has zero spatial mean
    bool depends_on_x = true;   // general Psi(x,u) vs pure Psi(u)
    double c0_bound = 10.0;     // declared bound for sum ||h_k||^2 and H^2 growth

    double h_k(int k, double x, double u) const;
};

struct ModelSpec {
    std::string name;
    FluxSpec flux;
    DiffusionSpec diffusion;
    NoiseSpec noise;
    FractionalOrder alpha{0.5};

    // General x-dependent noise is covered by the theory only for
    // alpha < 1/2; pure multiplicative noise allows the whole range (0,1).
    bool alpha_in_wellposed_regime() const;
};

ModelSpec builtin_model(const std::string& name);

// Additive families: "sin" (h_k = amp sin(2 pi k x)/k^q) and "mixed"
// (alternating sin/cos per frequency). Both satisfy the cancellation
// condition.
NoiseSpec additive_noise(const std::string& family, int K, double q, double amp);

// Bounded multiplicative family h_k(x,u) = amp sin(2 pi k x) k^-q u/(1+u^2).
NoiseSpec multiplicative_noise(int K, double q, double amp);

// H^2(x,u) = sum_{k<=K} |h_k(x,u)|^2.
double h_norm_sq(const NoiseSpec& spec, double x, double u);

// sum_k h_k(., u(.)) * dbeta_k for realized increments dbeta.
Field noise_field(const NoiseSpec& spec, const Field& u, std::span<const double> dbeta);

// One Euler-Maruyama increment sum_k h_k(., u(.)) * dbeta_k with
// dbeta_k = sqrt(dt) * xi_k. The draws xi are passed in so coupled paths can
// share one realization.
Field noise_increment(const NoiseSpec& spec, const Field& u, double dt,
                      std::span<const double> xi);

// Convenience: draw xi from the path RNG at a given step, then apply.
Field noise_increment(const NoiseSpec& spec, const Field& u, double dt, const PathRng& rng,
                      std::uint64_t step);

std::vector<double> draw_mode_increments(const NoiseSpec& spec, const PathRng& rng,
                                         std::uint64_t step);

struct AssumptionCheck {
    std::string id;          // e.g. "flux-regularity"
    std::string description;
    bool passed = false;
    std::string witness;     // populated on failure
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;
    bool all_passed() const;
    std::string summary() const;
};

// Samples the structural assumptions on [zeta_lo, zeta_hi]. Failures are
// report entries, never exceptions.
ValidationReport validate(const ModelSpec& spec, double zeta_lo, double zeta_hi, int n_samples);

} // namespace fcsl
