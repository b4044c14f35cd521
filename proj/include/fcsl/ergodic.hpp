// Long-time behavior: time-averaged empirical measures of solution
// functionals, exact one-dimensional Wasserstein comparison, two-start
// coupling decay, and a fractional Sobolev norm tracked as a tightness
// proxy.
#pragma once

#include <string>
#include <vector>

#include "fcsl/model.hpp"
#include "fcsl/solver.hpp"

namespace fcsl {

struct LongRun {
    std::vector<double> times;
    std::vector<Field> samples; // thinned states, one per stride after burn-in
    bool diverged = false;      // a path abort leaves the partial data flagged
    double t_reached = 0.0;
};

// Samples the path every `stride` time units after `burn_in`. Requires
// zero-mean initial data, additive cancellation noise, and alpha < 1/2.
LongRun simulate_long(const Field& u0, const ModelSpec& model, const SolverConfig& config,
                      double T, double burn_in, double stride);

struct EmpiricalMeasure {
    std::string functional_name;
    std::vector<double> samples;
    std::pair<double, double> t_window{0.0, 0.0};
};

// Known functionals: L1_norm, L2_norm, Linf_norm, mode_1_amplitude, mean.
double evaluate_functional(const std::string& name, const Field& u);

EmpiricalMeasure empirical_measure(const std::vector<Field>& samples,
                                   const std::string& functional_name);
EmpiricalMeasure empirical_measure(const LongRun& run, const std::string& functional_name,
                                   double t_from, double t_to);

// Exact W1 distance between two empirical measures with uniform weights:
// the L1 distance of their quantile functions. Sample counts may differ.
double w1_distance(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2);

struct DistanceSeries {
    std::vector<double> times;
    std::vector<double> values;
};

// ||u_a(t) - u_b(t)||_L1 under shared noise. Requires equal initial means:
// the mean is conserved, so a mean gap can never close.
DistanceSeries two_start_coupling(const Field& u0_a, const Field& u0_b, const ModelSpec& model,
                                  const SolverConfig& config, double T);

struct SobolevTrack {
    std::vector<double> per_sample; // seminorm per thinned state
    double average = 0.0;           // time average over the samples
};

// Fractional Sobolev seminorm per sample: the spectral form
// (sum_k (2 pi |k|)^(2r) |u_k|^2)^(1/2) for q = 2, the Slobodeckij double
// sum for q = 1. r must lie in (0,1).
SobolevTrack sobolev_norm_track(const std::vector<Field>& samples, double r, double q);

} // namespace fcsl
