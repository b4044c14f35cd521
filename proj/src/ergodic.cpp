#include "fcsl/ergodic.hpp"

#include <algorithm>
#include <cmath>

#include "fcsl/reduce.hpp"

namespace fcsl {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

LongRun simulate_long(const Field& u0, const ModelSpec& model, const SolverConfig& config,
                      double T, double burn_in, double stride) {
    if (model.noise.K > 0 &&
        (model.noise.kind != NoiseKind::Additive || !model.noise.cancellation))
        throw PreconditionError("simulate_long: requires additive cancellation noise");
    if (std::abs(u0.mean()) > 1e-12)
        throw PreconditionError("simulate_long: initial data must have zero spatial mean");
    if (!(model.alpha.alpha < 0.5))
        throw PreconditionError("simulate_long: requires alpha < 1/2");
    if (!(stride > 0.0) || burn_in < 0.0 || T < burn_in)
        throw ConfigError("simulate_long: bad sampling schedule");

    SolverConfig cfg = config;
    cfg.t_end = T;
    if (cfg.dt <= 0.0) cfg.dt = resolve_dt(u0, model, cfg);

    LongRun run;
    if (T <= burn_in) return run;

    Stepper stepper(u0.grid, model, cfg);
    const double dt = stepper.dt();
    const long steps = stepper.n_steps();
    const long stride_steps = std::max<long>(1, static_cast<long>(std::llround(stride / dt)));
    const long burn_steps = static_cast<long>(std::ceil(burn_in / dt));

    PathRng rng(cfg.seed, cfg.path_index);
    Field u = u0;
    std::vector<double> dbeta(static_cast<std::size_t>(model.noise.K));
    const double sqdt = std::sqrt(dt);
    for (long s = 0; s < steps; ++s) {
        for (int k = 0; k < model.noise.K; ++k)
            dbeta[static_cast<std::size_t>(k)] =
                sqdt * rng.normal(static_cast<std::uint64_t>(s), static_cast<std::uint32_t>(k));
        try {
            stepper.advance(u, dbeta, s);
        } catch (const DivergenceError&) {
            run.diverged = true;
            run.t_reached = dt * static_cast<double>(s);
            return run;
        }
        const long s1 = s + 1;
        if (s1 > burn_steps && (s1 - burn_steps) % stride_steps == 0) {
            run.times.push_back(dt * static_cast<double>(s1));
            run.samples.push_back(u);
        }
        run.t_reached = dt * static_cast<double>(s1);
    }
    return run;
}

double evaluate_functional(const std::string& name, const Field& u) {
    if (name == "L1_norm") return lp_norm(u, 1.0);
    if (name == "L2_norm") return lp_norm(u, 2.0);
    if (name == "Linf_norm") return lp_norm(u, kLpInf);
    if (name == "mean") return u.mean();
    if (name == "mode_1_amplitude") {
        const auto c = forward_transform(u);
        for (int j = 0; j < u.grid->n; ++j)
            if (u.grid->wavenumbers[static_cast<std::size_t>(j)] == 1)
                return 2.0 * std::abs(c.coeff[static_cast<std::size_t>(j)]);
    }
    throw ConfigError("evaluate_functional: unknown functional '" + name + "'");
}

EmpiricalMeasure empirical_measure(const std::vector<Field>& samples,
                                   const std::string& functional_name) {
    if (samples.empty()) throw InsufficientDataError("empirical_measure: no samples");
    EmpiricalMeasure m;
    m.functional_name = functional_name;
    m.samples.reserve(samples.size());
    for (const auto& s : samples) m.samples.push_back(evaluate_functional(functional_name, s));
    return m;
}

EmpiricalMeasure empirical_measure(const LongRun& run, const std::string& functional_name,
                                   double t_from, double t_to) {
    std::vector<Field> window;
    for (std::size_t i = 0; i < run.samples.size(); ++i)
        if (run.times[i] >= t_from && run.times[i] <= t_to) window.push_back(run.samples[i]);
    auto m = empirical_measure(window, functional_name);
    m.t_window = {t_from, t_to};
    return m;
}

double w1_distance(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2) {
    if (m1.functional_name != m2.functional_name)
        throw ConfigError("w1_distance: measures track different functionals");
    if (m1.samples.empty() || m2.samples.empty())
        throw InsufficientDataError("w1_distance: empty measure");

    std::vector<double> a = m1.samples, b = m2.samples;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t m = a.size(), n = b.size();

    // integrate |Qa - Qb| over the merged quantile partition
    double w1 = 0.0, q = 0.0;
    std::size_t i = 0, j = 0;
    while (i < m && j < n) {
        const double qa = static_cast<double>(i + 1) / static_cast<double>(m);
        const double qb = static_cast<double>(j + 1) / static_cast<double>(n);
        const double qn = std::min(qa, qb);
        w1 += (qn - q) * std::abs(a[i] - b[j]);
        q = qn;
        if (qa <= qn + 1e-18) ++i;
        if (qb <= qn + 1e-18) ++j;
    }
    return w1;
}

DistanceSeries two_start_coupling(const Field& u0_a, const Field& u0_b, const ModelSpec& model,
                                  const SolverConfig& config, double T) {
    if (std::abs(u0_a.mean() - u0_b.mean()) > 1e-12)
        throw PreconditionError(
            "two_start_coupling: initial means differ; the spatial mean is conserved along the "
            "coupling, so a mean gap can never decay");
    SolverConfig cfg = config;
    cfg.t_end = T;
    auto [ta, tb] = evolve_pair(u0_a, u0_b, model, cfg);
    DistanceSeries d;
    d.times = ta.times;
    d.values.reserve(ta.states.size());
    for (std::size_t s = 0; s < ta.states.size(); ++s) {
        Field diff = ta.states[s];
        for (int i = 0; i < diff.size(); ++i) diff[i] -= tb.states[s][i];
        d.values.push_back(lp_norm(diff, 1.0));
    }
    return d;
}

SobolevTrack sobolev_norm_track(const std::vector<Field>& samples, double r, double q) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("sobolev_norm_track: r must lie in (0,1)");
    if (samples.empty()) throw InsufficientDataError("sobolev_norm_track: no samples");

    SobolevTrack track;
    track.per_sample.reserve(samples.size());
    for (const auto& u : samples) {
        double value = 0.0;
        if (q == 2.0) {
            const auto c = forward_transform(u);
            double acc = 0.0;
            for (int j = 0; j < u.grid->n; ++j) {
                const int k = u.grid->wavenumbers[static_cast<std::size_t>(j)];
                if (k == 0) continue;
                acc += std::pow(kTwoPi * std::abs(k), 2.0 * r) *
                       std::norm(c.coeff[static_cast<std::size_t>(j)]);
            }
            value = std::sqrt(acc);
        } else if (q == 1.0) {
            // Slobodeckij double sum with periodic distance
            const int n = u.size();
            const double dx = u.grid->dx;
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j2 = 0; j2 < n; ++j2) {
                    if (i == j2) continue;
                    double d = std::abs(u.grid->cell_center(i) - u.grid->cell_center(j2));
                    d = std::min(d, 1.0 - d);
                    acc += std::abs(u[i] - u[j2]) / std::pow(d, 1.0 + r) * dx * dx;
                }
            value = acc;
        } else {
            throw std::domain_error("sobolev_norm_track: q must be 1 or 2");
        }
        track.per_sample.push_back(value);
    }
    track.average = pairwise_mean(track.per_sample);
    return track;
}

} // namespace fcsl
