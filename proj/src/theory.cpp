#include "fcsl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fcsl/reduce.hpp"

namespace fcsl {

namespace {

double l1_distance(const Field& a, const Field& b) {
    Field d = a;
    for (int i = 0; i < d.size(); ++i) d[i] -= b[i];
    return lp_norm(d, 1.0);
}

// Deterministic parallel map: one result slot per path, exceptions surfaced
// in path order.
template <typename T, typename Fn>
std::vector<T> parallel_paths(int n_paths, Fn&& fn) {
    std::vector<T> out(static_cast<std::size_t>(n_paths));
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < n_paths; ++p) {
        try {
            out[static_cast<std::size_t>(p)] = fn(p);
        } catch (...) {
            errs[static_cast<std::size_t>(p)] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

struct DistanceSeries {
    std::vector<double> times;
    std::vector<double> values;
};

} // namespace

CheckReport contraction_check(const Field& u0_a, const Field& u0_b, const ModelSpec& model,
                              const SolverConfig& config, int n_paths) {
    const bool pathwise = (model.noise.K == 0) || (model.noise.kind == NoiseKind::Additive);
    const double d0 = l1_distance(u0_a, u0_b);

    CheckReport rep;
    rep.n_paths = n_paths;

    // Resolve dt once so every path and both partners share the time grid.
    SolverConfig base = config;
    if (base.dt <= 0.0)
        base.dt = std::min(resolve_dt(u0_a, model, base), resolve_dt(u0_b, model, base));

    auto paths = parallel_paths<DistanceSeries>(n_paths, [&](int p) {
        SolverConfig c = base;
        c.path_index = static_cast<std::uint64_t>(p);
        auto [ta, tb] = evolve_pair(u0_a, u0_b, model, c);
        DistanceSeries d;
        d.times = ta.times;
        d.values.reserve(ta.states.size());
        for (std::size_t s = 0; s < ta.states.size(); ++s)
            d.values.push_back(l1_distance(ta.states[s], tb.states[s]));
        return d;
    });

    const std::size_t n_samples = paths.front().values.size();

    if (pathwise) {
        rep.name = "contraction_pathwise";
        rep.threshold = 1e-10;
        double worst = 0.0;
        std::vector<double> max_over_paths(n_samples, 0.0);
        for (const auto& pth : paths) {
            for (std::size_t s = 1; s < n_samples; ++s)
                worst = std::max(worst, pth.values[s] - pth.values[s - 1]);
            for (std::size_t s = 0; s < n_samples; ++s)
                max_over_paths[s] = std::max(max_over_paths[s], pth.values[s]);
        }
        rep.statistic = std::max(worst, 0.0);
        for (std::size_t s = 0; s < n_samples; ++s)
            rep.details.emplace_back(paths.front().times[s], max_over_paths[s]);
        rep.passed = rep.statistic <= rep.threshold;
        return rep;
    }

    rep.name = "contraction_expected";
    if (d0 <= 0.0)
        throw PreconditionError(
            "contraction_check: zero initial distance in expectation mode; use the pathwise "
            "identity check instead");
    double worst_ratio = 0.0;
    double stderr_at_worst = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        std::vector<double> ds(static_cast<std::size_t>(n_paths));
        for (int p = 0; p < n_paths; ++p)
            ds[static_cast<std::size_t>(p)] = paths[static_cast<std::size_t>(p)].values[s];
        const double mean = pairwise_mean(ds);
        double var = 0.0;
        for (double v : ds) var += (v - mean) * (v - mean);
        var /= std::max(n_paths - 1, 1);
        const double ratio = mean / d0 - 1.0;
        rep.details.emplace_back(paths.front().times[s], mean / d0);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            stderr_at_worst = std::sqrt(var / n_paths) / d0;
        }
    }
    rep.statistic = std::max(worst_ratio, 0.0);
    rep.threshold = 0.05 + 3.0 * stderr_at_worst;
    rep.passed = rep.statistic <= rep.threshold;
    return rep;
}

CheckReport lp_bound_check(const Field& u0, const ModelSpec& model, const SolverConfig& config,
                           double p, int n_paths) {
    if (!(p >= 2.0 && p <= 8.0)) throw std::domain_error("lp_bound_check: p must lie in [2,8]");
    if (config.tau <= 0.0) throw PreconditionError("lp_bound_check: needs a positive base tau");

    const std::vector<double> taus = {config.tau, config.tau / 2.0, config.tau / 4.0};

    // One dt for the whole ladder, binding at the largest tau.
    SolverConfig base = config;
    if (base.dt <= 0.0) base.dt = resolve_dt(u0, model, base);

    CheckReport rep;
    rep.name = "lp_bound_tau_uniform";
    rep.n_paths = n_paths;

    std::vector<double> stats;
    for (double tau : taus) {
        auto sups = parallel_paths<double>(n_paths, [&](int q) {
            SolverConfig c = base;
            c.tau = tau;
            c.path_index = static_cast<std::uint64_t>(q);
            auto traj = evolve(u0, model, c);
            double sup = 0.0;
            for (const auto& s : traj.states) sup = std::max(sup, std::pow(lp_norm(s, p), p));
            return sup;
        });
        stats.push_back(pairwise_mean(sups));
    }

    const double u0p = std::pow(lp_norm(u0, p), p);
    const double fitted_c = stats[0] / (1.0 + u0p);
    double spread = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        spread = std::max(spread, std::abs(stats[i] - stats[0]) / stats[0]);
        rep.details.emplace_back(taus[i], stats[i]);
    }
    rep.details.emplace_back(0.0, fitted_c); // fitted constant, tagged tau=0
    rep.statistic = spread;
    rep.threshold = 0.10;
    rep.passed = spread <= rep.threshold;
    return rep;
}

CheckReport mean_martingale_check(const Field& u0, const ModelSpec& model,
                                  const SolverConfig& config) {
    if (model.noise.K > 0 && model.noise.kind != NoiseKind::Additive)
        throw NotApplicableError("mean_martingale_check: requires additive noise");
    if (model.noise.K > 0 && !model.noise.cancellation)
        throw NotApplicableError("mean_martingale_check: requires cancellation noise");

    auto traj = evolve(u0, model, config);
    const double m0 = u0.mean();
    CheckReport rep;
    rep.name = "mean_conservation";
    rep.n_paths = 1;
    rep.threshold = 1e-10;
    double worst = 0.0;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const double drift = std::abs(traj.states[s].mean() - m0);
        worst = std::max(worst, drift);
        rep.details.emplace_back(traj.times[s], drift);
    }
    rep.statistic = worst;
    rep.passed = worst <= rep.threshold;
    return rep;
}

CheckReport viscosity_cauchy(const Field& u0, const ModelSpec& model,
                             const SolverConfig& base_config, const std::vector<double>& tau_ladder,
                             int n_paths) {
    if (tau_ladder.size() < 2)
        throw PreconditionError("viscosity_cauchy: ladder needs at least two levels");
    for (std::size_t i = 1; i < tau_ladder.size(); ++i)
        if (!(tau_ladder[i] < tau_ladder[i - 1]))
            throw PreconditionError("viscosity_cauchy: ladder must be strictly decreasing");

    // dt binds at the largest tau; a caller-fixed dt that conflicts is a
    // configuration error.
    SolverConfig base = base_config;
    base.tau = tau_ladder.front();
    const double dt_max = resolve_dt(u0, model, base);
    if (base.dt <= 0.0)
        base.dt = dt_max;
    else if (base.dt > dt_max)
        throw ConfigError("viscosity_cauchy: configured dt violates the CFL rule at tau_max");

    // runs[level][path], noise shared across levels through the path index
    std::vector<std::vector<Trajectory>> runs;
    for (double tau : tau_ladder) {
        runs.push_back(parallel_paths<Trajectory>(n_paths, [&](int p) {
            SolverConfig c = base;
            c.tau = tau;
            c.path_index = static_cast<std::uint64_t>(p);
            return evolve(u0, model, c);
        }));
    }

    CheckReport rep;
    rep.name = "viscosity_cauchy";
    rep.n_paths = n_paths;
    std::vector<double> dist;
    for (std::size_t lvl = 0; lvl + 1 < runs.size(); ++lvl) {
        const auto& a = runs[lvl];
        const auto& b = runs[lvl + 1];
        const std::size_t n_samples = a.front().states.size();
        double sup = 0.0;
        for (std::size_t s = 0; s < n_samples; ++s) {
            std::vector<double> ds(static_cast<std::size_t>(n_paths));
            for (int p = 0; p < n_paths; ++p)
                ds[static_cast<std::size_t>(p)] = l1_distance(
                    a[static_cast<std::size_t>(p)].states[s], b[static_cast<std::size_t>(p)].states[s]);
            sup = std::max(sup, pairwise_mean(ds));
        }
        dist.push_back(sup);
        rep.details.emplace_back(static_cast<double>(lvl), sup);
    }

    bool decreasing = true;
    for (std::size_t i = 1; i < dist.size(); ++i) decreasing = decreasing && (dist[i] < dist[i - 1]);
    rep.statistic = dist.back() / dist.front();
    rep.threshold = 0.5;
    rep.passed = decreasing && rep.statistic <= rep.threshold;
    return rep;
}

namespace {

// Adaptive Simpson with a divergence cap.
struct CappedSimpson {
    const std::function<double(double)>& g;
    double cap;
    bool diverged = false;
    long evals = 0;

    double recurse(double a, double m, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
        if (diverged) return whole;
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = g(lm), frm = g(rm);
        evals += 2;
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double refined = left + right;
        if (refined > cap || evals > 4000000) {
            diverged = true;
            return refined;
        }
        if (depth > 48 || std::abs(refined - whole) < 15.0 * tol)
            return refined + (refined - whole) / 15.0;
        return recurse(a, lm, m, fa, flm, fm, left, tol, depth + 1) +
               recurse(m, rm, b, fm, frm, fb, right, tol, depth + 1);
    }

    double run(double a, double b, double tol) {
        const double m = 0.5 * (a + b);
        const double fa = g(a), fm = g(m), fb = g(b);
        evals += 3;
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return recurse(a, m, b, fa, fm, fb, whole, tol, 0);
    }
};

// Whole-line integral of the NLD integrand for fixed (gamma, b, tau) through
// the substitution zeta = tan(theta); breakpoints at the resonance roots
// F'(zeta) + tau = 0 keep the adaptive rule honest on narrow Lorentzians.
double nld_line_integral(const ModelSpec& model, double gamma, double b, double tau,
                         std::pair<double, double> zeta_range, bool& diverged) {
    const auto& fp = model.flux.flux_prime;
    const auto& ap = model.diffusion.diffusion_prime;

    auto integrand = [&](double theta) {
        const double z = std::tan(theta);
        const double c = std::cos(theta);
        const double ab = ap(z) * b;
        const double num = gamma * (ab + gamma);
        const double f = fp(z) + tau;
        const double den = (gamma + ab) * (gamma + ab) + f * f;
        return num / den / (c * c);
    };

    // resonance roots inside the scan range via sign-change bisection
    std::vector<double> breaks;
    const int scan = 2048;
    const double lo = zeta_range.first, hi = zeta_range.second;
    const double pi2 = 0.5 * std::numbers::pi;
    double prev = fp(lo) + tau;
    for (int i = 1; i <= scan; ++i) {
        const double z = lo + (hi - lo) * i / scan;
        const double cur = fp(z) + tau;
        if ((prev <= 0.0 && cur >= 0.0) || (prev >= 0.0 && cur <= 0.0)) {
            double a = lo + (hi - lo) * (i - 1) / scan, c = z;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + c);
                if ((fp(a) + tau) * (fp(m) + tau) <= 0.0)
                    c = m;
                else
                    a = m;
            }
            const double root = 0.5 * (a + c);
            // bracket the Lorentzian geometrically so the adaptive rule
            // resolves it without deep recursion
            const double width = gamma + std::abs(ap(root)) * b;
            breaks.push_back(std::atan(root));
            for (double w = width; w < (hi - lo); w *= 8.0) {
                breaks.push_back(std::atan(root - w));
                breaks.push_back(std::atan(root + w));
            }
        }
        prev = cur;
    }
    breaks.push_back(std::atan(lo));
    breaks.push_back(std::atan(hi));
    breaks.push_back(-pi2 + 1e-9);
    breaks.push_back(pi2 - 1e-9);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    while (breaks.size() >= 2 && breaks.front() < -pi2 + 1e-9) breaks.erase(breaks.begin());
    while (breaks.size() >= 2 && breaks.back() > pi2 - 1e-9) breaks.pop_back();
    breaks.insert(breaks.begin(), -pi2 + 1e-9);
    breaks.push_back(pi2 - 1e-9);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] <= breaks[i]) continue;
        auto fn = std::function<double(double)>(integrand);
        CappedSimpson s{fn, 1e6};
        total += s.run(breaks[i], breaks[i + 1], 1e-12 + 1e-10 * gamma);
        if (s.diverged || total > 1e6) {
            diverged = true;
            return kNldDiverged;
        }
    }
    return total;
}

double nld_sup_tau(const ModelSpec& model, double gamma, double b,
                   std::pair<double, double> zeta_range, const std::vector<double>& tau_grid,
                   bool& diverged) {
    double best = 0.0, best_tau = tau_grid.front();
    for (double tau : tau_grid) {
        const double v = nld_line_integral(model, gamma, b, tau, zeta_range, diverged);
        if (diverged) return kNldDiverged;
        if (v > best) {
            best = v;
            best_tau = tau;
        }
    }
    // local golden-section refinement around the best grid point
    const double h = tau_grid.size() > 1 ? (tau_grid[1] - tau_grid[0]) : 1.0;
    double a = best_tau - h, c = best_tau + h;
    const double gr = 0.6180339887498949;
    double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
    double f1 = nld_line_integral(model, gamma, b, x1, zeta_range, diverged);
    if (diverged) return kNldDiverged;
    double f2 = nld_line_integral(model, gamma, b, x2, zeta_range, diverged);
    if (diverged) return kNldDiverged;
    for (int it = 0; it < 30; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (c - a);
            f2 = nld_line_integral(model, gamma, b, x2, zeta_range, diverged);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - gr * (c - a);
            f1 = nld_line_integral(model, gamma, b, x1, zeta_range, diverged);
        }
        if (diverged) return kNldDiverged;
    }
    return std::max({best, f1, f2});
}

} // namespace

std::vector<double> default_tau_grid(const ModelSpec& model, std::pair<double, double> zeta_range) {
    // Outside |tau| <= max|F'| + 1 the denominator is uniformly large and the
    // integrand dominated by the on-grid values; the endpoints are included.
    const double fmax = model.flux.max_flux_prime(zeta_range.first, zeta_range.second);
    const double R = fmax + 1.0;
    std::vector<double> grid;
    const int m = 129;
    for (int i = 0; i < m; ++i) grid.push_back(-R + 2.0 * R * i / (m - 1));
    return grid;
}

std::vector<int> default_k_set() {
    std::vector<int> ks;
    for (int k = 1; k <= 64; ++k) ks.push_back(k);
    return ks;
}

double nld_eta(const ModelSpec& model, double gamma, std::pair<double, double> zeta_range,
               const std::vector<double>& tau_grid, const std::vector<int>& k_set) {
    if (!(gamma > 0.0)) throw std::domain_error("nld_eta: gamma must be positive");
    if (!(zeta_range.second > zeta_range.first))
        throw PreconditionError("nld_eta: empty zeta range");

    // b values: |k|^(2a-1) for the scan set plus the k -> infinity limit
    // b -> 0 (alpha < 1/2), which also covers degenerate diffusion exactly.
    std::vector<double> bs{0.0};
    for (int k : k_set) bs.push_back(std::pow(std::abs(k), 2.0 * model.alpha.alpha - 1.0));

    const int nb = static_cast<int>(bs.size());
    std::vector<double> vals(static_cast<std::size_t>(nb), 0.0);
    std::vector<char> divs(static_cast<std::size_t>(nb), 0);
#pragma omp parallel for schedule(dynamic)
    for (int bi = 0; bi < nb; ++bi) {
        bool diverged = false;
        vals[static_cast<std::size_t>(bi)] =
            nld_sup_tau(model, gamma, bs[static_cast<std::size_t>(bi)], zeta_range, tau_grid, diverged);
        divs[static_cast<std::size_t>(bi)] = diverged ? 1 : 0;
    }
    double sup = 0.0;
    for (int bi = 0; bi < nb; ++bi) {
        if (divs[static_cast<std::size_t>(bi)]) return kNldDiverged;
        sup = std::max(sup, vals[static_cast<std::size_t>(bi)]);
    }
    return sup;
}

NldResult nld_exponent_fit(const ModelSpec& model, const std::vector<double>& gamma_ladder) {
    if (gamma_ladder.size() < 3)
        throw InsufficientDataError("nld_exponent_fit: need at least three ladder points");
    const auto [mn, mx] = std::minmax_element(gamma_ladder.begin(), gamma_ladder.end());
    if (std::log10(*mx / *mn) < 2.0 - 1e-9)
        throw PreconditionError("nld_exponent_fit: ladder must span at least two decades");

    NldResult res;
    res.gamma_ladder = gamma_ladder;
    const std::pair<double, double> range{-64.0, 64.0};
    const auto tau_grid = default_tau_grid(model, range);
    const auto k_set = default_k_set();
    if (model.alpha.alpha > 0.5)
        res.k_scan_note = "k scan truncated at 64; |k|^(2a-1) grows unboundedly for alpha > 1/2";

    for (double gamma : gamma_ladder) {
        const double eta = nld_eta(model, gamma, range, tau_grid, k_set);
        res.eta_values.push_back(eta);
        if (!std::isfinite(eta)) res.degenerate = true;
    }
    if (res.degenerate) return res;

    int finite = 0;
    for (double e : res.eta_values)
        if (std::isfinite(e) && e > 0.0) ++finite;
    if (finite < 3) throw InsufficientDataError("nld_exponent_fit: fewer than three finite points");

    // least squares of log eta against log gamma
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < gamma_ladder.size(); ++i) {
        const double x = std::log(gamma_ladder[i]);
        const double y = std::log(res.eta_values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(gamma_ladder.size());
    res.fitted_s = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    res.fitted_C = std::exp((sy - res.fitted_s * sx) / n);
    return res;
}

} // namespace fcsl
