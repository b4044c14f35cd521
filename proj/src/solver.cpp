#include "fcsl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fcsl/operators.hpp"

namespace fcsl {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kDivergenceCap = 1e6;

double noise_scale(const ModelSpec& model, double t_end) {
    // sqrt of the total mode energy accumulated over the horizon, with the
    // multiplicative shape bounded by its value near u = 1. The horizon is
    // capped: dissipation keeps the stationary amplitude of order one, and
    // the per-step CFL recheck still catches any excursion past the margin.
    double c0 = 0.0;
    for (int k = 0; k < model.noise.K; ++k) {
        double sup = 0.0;
        for (int i = 0; i < 64; ++i) {
            const double x = (i + 0.5) / 64.0;
            sup = std::max(sup, std::abs(model.noise.h_k(k, x, 1.0)));
        }
        c0 += sup * sup;
    }
    return std::sqrt(c0 * std::clamp(t_end, 1.0, 10.0));
}

} // namespace

double SolverConfig::cfl_dt(const ModelSpec& model, const TorusGrid& grid, double lo,
                            double hi) const {
    const double dx = grid.dx;
    double bound = std::numeric_limits<double>::infinity();

    const double fmax = model.flux.max_flux_prime(lo, hi);
    if (fmax > 0.0) bound = std::min(bound, dx / fmax);

    const double lip = model.diffusion.lipschitz_const;
    if (lip > 0.0) {
        double sum = 0.0;
        for (int k : grid.wavenumbers)
            if (k != 0) sum += std::pow(kTwoPi * std::abs(k), 2.0 * model.alpha.alpha);
        bound = std::min(bound, 1.0 / (lip * dx * sum));
    }
    if (tau > 0.0) bound = std::min(bound, dx * dx / (2.0 * tau));
    return cfl_safety * bound;
}

double resolve_dt(const Field& u0, const ModelSpec& model, const SolverConfig& config) {
    const double margin = 3.0 * noise_scale(model, config.t_end);
    const double amp = lp_norm(u0, kLpInf) + margin;
    const double dt = config.cfl_dt(model, *u0.grid, -amp, amp);
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("resolve_dt: CFL rule produced a non-positive time step");
    return dt;
}

Stepper::Stepper(GridPtr grid, const ModelSpec& model, const SolverConfig& config)
    : grid_(std::move(grid)), model_(&model), config_(config) {
    if (config_.dt <= 0.0)
        throw ConfigError("Stepper: dt must be resolved and positive");
    if (config_.t_end < 0.0)
        throw ConfigError("Stepper: t_end must be nonnegative");
    if (!(config_.cfl_safety > 0.0 && config_.cfl_safety <= 1.0))
        throw ConfigError("Stepper: cfl_safety must lie in (0,1]");

    // Land the final step exactly on t_end by shrinking dt if needed.
    if (config_.t_end > 0.0) {
        n_steps_ = static_cast<long>(std::ceil(config_.t_end / config_.dt - 1e-9));
        n_steps_ = std::max<long>(n_steps_, 1);
        dt_ = config_.t_end / static_cast<double>(n_steps_);
    } else {
        n_steps_ = 0;
        dt_ = config_.dt;
    }

    frac_sym_ = frac_symbol(*grid_, model.alpha);
    frac_diag_ = 0.0;
    for (double m : frac_sym_) frac_diag_ += m;
    frac_diag_ *= grid_->dx;

    resolvent_sym_.resize(static_cast<std::size_t>(grid_->n));
    for (int j = 0; j < grid_->n; ++j) {
        const double w = kTwoPi * grid_->wavenumbers[static_cast<std::size_t>(j)];
        resolvent_sym_[static_cast<std::size_t>(j)] = 1.0 / (1.0 + dt_ * config_.tau * w * w);
    }
}

void Stepper::advance(Field& u, std::span<const double> dbeta, long step_index) {
    const int n = grid_->n;
    const double dx = grid_->dx;

    double lo = u[0], hi = u[0];
    for (double v : u.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double allowed = std::numeric_limits<double>::infinity();
    const double fmax = model_->flux.max_flux_prime(lo, hi);
    if (fmax > 0.0) allowed = std::min(allowed, dx / fmax);
    if (model_->diffusion.lipschitz_const > 0.0)
        allowed = std::min(allowed, 1.0 / (model_->diffusion.lipschitz_const * frac_diag_));
    if (config_.tau > 0.0) allowed = std::min(allowed, dx * dx / (2.0 * config_.tau));
    allowed *= config_.cfl_safety;
    if (dt_ > allowed * (1.0 + 1e-12))
        throw StabilityError("step " + std::to_string(step_index) + ": dt=" + std::to_string(dt_) +
                             " exceeds CFL bound " + std::to_string(allowed) +
                             " on range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");

    // Explicit part: conservative Engquist-Osher divergence plus spectral
    // fractional diffusion of A(u).
    std::vector<double> iface(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1 == n) ? 0 : i + 1;
        iface[static_cast<std::size_t>(i)] =
            model_->flux.eo_plus(u[i]) + model_->flux.eo_minus(u[ip]);
    }

    Field work(u.grid);
    if (model_->diffusion.lipschitz_const > 0.0) {
        Field au(u.grid);
        for (int i = 0; i < n; ++i) au[i] = model_->diffusion.diffusion(u[i]);
        work = apply_multiplier(au, frac_sym_);
    }

    Field next(u.grid);
    for (int i = 0; i < n; ++i) {
        const int im = (i == 0) ? n - 1 : i - 1;
        const double div =
            (iface[static_cast<std::size_t>(i)] - iface[static_cast<std::size_t>(im)]) / dx;
        next[i] = u[i] - dt_ * (div + work[i]);
    }

    if (config_.tau > 0.0) next = apply_multiplier(next, resolvent_sym_);

    if (model_->noise.K > 0) {
        const Field noise = noise_field(model_->noise, next, dbeta);
        for (int i = 0; i < n; ++i) next[i] += noise[i];
    }

    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(next[i]) || std::abs(next[i]) > kDivergenceCap)
            throw DivergenceError("path diverged at step " + std::to_string(step_index), step_index);
    }
    u = std::move(next);
}

namespace {

Trajectory evolve_impl(const Field& u0, const ModelSpec& model, const SolverConfig& config_in,
                       const std::vector<std::vector<double>>* replay_record) {
    if (!u0.all_finite()) throw PreconditionError("evolve: initial data has non-finite values");
    if (u0.grid->n != config_in.grid_n)
        throw ShapeError("evolve: config grid_n does not match the initial field");
    if (!model.alpha_in_wellposed_regime())
        throw ConfigError("evolve: alpha outside the well-posed regime for this noise family");

    SolverConfig config = config_in;
    if (config.dt <= 0.0) config.dt = resolve_dt(u0, model, config);

    Trajectory traj;
    traj.config = config;
    traj.model = model;
    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    if (config.t_end <= 0.0) return traj;

    Stepper stepper(u0.grid, model, config);
    const long steps = stepper.n_steps();
    if (replay_record && static_cast<long>(replay_record->size()) != steps)
        throw InsufficientDataError("replay: noise record length does not match step count");

    PathRng rng(config.seed, config.path_index);
    const int stride = std::max(config.sample_stride, 1);
    const double sqdt = std::sqrt(stepper.dt());

    Field u = u0;
    traj.noise_record.reserve(static_cast<std::size_t>(steps));
    for (long s = 0; s < steps; ++s) {
        std::vector<double> dbeta;
        if (replay_record) {
            dbeta = (*replay_record)[static_cast<std::size_t>(s)];
        } else {
            dbeta.resize(static_cast<std::size_t>(model.noise.K));
            for (int k = 0; k < model.noise.K; ++k)
                dbeta[static_cast<std::size_t>(k)] =
                    sqdt * rng.normal(static_cast<std::uint64_t>(s), static_cast<std::uint32_t>(k));
        }
        stepper.advance(u, dbeta, s);
        traj.noise_record.push_back(std::move(dbeta));
        if ((s + 1) % stride == 0 || s + 1 == steps) {
            traj.times.push_back(stepper.dt() * static_cast<double>(s + 1));
            traj.states.push_back(u);
        }
    }
    return traj;
}

} // namespace

Field step(const Field& u, const ModelSpec& model, const SolverConfig& config,
           std::span<const double> dbeta) {
    SolverConfig c = config;
    if (c.dt <= 0.0) throw ConfigError("step: dt must be positive");
    c.t_end = c.dt; // single-step contract
    Stepper st(u.grid, model, c);
    Field out = u;
    st.advance(out, dbeta, 0);
    return out;
}

Trajectory evolve(const Field& u0, const ModelSpec& model, const SolverConfig& config) {
    return evolve_impl(u0, model, config, nullptr);
}

Trajectory replay(const Field& u0, const ModelSpec& model, const SolverConfig& config,
                  const std::vector<std::vector<double>>& noise_record) {
    return evolve_impl(u0, model, config, &noise_record);
}

std::pair<Trajectory, Trajectory> evolve_pair(const Field& u0_a, const Field& u0_b,
                                              const ModelSpec& model, const SolverConfig& config) {
    // Resolve dt once over the union of both ranges so the two paths share
    // the same time grid; the counter-based RNG then guarantees identical
    // realized increments without any cross-path communication.
    SolverConfig c = config;
    if (c.dt <= 0.0) c.dt = std::min(resolve_dt(u0_a, model, c), resolve_dt(u0_b, model, c));
    return {evolve(u0_a, model, c), evolve(u0_b, model, c)};
}

std::vector<Trajectory> run_ensemble(int n_paths, const std::function<Trajectory(int)>& per_path) {
    std::vector<Trajectory> out(static_cast<std::size_t>(n_paths));
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < n_paths; ++p) {
        try {
            out[static_cast<std::size_t>(p)] = per_path(p);
        } catch (...) {
            errs[static_cast<std::size_t>(p)] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<Trajectory> run_ensemble_serial(int n_paths,
                                            const std::function<Trajectory(int)>& per_path) {
    std::vector<Trajectory> out(static_cast<std::size_t>(n_paths));
    for (int p = 0; p < n_paths; ++p) out[static_cast<std::size_t>(p)] = per_path(p);
    return out;
}

} // namespace fcsl
