#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fcsl/theory.hpp"

using namespace fcsl;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("contraction: identical starts give a zero statistic") {
    auto g = make_grid(32);
    auto model = builtin_model("burgers_frac");
    model.noise = additive_noise("sin", 4, 2.0, 0.4);
    SolverConfig cfg;
    cfg.grid_n = 32;
    cfg.t_end = 0.2;
    cfg.sample_stride = 4;
    Field u0 = sample_field(g, [](double x) { return 0.3 * std::sin(kTwoPi * x); });
    auto rep = contraction_check(u0, u0, model, cfg, 4);
    CHECK(rep.passed);
    CHECK(rep.statistic == 0.0);
}

TEST_CASE("contraction: coupled constants keep their distance and pass at equality") {
    auto g = make_grid(32);
    auto model = builtin_model("burgers_frac");
    model.noise = additive_noise("sin", 4, 2.0, 0.4);
    SolverConfig cfg;
    cfg.grid_n = 32;
    cfg.t_end = 0.2;
    cfg.sample_stride = 4;
    Field one(g), zero(g);
    for (auto& v : one.values) v = 1.0;
    auto rep = contraction_check(one, zero, model, cfg, 4);
    CHECK(rep.passed);
    for (const auto& [t, d] : rep.details) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("contraction: additive pathwise mode decreases strictly for rough data") {
    auto g = make_grid(32);
    auto model = builtin_model("burgers_frac");
    model.alpha = FractionalOrder(0.3);
    model.noise = additive_noise("sin", 4, 2.0, 0.4);
    SolverConfig cfg;
    cfg.grid_n = 32;
    cfg.t_end = 0.5;
    cfg.sample_stride = 8;
    cfg.seed = 7;
    Field u0a = sample_field(g, [](double x) { return 0.5 * std::sin(kTwoPi * x); });
    Field u0b = u0a;
    for (int i = 0; i < g->n; ++i) u0b[i] += 0.2 * std::sin(2.0 * kTwoPi * g->cell_center(i));
    auto rep = contraction_check(u0a, u0b, model, cfg, 8);
    CHECK(rep.passed);
    CHECK(rep.statistic <= 1e-10);
    CHECK(rep.details.back().second < rep.details.front().second); // strictly shrinks
}

TEST_CASE("contraction: expectation mode with multiplicative noise") {
    auto g = make_grid(64);
    auto model = builtin_model("burgers_frac");
    model.alpha = FractionalOrder(0.3);
    model.noise = multiplicative_noise(4, 2.0, 1.0);
    SolverConfig cfg;
    cfg.grid_n = 64;
    cfg.t_end = 0.5;
    cfg.sample_stride = 8;
    cfg.seed = 11;
    Field u0a = sample_field(g, [](double x) { return 0.6 * std::sin(kTwoPi * x); });
    Field u0b = u0a;
    for (int i = 0; i < g->n; ++i) u0b[i] += 0.2 * std::sin(2.0 * kTwoPi * g->cell_center(i));
    auto rep = contraction_check(u0a, u0b, model, cfg, 16);
    CHECK(rep.name == "contraction_expected");
    CHECK(rep.passed);

    CHECK_THROWS_AS(contraction_check(u0a, u0a, model, cfg, 4), PreconditionError);
}

TEST_CASE("contraction is symmetric in its arguments") {
    auto g = make_grid(32);
    auto model = builtin_model("burgers_frac");
    model.noise = additive_noise("sin", 4, 2.0, 0.4);
    SolverConfig cfg;
    cfg.grid_n = 32;
    cfg.t_end = 0.2;
    cfg.sample_stride = 4;
    Field u0a = sample_field(g, [](double x) { return 0.4 * std::sin(kTwoPi * x); });
    Field u0b = sample_field(g, [](double x) { return 0.3 * std::cos(kTwoPi * x); });
    auto r1 = contraction_check(u0a, u0b, model, cfg, 4);
    auto r2 = contraction_check(u0b, u0a, model, cfg, 4);
    CHECK(r1.statistic == r2.statistic);
}

TEST_CASE("lp bound: no-noise decay passes with the max principle") {
    auto g = make_grid(64);
    auto model = builtin_model("burgers_frac");
    model.noise = NoiseSpec{};
    SolverConfig cfg;
    cfg.grid_n = 64;
    cfg.t_end = 0.5;
    cfg.tau = 1e-2;
    cfg.sample_stride = 8;
    Field u0 = sample_field(g, [](double x) { return 0.5 * std::sin(kTwoPi * x); });
    auto rep = lp_bound_check(u0, model, cfg, 2.0, 2);
    CHECK(rep.passed);

    CHECK_THROWS_AS(lp_bound_check(u0, model, cfg, 1.5, 2), std::domain_error);
}

TEST_CASE("lp bound: tau-uniformity with additive noise") {
    auto g = make_grid(64);
    auto model = builtin_model("burgers_frac");
    model.alpha = FractionalOrder(0.3);
    model.noise = additive_noise("sin", 4, 2.0, 0.4);
    SolverConfig cfg;
    cfg.grid_n = 64;
    cfg.t_end = 0.5;
    cfg.tau = 1e-2;
    cfg.sample_stride = 8;
    cfg.seed = 21;
    Field u0 = sample_field(g, [](double x) { return 0.5 * std::sin(kTwoPi * x); });
    auto rep = lp_bound_check(u0, model, cfg, 2.0, 8);
    INFO("spread = ", rep.statistic);
    CHECK(rep.passed);
}

TEST_CASE("mean conservation check") {
    auto g = make_grid(32);
    auto model = builtin_model("burgers_frac");
    model.noise = additive_noise("mixed", 8, 2.0, 0.5);
    SolverConfig cfg;
    cfg.grid_n = 32;
    cfg.t_end = 0.5;
    cfg.sample_stride = 50;
    cfg.seed = 3;

    Field u0 = sample_field(g, [](double x) { return std::sin(kTwoPi * x); });
    auto rep = mean_martingale_check(u0, model, cfg);
    CHECK(rep.passed);

    Field shifted = u0;
    for (auto& v : shifted.values) v += 0.7;
    auto rep2 = mean_martingale_check(shifted, model, cfg);
    CHECK(rep2.passed);

    auto mult = model;
    mult.noise = multiplicative_noise(2, 2.0, 0.5);
    CHECK_THROWS_AS(mean_martingale_check(u0, mult, cfg), NotApplicableError);
}

TEST_CASE("viscosity ladder on one Fourier mode matches the closed form") {
    // linear advection with zero diffusion: each step multiplies mode 1 by
    // the shared upwind symbol and the tau-dependent resolvent, so the
    // successive-distance ratios have an exact discrete prediction.
    auto model = builtin_model("linear_advection");
    model.noise = NoiseSpec{};
    const int n = 64;
    auto g = make_grid(n);
    SolverConfig cfg;
    cfg.grid_n = n;
    cfg.t_end = 1.0;
    cfg.sample_stride = 1 << 20; // endpoint only; the gap grows monotonically
    Field u0 = sample_field(g, [](double x) { return std::cos(kTwoPi * x); });

    const std::vector<double> ladder = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    auto rep = viscosity_cauchy(u0, model, cfg, ladder, 1);
    REQUIRE(rep.details.size() == 3);

    // reproduce the solver's dt resolution at tau_max
    SolverConfig probe = cfg;
    probe.tau = ladder.front();
    const double dt_req = resolve_dt(u0, model, probe);
    const long steps = static_cast<long>(std::ceil(cfg.t_end / dt_req - 1e-9));
    const double dt = cfg.t_end / static_cast<double>(steps);
    auto resolvent_pow = [&](double tau) {
        return std::pow(1.0 / (1.0 + dt * tau * kTwoPi * kTwoPi), static_cast<double>(steps));
    };
    for (std::size_t i = 0; i + 2 < ladder.size(); ++i) {
        const double pred = (resolvent_pow(ladder[i]) - resolvent_pow(ladder[i + 1])) /
                            (resolvent_pow(ladder[i + 1]) - resolvent_pow(ladder[i + 2]));
        const double measured = rep.details[i].second / rep.details[i + 1].second;
        CHECK(measured == doctest::Approx(pred).epsilon(1e-6));
        CHECK(pred == doctest::Approx(2.0).epsilon(0.15)); // ~2 per tau halving
    }
    CHECK(rep.passed);
}

TEST_CASE("viscosity ladder: equal levels are rejected, decreasing ladder contracts") {
    auto g = make_grid(64);
    auto model = builtin_model("burgers_frac");
    model.alpha = FractionalOrder(0.3);
    model.noise = additive_noise("sin", 4, 2.0, 0.3);
    SolverConfig cfg;
    cfg.grid_n = 64;
    cfg.t_end = 0.5;
    cfg.sample_stride = 8;
    cfg.seed = 9;
    Field u0 = sample_field(g, [](double x) { return 0.5 * std::sin(kTwoPi * x); });

    CHECK_THROWS_AS(viscosity_cauchy(u0, model, cfg, {1e-2, 1e-2}, 2), PreconditionError);

    auto rep = viscosity_cauchy(u0, model, cfg, {1e-2, 5e-3, 2.5e-3, 1.25e-3}, 4);
    INFO("ratio = ", rep.statistic);
    CHECK(rep.passed);

    SolverConfig bad = cfg;
    bad.dt = 1.0;
    CHECK_THROWS_AS(viscosity_cauchy(u0, model, bad, {1e-2, 5e-3}, 2), ConfigError);
}

TEST_CASE("nld closed form: burgers gives pi*gamma for every gamma") {
    auto model = builtin_model("burgers_frac");
    const auto range = std::make_pair(-64.0, 64.0);
    const auto taus = default_tau_grid(model, range);
    const std::vector<int> ks = {1, 2, 8, 64};
    for (double gamma : {1e-1, 1e-2, 1e-3}) {
        const double eta = nld_eta(model, gamma, range, taus, ks);
        CHECK(eta == doctest::Approx(std::numbers::pi * gamma).epsilon(1e-6));
    }
}

TEST_CASE("nld with zero diffusion but genuinely nonlinear flux still gives pi*gamma") {
    auto model = builtin_model("burgers_frac");
    model.diffusion.diffusion = [](double) { return 0.0; };
    model.diffusion.diffusion_prime = [](double) { return 0.0; };
    model.diffusion.lipschitz_const = 0.0;
    const auto range = std::make_pair(-64.0, 64.0);
    const double eta = nld_eta(model, 1e-2, range, default_tau_grid(model, range), {1});
    CHECK(eta == doctest::Approx(std::numbers::pi * 1e-2).epsilon(1e-6));
}

TEST_CASE("nld divergence: affine flux with no diffusion") {
    auto model = builtin_model("linear_advection");
    const auto range = std::make_pair(-32.0, 32.0);
    const auto taus = default_tau_grid(model, range);
    for (double gamma : {1e-1, 1e-2, 1e-3}) {
        const double eta = nld_eta(model, gamma, range, taus, {1, 4});
        CHECK(eta == kNldDiverged);
    }
}

TEST_CASE("nld exponent fit: burgers s=1, C=pi; advection degenerate") {
    auto burgers = builtin_model("burgers_frac");
    auto res = nld_exponent_fit(burgers, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
    CHECK_FALSE(res.degenerate);
    CHECK(res.fitted_s == doctest::Approx(1.0).epsilon(0.02));
    CHECK(res.fitted_C == doctest::Approx(std::numbers::pi).epsilon(0.02));

    auto adv = builtin_model("linear_advection");
    auto res2 = nld_exponent_fit(adv, {1e-1, 1e-2, 1e-3});
    CHECK(res2.degenerate);

    CHECK_THROWS_AS(nld_exponent_fit(burgers, {1e-1, 1e-2}), InsufficientDataError);
    CHECK_THROWS_AS(nld_exponent_fit(burgers, {1e-1, 5e-2, 2e-2}), PreconditionError);
}

TEST_CASE("nld on the degenerate porous model: finite with s in (0, 1.05]") {
    auto porous = builtin_model("degenerate_porous");
    auto res = nld_exponent_fit(porous, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
    CHECK_FALSE(res.degenerate);
    for (double e : res.eta_values) CHECK(std::isfinite(e));
    CHECK(res.fitted_s > 0.0);
    CHECK(res.fitted_s <= 1.05);
}

TEST_CASE("nld properties: monotone in gamma, invariant under constant flux shifts") {
    auto model = builtin_model("burgers_frac");
    const auto range = std::make_pair(-64.0, 64.0);
    const auto taus = default_tau_grid(model, range);
    double prev = 0.0;
    for (double gamma : {1e-3, 1e-2, 1e-1}) {
        const double eta = nld_eta(model, gamma, range, taus, {1, 8});
        CHECK(eta >= prev);
        prev = eta;
    }

    auto shifted = model;
    shifted.flux.flux = [](double z) { return 0.5 * z * z + 5.0 * z; };
    shifted.flux.flux_prime = [](double z) { return z + 5.0; };
    const auto taus2 = default_tau_grid(shifted, range);
    const double e1 = nld_eta(model, 1e-2, range, taus, {1});
    const double e2 = nld_eta(shifted, 1e-2, range, taus2, {1});
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-6));
}
