#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fcsl/kinetic.hpp"
#include "fcsl/operators.hpp"

using namespace fcsl;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("zeta grid construction") {
    auto z = make_zeta_grid(-2.0, 2.0, 64);
    CHECK(z.dzeta == doctest::Approx(4.0 / 64));
    CHECK_THROWS_AS(make_zeta_grid(1.0, -1.0, 64), ConfigError);
    CHECK_THROWS_AS(make_zeta_grid(-1.0, 1.0, 8), ConfigError);
}

TEST_CASE("kinetic function of the zero field") {
    auto g = make_grid(16);
    Field u(g);
    auto z = make_zeta_grid(-1.0, 1.0, 32);
    auto f = kinetic_function(u, z);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 32; ++j) {
            const double zeta = z.level_center(j);
            CHECK(f.at(i, j) == ((zeta < 0.0) ? 1.0 : 0.0));
        }
}

TEST_CASE("kinetic function reconstructs the field and is monotone in zeta") {
    auto g = make_grid(32);
    Field u = sample_field(g, [](double x) { return std::sin(kTwoPi * x); });
    auto z = make_zeta_grid(-1.5, 1.5, 256);
    auto f = kinetic_function(u, z);
    for (int i = 0; i < g->n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < z.m_levels; ++j) {
            const double ref = (0.0 > z.level_center(j)) ? 1.0 : 0.0;
            acc += (f.at(i, j) - ref) * z.dzeta;
            if (j > 0) CHECK(f.at(i, j) <= f.at(i, j - 1)); // non-increasing in zeta
            CHECK((f.at(i, j) == 0.0 || f.at(i, j) == 1.0));
        }
        CHECK(std::abs(acc - u[i]) <= z.dzeta);
    }
    // zeta = 0 slice is the indicator of {u > 0}
    int j0 = static_cast<int>((0.0 - z.zeta_min) / z.dzeta);
    for (int i = 0; i < g->n; ++i)
        CHECK(f.at(i, j0) == ((u[i] > z.level_center(j0)) ? 1.0 : 0.0));

    Field big(g);
    for (auto& v : big.values) v = 9.0;
    CHECK_THROWS_AS(kinetic_function(big, z), std::domain_error);
}

TEST_CASE("parabolic defect vanishes for constants and zero diffusion") {
    auto g = make_grid(32);
    auto model = builtin_model("burgers_frac");
    auto z = make_zeta_grid(-2.0, 2.0, 64);

    Field c(g);
    for (auto& v : c.values) v = 0.7;
    auto d = parabolic_defect(c, model, z, 8.0, 2048);
    for (double v : d.v) CHECK(v == 0.0);

    auto adv = builtin_model("linear_advection"); // A == 0
    Field u = sample_field(g, [](double x) { return std::sin(kTwoPi * x); });
    auto d2 = parabolic_defect(u, adv, z, 8.0, 2048);
    for (double v : d2.v) CHECK(v == 0.0);
}

TEST_CASE("parabolic defect on a smoothed step: localization and oracle total") {
    auto g = make_grid(32);
    auto model = builtin_model("burgers_frac");
    model.alpha = FractionalOrder(0.3);
    // smoothed sign-like step
    Field u = sample_field(g, [](double x) { return std::tanh(8.0 * std::sin(kTwoPi * x)); });
    auto z = make_zeta_grid(-1.5, 1.5, 128);
    auto d = parabolic_defect(u, model, z, 8.0, 2048);

    double umin = 2.0, umax = -2.0;
    for (double v : u.values) {
        umin = std::min(umin, v);
        umax = std::max(umax, v);
    }
    double total = 0.0;
    for (int i = 0; i < d.nx; ++i)
        for (int j = 0; j < d.nz; ++j) {
            CHECK(d.at(i, j) >= 0.0);
            const double zeta = z.level_center(j);
            if (zeta < umin || zeta > umax) CHECK(d.at(i, j) == 0.0);
            total += d.at(i, j) * g->dx * z.dzeta;
        }
    CHECK(total > 0.0);

    // Brute-force oracle: independent image-summed kernel masses, and the
    // closed-form zeta integral (b-a)^2/2 for A = identity.
    const double C = frac_kernel_constant(0.3);
    const double p = 1.6; // 1 + 2a
    std::vector<double> wtest(static_cast<std::size_t>(g->n), 0.0);
    for (int dd = 1; dd < g->n; ++dd) {
        double sum = 0.0;
        for (int m = -20000; m <= 20000; ++m) {
            const double lo = (dd - 0.5 + static_cast<double>(m) * g->n) * g->dx;
            const double hi = (dd + 0.5 + static_cast<double>(m) * g->n) * g->dx;
            // 16-point midpoint quadrature of |z|^-p over the interval
            double acc = 0.0;
            for (int q = 0; q < 16; ++q) {
                const double zq = lo + (hi - lo) * (q + 0.5) / 16.0;
                acc += std::pow(std::abs(zq), -p) * (hi - lo) / 16.0;
            }
            sum += acc;
        }
        wtest[static_cast<std::size_t>(dd)] = C * sum;
    }
    double oracle = 0.0;
    for (int i = 0; i < g->n; ++i)
        for (int dd = 1; dd < g->n; ++dd) {
            const int j = (i + dd) % g->n;
            const double diff = u[j] - u[i];
            oracle += wtest[static_cast<std::size_t>(dd)] * 0.5 * diff * diff * g->dx;
        }
    CHECK(total == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("defect estimate: tail decay and monotonicity") {
    auto g = make_grid(32);
    auto model = builtin_model("degenerate_porous");
    model.noise = additive_noise("sin", 4, 2.0, 0.4);
    SolverConfig cfg;
    cfg.grid_n = 32;
    cfg.t_end = 0.2;
    cfg.sample_stride = 4;
    cfg.seed = 17;
    Field u0 = sample_field(g, [](double x) { return 0.8 * std::sin(kTwoPi * x); });
    auto traj = evolve(u0, model, cfg);

    double sup = 0.0;
    for (const auto& s : traj.states) sup = std::max(sup, lp_norm(s, kLpInf));
    auto z = make_zeta_grid(-sup - 1.0, sup + 1.0, 64);
    auto est = estimate_defect(traj, model, z, 8.0, 2048);

    const double total = est.total_mass();
    CHECK(total > 0.0);
    CHECK(measure_tail(est, 0.0) == doctest::Approx(total).epsilon(1e-12));
    double prev = total;
    for (double L : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
        const double tail = measure_tail(est, L);
        CHECK(tail <= prev + 1e-15);
        CHECK(tail >= 0.0);
        prev = tail;
    }
    CHECK(measure_tail(est, sup + 0.5) == 0.0);
}

TEST_CASE("kinetic residual is machine-zero on the zero field") {
    auto g = make_grid(64);
    auto model = builtin_model("burgers_frac");
    model.noise = NoiseSpec{};
    SolverConfig cfg;
    cfg.grid_n = 64;
    cfg.t_end = 0.1;
    cfg.sample_stride = 8;
    Field u0(g);
    auto traj = evolve(u0, model, cfg);
    auto phi = bump_test_function([](double x) { return std::cos(kTwoPi * x); },
                                  [](double x) { return -kTwoPi * std::sin(kTwoPi * x); }, 0.0, 0.5);
    auto D = kinetic_residual(traj, model, phi);
    for (double v : D.values) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("kinetic residual shrinks under refinement on smooth data") {
    auto model = builtin_model("burgers_frac");
    model.noise = NoiseSpec{};
    model.diffusion.diffusion = [](double) { return 0.0; };
    model.diffusion.diffusion_prime = [](double) { return 0.0; };
    model.diffusion.lipschitz_const = 0.0;

    // data and weights chosen so no symmetry cancels the dissipation
    auto phi = bump_test_function(
        [](double x) {
            return 1.0 + 0.4 * std::cos(kTwoPi * x) + 0.3 * std::sin(2.0 * kTwoPi * x);
        },
        [](double x) {
            return kTwoPi * (-0.4 * std::sin(kTwoPi * x) + 0.6 * std::cos(2.0 * kTwoPi * x));
        },
        0.05, 0.4);
    double dfinal[2];
    int idx = 0;
    for (int n : {64, 128}) {
        auto g = make_grid(n);
        SolverConfig cfg;
        cfg.grid_n = n;
        cfg.t_end = 0.25; // well before gradient blow-up at ~0.47
        cfg.sample_stride = 1 << 20;
        Field u0 = sample_field(g, [](double x) {
            return 0.2 * std::sin(kTwoPi * x) + 0.07 * std::cos(2.0 * kTwoPi * x);
        });
        auto traj = evolve(u0, model, cfg);
        auto D = kinetic_residual(traj, model, phi);
        dfinal[idx++] = std::abs(D.values.back());
    }
    CHECK(dfinal[1] < dfinal[0]);
    CHECK(dfinal[0] / dfinal[1] == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("post-shock residual grows and stays positive") {
    auto model = builtin_model("burgers_frac");
    model.noise = NoiseSpec{};
    model.diffusion.diffusion = [](double) { return 0.0; };
    model.diffusion.diffusion_prime = [](double) { return 0.0; };
    model.diffusion.lipschitz_const = 0.0;

    const int n = 128;
    auto g = make_grid(n);
    SolverConfig cfg;
    cfg.grid_n = n;
    cfg.t_end = 0.2;
    cfg.sample_stride = 8;
    // entropy shock at x = 1/2 (up at the wrap-around opens a rarefaction)
    Field u0 = sample_field(g, [](double x) { return (x < 0.5) ? 1.0 : -1.0; });
    auto traj = evolve(u0, model, cfg);
    auto phi = mass_test_function(1.2, 0.5);
    auto D = kinetic_residual(traj, model, phi);
    for (std::size_t s = 1; s < D.values.size(); ++s) {
        CHECK(D.values[s] >= -1e-10);
        CHECK(D.values[s] >= D.values[s - 1] - 1e-10);
    }
    CHECK(D.values.back() > 0.01);
}

TEST_CASE("residual without a noise record is rejected") {
    auto g = make_grid(32);
    auto model = builtin_model("burgers_frac");
    model.noise = additive_noise("sin", 2, 2.0, 0.3);
    SolverConfig cfg;
    cfg.grid_n = 32;
    cfg.t_end = 0.05;
    Field u0(g);
    auto traj = evolve(u0, model, cfg);
    traj.noise_record.clear();
    auto phi = mass_test_function(1.0, 0.5);
    CHECK_THROWS_AS(kinetic_residual(traj, model, phi), InsufficientDataError);
}
