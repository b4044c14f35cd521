#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fcsl/operators.hpp"

using namespace fcsl;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rel_l2(const Field& a, const Field& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}
} // namespace

TEST_CASE("fractional order domain") {
    CHECK_THROWS_AS(FractionalOrder(0.0), std::domain_error);
    CHECK_THROWS_AS(FractionalOrder(1.0), std::domain_error);
    CHECK_NOTHROW(FractionalOrder(0.5));
}

TEST_CASE("spectral operator on eigenfunctions") {
    auto g = make_grid(128);
    for (double a : {0.1, 0.3, 0.45, 0.7}) {
        for (int k : {1, 3, 32}) {
            Field f = sample_field(g, [k](double x) { return std::cos(kTwoPi * k * x); });
            Field out = frac_laplacian_spectral(f, FractionalOrder(a));
            const double lam = std::pow(kTwoPi * k, 2.0 * a);
            for (int i = 0; i < g->n; ++i)
                CHECK(out[i] == doctest::Approx(lam * f[i]).epsilon(1e-10).scale(lam));
        }
    }
}

TEST_CASE("constants are annihilated with exactly zero mean") {
    auto g = make_grid(64);
    Field c(g);
    for (auto& v : c.values) v = 4.2;
    Field out = frac_laplacian_spectral(c, FractionalOrder(0.35));
    for (int i = 0; i < g->n; ++i) CHECK(std::abs(out[i]) < 1e-12);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (auto& v : f.values) v = dist(rng);
    CHECK(std::abs(frac_laplacian_spectral(f, FractionalOrder(0.25)).mean()) < 1e-14);
    CHECK(std::abs(laplacian(f).mean()) < 1e-13);
}

TEST_CASE("two-mode closed form, alpha=0.3") {
    auto g = make_grid(128);
    Field f = sample_field(g, [](double x) {
        return std::cos(kTwoPi * x) + 0.5 * std::cos(3.0 * kTwoPi * x);
    });
    Field out = frac_laplacian_spectral(f, FractionalOrder(0.3));
    const double l1 = std::pow(kTwoPi, 0.6), l3 = std::pow(3.0 * kTwoPi, 0.6);
    for (int i = 0; i < g->n; ++i) {
        const double x = g->cell_center(i);
        const double exact = l1 * std::cos(kTwoPi * x) + 0.5 * l3 * std::cos(3.0 * kTwoPi * x);
        CHECK(out[i] == doctest::Approx(exact).epsilon(1e-10));
    }
}

TEST_CASE("symmetry and positivity of the quadratic form") {
    auto g = make_grid(64);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        Field f(g);
        for (auto& v : f.values) v = dist(rng);
        Field lf = frac_laplacian_spectral(f, FractionalOrder(0.4));
        double quad = 0.0;
        for (int i = 0; i < g->n; ++i) quad += lf[i] * f[i] * g->dx;
        CHECK(quad >= -1e-12);
    }
    Field c(g);
    for (auto& v : c.values) v = 1.3;
    Field lc = frac_laplacian_spectral(c, FractionalOrder(0.4));
    double quad = 0.0;
    for (int i = 0; i < g->n; ++i) quad += lc[i] * c[i] * g->dx;
    CHECK(std::abs(quad) < 1e-12);
}

TEST_CASE("classical laplacian: eigenfunction and finite-difference oracle") {
    for (int n : {64, 128}) {
        auto g = make_grid(n);
        Field f = sample_field(g, [](double x) { return std::cos(kTwoPi * x); });
        Field out = laplacian(f);
        for (int i = 0; i < n; ++i)
            CHECK(out[i] == doctest::Approx(-kTwoPi * kTwoPi * f[i]).epsilon(1e-10));

        Field c(g);
        for (auto& v : c.values) v = 2.0;
        Field lc = laplacian(c);
        for (int i = 0; i < n; ++i) CHECK(std::abs(lc[i]) < 1e-12);
    }

    // spectral vs centered second difference on, a smooth field: O(dx^2)
    double errs[2];
    int idx = 0;
    for (int n : {64, 128}) {
        auto g = make_grid(n);
        Field f = sample_field(g, [](double x) { return std::sin(kTwoPi * x) + 0.3 * std::cos(2 * kTwoPi * x); });
        Field sp = laplacian(f);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1) % n, im = (i + n - 1) % n;
            const double fd = (f[ip] - 2.0 * f[i] + f[im]) / (g->dx * g->dx);
            worst = std::max(worst, std::abs(fd - sp[i]));
        }
        errs[idx++] = worst;
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("limit alpha -> 1 recovers the laplacian on cos") {
    auto g = make_grid(64);
    Field f = sample_field(g, [](double x) { return std::cos(kTwoPi * x); });
    Field frac = frac_laplacian_spectral(f, FractionalOrder(0.999999));
    Field lap = laplacian(f);
    for (int i = 0; i < g->n; ++i)
        CHECK(frac[i] == doctest::Approx(-lap[i]).epsilon(1e-4));
}

TEST_CASE("quadrature: constant field maps to zero") {
    auto g = make_grid(32);
    Field c(g);
    for (auto& v : c.values) v = 0.8;
    Field out = frac_laplacian_quadrature(c, FractionalOrder(0.3), 8.0, 1024);
    for (int i = 0; i < g->n; ++i) CHECK(std::abs(out[i]) < 1e-8);
}

TEST_CASE("quadrature agrees with the spectral symbol on cos, alpha=0.25") {
    auto g = make_grid(64);
    Field f = sample_field(g, [](double x) { return std::cos(kTwoPi * x); });
    Field q = frac_laplacian_quadrature(f, FractionalOrder(0.25), 8.0, 2048);
    Field s = frac_laplacian_spectral(f, FractionalOrder(0.25));
    CHECK(rel_l2(q, s) < 1e-3);
}

TEST_CASE("quadrature vs spectral on band-limited random fields") {
    auto g = make_grid(64);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double a : {0.1, 0.25, 0.4, 0.45}) {
        // random field band-limited to |k| <= n/8
        Field f(g);
        for (int k = 1; k <= g->n / 8; ++k) {
            const double ak = dist(rng), bk = dist(rng);
            for (int i = 0; i < g->n; ++i) {
                const double x = g->cell_center(i);
                f[i] += ak * std::cos(kTwoPi * k * x) + bk * std::sin(kTwoPi * k * x);
            }
        }
        Field q = frac_laplacian_quadrature(f, FractionalOrder(a), 8.0, 2048);
        Field s = frac_laplacian_spectral(f, FractionalOrder(a));
        CHECK(rel_l2(q, s) < 1e-3);
    }
}

TEST_CASE("quadrature precondition and parallel/serial equivalence") {
    auto g = make_grid(32);
    Field f = sample_field(g, [](double x) { return std::sin(kTwoPi * x); });
    CHECK_THROWS_AS(frac_laplacian_quadrature(f, FractionalOrder(0.3), 2.0, 2048), PreconditionError);
    CHECK_THROWS_AS(frac_laplacian_quadrature(f, FractionalOrder(0.3), 8.0, 100), PreconditionError);

    Field par = frac_laplacian_quadrature(f, FractionalOrder(0.3), 8.0, 1024);
    Field ser = frac_laplacian_quadrature_serial(f, FractionalOrder(0.3), 8.0, 1024);
    for (int i = 0; i < g->n; ++i) CHECK(par[i] == ser[i]); // bit-identical
}

TEST_CASE("gauss-legendre sanity") {
    std::vector<double> x, w;
    gauss_legendre(12, x, w);
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < 12; ++i) {
        s += w[static_cast<std::size_t>(i)];
        s2 += w[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    }
    CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}
