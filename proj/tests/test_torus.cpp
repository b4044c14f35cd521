#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fcsl/torus.hpp"

using namespace fcsl;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Field random_field(const GridPtr& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (int i = 0; i < g->n; ++i) f[i] = dist(rng);
    return f;
}
} // namespace

TEST_CASE("make_grid basics") {
    auto g = make_grid(8);
    CHECK(g->dx == doctest::Approx(0.125));
    CHECK(g->n * g->dx == doctest::Approx(1.0));
    // wavenumbers cover {-3..4}
    std::vector<int> sorted = g->wavenumbers;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted.front() == -3);
    CHECK(sorted.back() == 4);
    CHECK(static_cast<int>(sorted.size()) == 8);

    auto g256 = make_grid(256);
    CHECK(static_cast<int>(g256->wavenumbers.size()) == 256);

    CHECK_THROWS_AS(make_grid(7), ConfigError);
    CHECK_THROWS_AS(make_grid(4), ConfigError);
    CHECK_THROWS_AS(make_grid(1 << 21), ConfigError);
}

TEST_CASE("forward transform of constants and pure modes") {
    auto g = make_grid(32);
    Field c(g);
    for (auto& v : c.values) v = 2.5;
    auto spec = forward_transform(c);
    CHECK(spec.coeff[0].real() == doctest::Approx(2.5).epsilon(1e-14));
    for (int j = 1; j < g->n; ++j) CHECK(std::abs(spec.coeff[static_cast<std::size_t>(j)]) < 1e-13);

    Field cosf = sample_field(g, [](double x) { return std::cos(kTwoPi * x); });
    auto cs = forward_transform(cosf);
    for (int j = 0; j < g->n; ++j) {
        const int k = g->wavenumbers[static_cast<std::size_t>(j)];
        const double expected = (std::abs(k) == 1) ? 0.5 : 0.0;
        CHECK(std::abs(cs.coeff[static_cast<std::size_t>(j)] - std::complex<double>(expected, 0.0)) < 1e-13);
    }
}

TEST_CASE("round trip against a direct DFT oracle at n=16") {
    auto g = make_grid(16);
    Field f = random_field(g, 42);

    // direct O(n^2) DFT with the cell-centered convention
    auto spec = forward_transform(f);
    for (int j = 0; j < g->n; ++j) {
        const int k = g->wavenumbers[static_cast<std::size_t>(j)];
        std::complex<double> acc = 0.0;
        for (int i = 0; i < g->n; ++i)
            acc += f[i] * std::polar(1.0, -kTwoPi * k * g->cell_center(i));
        acc /= static_cast<double>(g->n);
        CHECK(std::abs(acc - spec.coeff[static_cast<std::size_t>(j)]) < 1e-12);
    }

    Field back = inverse_transform(spec);
    for (int i = 0; i < g->n; ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-12));
}

TEST_CASE("round trip identity on random fields") {
    for (int n : {8, 24, 64, 250}) {
        auto g = make_grid(n);
        Field f = random_field(g, static_cast<unsigned>(n));
        Field back = inverse_transform(forward_transform(f));
        double err = 0.0, scale = 0.0;
        for (int i = 0; i < n; ++i) {
            err = std::max(err, std::abs(back[i] - f[i]));
            scale = std::max(scale, std::abs(f[i]));
        }
        CHECK(err <= 1e-12 * std::max(scale, 1.0));
    }
}

TEST_CASE("shift_resample is exact on band-limited data") {
    auto g = make_grid(64);
    Field f = sample_field(g, [](double x) {
        return 0.7 * std::cos(kTwoPi * 3 * x) - 0.2 * std::sin(kTwoPi * 5 * x);
    });
    for (double z : {0.01, 0.37, -0.123, 2.7}) {
        Field s = shift_resample(f, z);
        for (int i = 0; i < g->n; ++i) {
            const double x = g->cell_center(i) + z;
            const double exact = 0.7 * std::cos(kTwoPi * 3 * x) - 0.2 * std::sin(kTwoPi * 5 * x);
            CHECK(s[i] == doctest::Approx(exact).epsilon(1e-11));
        }
    }
}

TEST_CASE("lp norms") {
    auto g = make_grid(256);

    Field c(g);
    for (auto& v : c.values) v = -3.0;
    for (double p : {1.0, 2.0, 3.5, kLpInf}) CHECK(lp_norm(c, p) == doctest::Approx(3.0));

    Field alt(g);
    for (int i = 0; i < g->n; ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
    CHECK(lp_norm(alt, 1.0) == doctest::Approx(1.0));

    Field s = sample_field(g, [](double x) { return std::sin(kTwoPi * x); });
    CHECK(lp_norm(s, 2.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));

    CHECK_THROWS_AS(lp_norm(s, 0.5), std::domain_error);
}

TEST_CASE("lp norm properties: Hoelder monotonicity and homogeneity") {
    auto g = make_grid(64);
    for (unsigned seed : {1u, 2u, 3u, 4u}) {
        Field f = random_field(g, seed);
        const double n1 = lp_norm(f, 1.0);
        double prev = n1;
        for (double p : {1.5, 2.0, 4.0, 8.0}) {
            const double np = lp_norm(f, p);
            CHECK(np >= prev - 1e-12);
            prev = np;
        }
        CHECK(lp_norm(f, kLpInf) >= prev - 1e-12);

        Field scaled = f;
        for (auto& v : scaled.values) v *= -2.3;
        CHECK(lp_norm(scaled, 2.0) == doctest::Approx(2.3 * lp_norm(f, 2.0)).epsilon(1e-13));
    }
}

TEST_CASE("mismatched sizes raise shape errors") {
    auto g = make_grid(16);
    CHECK_THROWS_AS(Field(g, std::vector<double>(7, 0.0)), ShapeError);
    SpectralCoeffs bad{g, std::vector<std::complex<double>>(3)};
    CHECK_THROWS_AS(inverse_transform(bad), ShapeError);
}
