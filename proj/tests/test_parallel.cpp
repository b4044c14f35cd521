// The OpenMP kernels must produce bit-identical results to their serial
// references for every thread count; ensembles reduce in path order.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <numbers>

#include "fcsl/kinetic.hpp"
#include "fcsl/operators.hpp"
#include "fcsl/solver.hpp"
#include "fcsl/theory.hpp"

using namespace fcsl;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void set_threads(int n) {
#ifdef _OPENMP
    static const int dflt = omp_get_max_threads();
    omp_set_num_threads(n > 0 ? n : dflt);
#else
    (void)n;
#endif
}
} // namespace

TEST_CASE("quadrature operator: serial reference vs OpenMP at 1, 4, 8 threads") {
    auto g = make_grid(64);
    Field f = sample_field(g, [](double x) {
        return std::sin(kTwoPi * x) - 0.3 * std::cos(2.0 * kTwoPi * x);
    });
    const FractionalOrder a(0.3);
    const Field ref = frac_laplacian_quadrature_serial(f, a, 8.0, 1024);
    for (int threads : {1, 4, 8}) {
        set_threads(threads);
        const Field par = frac_laplacian_quadrature(f, a, 8.0, 1024);
        for (int i = 0; i < g->n; ++i) CHECK(par[i] == ref[i]);
    }
    set_threads(0);
}

TEST_CASE("parabolic defect: serial reference vs OpenMP at 1, 4, 8 threads") {
    auto g = make_grid(48);
    auto model = builtin_model("degenerate_porous");
    Field u = sample_field(g, [](double x) { return std::tanh(4.0 * std::sin(kTwoPi * x)); });
    auto zg = make_zeta_grid(-1.5, 1.5, 64);
    const auto ref = parabolic_defect_serial(u, model, zg, 8.0, 2048);
    for (int threads : {1, 4, 8}) {
        set_threads(threads);
        const auto par = parabolic_defect(u, model, zg, 8.0, 2048);
        REQUIRE(par.v.size() == ref.v.size());
        for (std::size_t q = 0; q < ref.v.size(); ++q) CHECK(par.v[q] == ref.v[q]);
    }
    set_threads(0);
}

TEST_CASE("ensembles and checks reproduce bit-identically across thread counts") {
    auto g = make_grid(32);
    auto model = builtin_model("burgers_frac");
    model.noise = additive_noise("sin", 4, 2.0, 0.4);
    SolverConfig cfg;
    cfg.grid_n = 32;
    cfg.t_end = 0.2;
    cfg.seed = 2718;
    cfg.sample_stride = 4;
    Field u0a = sample_field(g, [](double x) { return 0.5 * std::sin(kTwoPi * x); });
    Field u0b = u0a;
    for (int i = 0; i < g->n; ++i) u0b[i] += 0.1 * std::sin(2.0 * kTwoPi * g->cell_center(i));

    std::vector<double> stats;
    std::vector<std::vector<double>> detail_runs;
    for (int threads : {1, 4, 8}) {
        set_threads(threads);
        auto rep = contraction_check(u0a, u0b, model, cfg, 8);
        stats.push_back(rep.statistic);
        std::vector<double> d;
        for (const auto& [t, v] : rep.details) d.push_back(v);
        detail_runs.push_back(std::move(d));
    }
    set_threads(0);
    CHECK(stats[0] == stats[1]);
    CHECK(stats[0] == stats[2]);
    REQUIRE(detail_runs[0].size() == detail_runs[1].size());
    for (std::size_t i = 0; i < detail_runs[0].size(); ++i) {
        CHECK(detail_runs[0][i] == detail_runs[1][i]);
        CHECK(detail_runs[0][i] == detail_runs[2][i]);
    }
}

TEST_CASE("nld scan is thread-count independent") {
    auto model = builtin_model("burgers_frac");
    const auto range = std::make_pair(-32.0, 32.0);
    const auto taus = default_tau_grid(model, range);
    std::vector<double> etas;
    for (int threads : {1, 4}) {
        set_threads(threads);
        etas.push_back(nld_eta(model, 1e-2, range, taus, {1, 2, 3, 4}));
    }
    set_threads(0);
    CHECK(etas[0] == etas[1]);
}
