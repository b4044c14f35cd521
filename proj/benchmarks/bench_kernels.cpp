// Serial vs OpenMP comparison for the data-parallel kernels: the
// singular-integral quadrature, the parabolic defect assembly, and the
// Monte Carlo path ensemble. The *_serial variants are the reference
// implementations the tests pin the parallel kernels against.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "fcsl/kinetic.hpp"
#include "fcsl/operators.hpp"
#include "fcsl/solver.hpp"

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

fcsl::Field test_field(int n) {
    auto g = fcsl::make_grid(n);
    return fcsl::sample_field(g, [](double x) {
        return std::sin(kTwoPi * x) + 0.4 * std::cos(3.0 * kTwoPi * x);
    });
}

void BM_frac_quadrature_serial(benchmark::State& state) {
    const auto f = test_field(static_cast<int>(state.range(0)));
    const fcsl::FractionalOrder a(0.35);
    for (auto _ : state) {
        auto out = fcsl::frac_laplacian_quadrature_serial(f, a, 8.0, 2048);
        benchmark::DoNotOptimize(out.values.data());
    }
}

void BM_frac_quadrature_omp(benchmark::State& state) {
    const auto f = test_field(static_cast<int>(state.range(0)));
    const fcsl::FractionalOrder a(0.35);
    for (auto _ : state) {
        auto out = fcsl::frac_laplacian_quadrature(f, a, 8.0, 2048);
        benchmark::DoNotOptimize(out.values.data());
    }
}

void BM_parabolic_defect_serial(benchmark::State& state) {
    const auto f = test_field(static_cast<int>(state.range(0)));
    auto model = fcsl::builtin_model("burgers_frac");
    auto zg = fcsl::make_zeta_grid(-2.0, 2.0, 64);
    for (auto _ : state) {
        auto out = fcsl::parabolic_defect_serial(f, model, zg, 8.0, 2048);
        benchmark::DoNotOptimize(out.v.data());
    }
}

void BM_parabolic_defect_omp(benchmark::State& state) {
    const auto f = test_field(static_cast<int>(state.range(0)));
    auto model = fcsl::builtin_model("burgers_frac");
    auto zg = fcsl::make_zeta_grid(-2.0, 2.0, 64);
    for (auto _ : state) {
        auto out = fcsl::parabolic_defect(f, model, zg, 8.0, 2048);
        benchmark::DoNotOptimize(out.v.data());
    }
}

fcsl::Trajectory one_path(int p, int n) {
    auto g = fcsl::make_grid(n);
    auto model = fcsl::builtin_model("burgers_frac");
    model.noise = fcsl::additive_noise("sin", 4, 2.0, 0.4);
    fcsl::SolverConfig cfg;
    cfg.grid_n = n;
    cfg.t_end = 0.25;
    cfg.seed = 1234;
    cfg.path_index = static_cast<std::uint64_t>(p);
    cfg.sample_stride = 1 << 20;
    fcsl::Field u0 = fcsl::sample_field(g, [](double x) { return 0.4 * std::sin(kTwoPi * x); });
    return fcsl::evolve(u0, model, cfg);
}

void BM_ensemble_serial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto out = fcsl::run_ensemble_serial(8, [&](int p) { return one_path(p, n); });
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_ensemble_omp(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto out = fcsl::run_ensemble(8, [&](int p) { return one_path(p, n); });
        benchmark::DoNotOptimize(out.data());
    }
}

} // namespace

BENCHMARK(BM_frac_quadrature_serial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_frac_quadrature_omp)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parabolic_defect_serial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parabolic_defect_omp)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ensemble_serial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ensemble_omp)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
