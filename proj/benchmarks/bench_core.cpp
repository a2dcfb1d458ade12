// Microbenchmarks for the hot paths: the vector field, one RK4 step, short
// trajectories, Jacobian assembly on both routes, the cubic eigensolver, the
// seeded fixed-point search, and a small parameter sweep.

#include <benchmark/benchmark.h>

#include "nevdyn/integrate.hpp"
#include "nevdyn/linalg.hpp"
#include "nevdyn/model.hpp"
#include "nevdyn/scenarios.hpp"
#include "nevdyn/stability.hpp"

namespace {

using namespace nevdyn;

ModelParams lab_params() {
    ModelParams p;
    p.a0 = 0.5;
    p.a1 = 1.5;
    p.a2 = 0.5;
    p.a3 = -0.5;
    p.v = 0.6;
    p.gamma_F = 0.9;
    p.theta_E = 0.2;
    p.alpha1 = 0.03;
    p.alpha2 = 0.07;
    p.growth = GrowthPolicy::fixed(0.1);
    return p;
}

const SystemState kState{-0.1, 3.0, 4.0, 10.0};

void bm_vector_field(benchmark::State& state) {
    const ModelParams p = lab_params();
    for (auto _ : state) {
        benchmark::DoNotOptimize(vector_field(p, kState));
    }
}
BENCHMARK(bm_vector_field);

void bm_step_rk4(benchmark::State& state) {
    const ModelParams p = lab_params();
    for (auto _ : state) {
        benchmark::DoNotOptimize(step_rk4(p, kState, 0.01));
    }
}
BENCHMARK(bm_step_rk4);

void bm_integrate_fixed_grid(benchmark::State& state) {
    const ModelParams p = lab_params();
    IntegrationConfig cfg;
    cfg.t_end = 10.0;
    cfg.dt = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(p, kState, cfg));
    }
}
BENCHMARK(bm_integrate_fixed_grid);

void bm_integrate_adaptive(benchmark::State& state) {
    const ModelParams p = lab_params();
    IntegrationConfig cfg;
    cfg.t_end = 10.0;
    cfg.dt = 0.01;
    cfg.adaptive = true;
    cfg.rel_tol = 1e-8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(p, kState, cfg));
    }
}
BENCHMARK(bm_integrate_adaptive);

void bm_jacobian_analytic(benchmark::State& state) {
    const ModelParams p = lab_params();
    for (auto _ : state) {
        benchmark::DoNotOptimize(jacobian_analytic(p, kState, Dims::ThreeD));
    }
}
BENCHMARK(bm_jacobian_analytic);

void bm_jacobian_fd(benchmark::State& state) {
    const ModelParams p = lab_params();
    for (auto _ : state) {
        benchmark::DoNotOptimize(jacobian_fd(p, kState, Dims::ThreeD));
    }
}
BENCHMARK(bm_jacobian_fd);

void bm_eigenvalues_3x3(benchmark::State& state) {
    const ModelParams p = lab_params();
    const Matrix j = jacobian_analytic(p, kState, Dims::ThreeD);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigenvalues(j));
    }
}
BENCHMARK(bm_eigenvalues_3x3);

void bm_find_fixed_points(benchmark::State& state) {
    ModelParams p = lab_params();
    p.a0 = balanced_a0(p, 10.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_fixed_points(p, 10.0, Dims::ThreeD));
    }
}
BENCHMARK(bm_find_fixed_points);

void bm_small_sweep(benchmark::State& state) {
    SweepSpec spec;
    spec.base = preset("S1_weak");
    spec.base.integration.t_end = 5.0;
    spec.axes = {{"a1", {0.4, 0.5, 0.6}}, {"x0", {-0.2, -0.1, 0.1, 0.2}}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep(spec, 1));
    }
}
BENCHMARK(bm_small_sweep);

} // namespace

BENCHMARK_MAIN();
