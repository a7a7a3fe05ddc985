#include "cavity_bjj/dynamics.hpp"
#include "cavity_bjj/fixed_points.hpp"
#include "cavity_bjj/portrait.hpp"
#include "cavity_bjj/quantum.hpp"
#include "cavity_bjj/reduced.hpp"
#include "cavity_bjj/wannier.hpp"

#include <benchmark/benchmark.h>

using namespace cavity_bjj;

namespace {

const DimensionlessParams reference_params{-100.0, -90.0, -30.0, 12.0, 20.0, 1000};

void BM_MeanFieldRhs(benchmark::State& state) {
    auto y = to_internal({0.1, 0.5, 0.3, 0.2}).to_vector();
    for (auto _ : state) {
        benchmark::DoNotOptimize(y = rhs(reference_params, y));
        y[0] = 0.1 * y[0] + 0.5;
    }
}
BENCHMARK(BM_MeanFieldRhs);

void BM_IntegratePlasmaOscillation(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(integrate(reference_params, {0.0, 0.5, 0.0, 0.0}, 100.0));
}
BENCHMARK(BM_IntegratePlasmaOscillation)->Unit(benchmark::kMillisecond);

void BM_FixedPoints(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(all_fixed_points(reference_params));
}
BENCHMARK(BM_FixedPoints)->Unit(benchmark::kMicrosecond);

void BM_ReducedTrajectory(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(integrate_reduced(reference_params, 0.0, 0.5, 100.0));
}
BENCHMARK(BM_ReducedTrajectory)->Unit(benchmark::kMillisecond);

void BM_PortraitGrid(benchmark::State& state) {
    PortraitSpec spec;
    spec.theta_points = static_cast<int>(state.range(0));
    spec.z_points = static_cast<int>(state.range(0));
    spec.default_seeds = false;
    spec.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(render_portrait(reference_params, spec));
}
BENCHMARK(BM_PortraitGrid)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_DoubleWellSpectrum(benchmark::State& state) {
    DoubleWellSpec spec;
    spec.points = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_double_well(spec, 5));
}
BENCHMARK(BM_DoubleWellSpectrum)->Arg(2001)->Arg(8001)->Unit(benchmark::kMillisecond);

void BM_KrylovEvolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const DimensionlessParams p{-5.0, -1.0, -0.5, 2.0, 0.5, n};
    const FockBasis basis(n, 16);
    const auto h = build_hamiltonian(p, basis);
    const auto psi = coherent_initial_state(0.4, 0.3, 0.0, 0.0, basis);
    for (auto _ : state) benchmark::DoNotOptimize(evolve(psi, h, 1.0));
    state.counters["dimension"] = static_cast<double>(basis.dimension());
}
BENCHMARK(BM_KrylovEvolve)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
