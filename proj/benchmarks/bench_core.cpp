#include "sica/sica.hpp"

#include <benchmark/benchmark.h>

namespace {

sica::ParameterSet params() {
    sica::ImpreciseParameterSet p;
    p.recruitment = {0.018, 0.022};
    p.transmission = {0.6, 0.9};
    p.natural_death = {0.018, 0.022};
    p.chronic_infectivity = {0.01, 0.02};
    p.aids_infectivity = {1.2, 1.4};
    p.treatment_uptake = {0.8, 1.2};
    p.aids_progression = {0.08, 0.12};
    p.aids_treatment = {0.3, 0.36};
    p.treatment_default = {0.08, 0.1};
    p.aids_death = {0.9, 1.1};
    p.noise_intensity = {0.04, 0.06};
    p.control_efficacy = {0.8, 1.0};
    p.saturation = {0.5, 1.0};
    return sica::realize_set(p, 0.5);
}

const sica::StatePoint kX0{0.7, 0.2, 0.05, 0.05};

void BM_EulerMaruyamaStep(benchmark::State& state) {
    const auto p = params();
    sica::StatePoint x = kX0;
    std::size_t clamps = 0;
    for (auto _ : state) {
        x = sica::euler_maruyama_step(x, 0.5, p, 1e-3, 1e-3, clamps);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_EulerMaruyamaStep);

void BM_SimulateEnsemble(benchmark::State& state) {
    const auto p = params();
    const sica::TimeGrid g(20.0, 400);
    const auto u = sica::midpoint_control(g, 0, 1);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(sica::simulate_ensemble(kX0, u, p, n, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateEnsemble)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AdjointEnsemble(benchmark::State& state) {
    const auto p = params();
    const sica::TimeGrid g(20.0, 400);
    const auto u = sica::midpoint_control(g, 0, 1);
    const auto e = sica::simulate_ensemble(kX0, u, p, 100, 1);
    const auto mode = state.range(0) == 0 ? sica::AdjointMode::CertaintyEquivalent : sica::AdjointMode::Regression;
    for (auto _ : state)
        benchmark::DoNotOptimize(sica::adjoint_ensemble(e, u, p, sica::CostWeights{}, mode));
}
BENCHMARK(BM_AdjointEnsemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FbsmDeterministic(benchmark::State& state) {
    const auto p = params().with(&sica::Rates::noise_intensity, 0.0);
    const sica::TimeGrid g(20.0, static_cast<std::size_t>(state.range(0)));
    sica::SweepConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(sica::fbsm_optimize(kX0, p, sica::CostWeights{}, sica::midpoint_control(g, 0, 1), cfg));
}
BENCHMARK(BM_FbsmDeterministic)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
