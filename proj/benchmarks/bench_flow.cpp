#include <benchmark/benchmark.h>

#include "hmflow/flow_engine.hpp"
#include "hmflow/map_generators.hpp"
#include "hmflow/qd_harness.hpp"
#include "hmflow/torus_domain.hpp"

namespace hmflow {
namespace {

void bm_tension_sweep_torus(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto target = TargetManifold::flat_torus();
  const auto u = perturb_map(covering_map({n, n}, 2, 1), target, 0.05, 1);
  const auto l = LatticeParams::from_ab(0.3, 1.4);
  TensionSweep sweep;
  for (auto _ : state) {
    tension_sweep_into(u, l, target, sweep);
    benchmark::DoNotOptimize(sweep.tension_l2);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(bm_tension_sweep_torus)->Arg(64)->Arg(128)->Arg(256);

void bm_tension_sweep_sphere(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto target = TargetManifold::sphere(3);
  const auto u = random_smooth_map(target, {n, n}, 1, 0);
  const auto l = LatticeParams::from_ab(0.3, 1.4);
  TensionSweep sweep;
  for (auto _ : state) {
    tension_sweep_into(u, l, target, sweep);
    benchmark::DoNotOptimize(sweep.tension_l2);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(bm_tension_sweep_sphere)->Arg(64)->Arg(128);

void bm_flow_steps(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  FlowSettings s;
  const FlowEngine engine(s);
  const auto u = perturb_map(covering_map({n, n}, 2, 1), s.target, 0.05, 1);
  const FlowState initial = make_state(u, LatticeParams::from_ab(0.3, 1.4));
  for (auto _ : state) {
    FlowState s1 = initial;
    for (int k = 0; k < 100; ++k) s1 = engine.step(std::move(s1), false);
    benchmark::DoNotOptimize(s1.lattice);
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(bm_flow_steps)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void bm_poincare_trials(benchmark::State& state) {
  harness::TrialSpec spec;
  spec.grid = {static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0))};
  spec.trials = 10;
  const auto l = LatticeParams::from_ab(0.2, 1.3);
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_poincare_trials(spec, l).max_ratio);
}
BENCHMARK(bm_poincare_trials)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void bm_mollify_trials(benchmark::State& state) {
  harness::MollifySpec spec;
  spec.trials = 10;
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_mollify_trials(spec).max_ratio);
}
BENCHMARK(bm_mollify_trials)->Unit(benchmark::kMillisecond);

void bm_hopf_trials(benchmark::State& state) {
  const auto l = LatticeParams::from_ab(0.2, 1.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        harness::run_hopf_trials(TargetManifold::sphere(3), l, {64, 64}, 1, 5).max_ratio);
  }
}
BENCHMARK(bm_hopf_trials)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace hmflow

BENCHMARK_MAIN();
