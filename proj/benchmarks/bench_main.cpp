#include "uavmec/convex.hpp"
#include "uavmec/oracle.hpp"
#include "uavmec/problems.hpp"
#include "uavmec/schemes.hpp"

#include <benchmark/benchmark.h>

using namespace uavmec;

namespace {

ScenarioConfig with_slot(double slot) {
  ScenarioConfig cfg = reference_scenario();
  cfg.slot = slot;
  return cfg;
}

ScenarioConfig single_uav() {
  ScenarioConfig cfg = reference_scenario();
  cfg.num_uavs = 1;
  cfg.horizon = 20.0;
  cfg.slot = 1.0;
  cfg.uavs = {UavSpec{Vec2(-300, -200), Vec2(300, -200), Vec2(30, 0), Vec2(30, 0), 2e5}};
  return cfg;
}

}  // namespace

static void BM_TrueEnergy(benchmark::State& state) {
  const ScenarioConfig cfg = with_slot(0.5);
  const Iterate it = initial_iterate(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(total_energy(cfg, it.traj, it.offload, Scheme::Tdma));
}
BENCHMARK(BM_TrueEnergy);

// One Joint subproblem around the starting iterate; the argument is the slot
// length in tenths of a second.
static void BM_JointSubproblem(benchmark::State& state) {
  const ScenarioConfig cfg = with_slot(state.range(0) / 10.0);
  const Iterate it = initial_iterate(cfg);
  for (auto _ : state) {
    const Subproblem sp(cfg, SubproblemKind::Joint, Scheme::Tdma, it, {});
    benchmark::DoNotOptimize(solve_convex(sp.program()));
  }
  state.counters["vars"] = Subproblem(cfg, SubproblemKind::Joint, Scheme::Tdma, it, {}).program().num_variables();
}
BENCHMARK(BM_JointSubproblem)->Arg(20)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_BuildSubproblem(benchmark::State& state) {
  const ScenarioConfig cfg = with_slot(1.0);
  const Iterate it = initial_iterate(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(Subproblem(cfg, SubproblemKind::Joint, Scheme::Tdma, it, {}));
}
BENCHMARK(BM_BuildSubproblem)->Unit(benchmark::kMicrosecond);

static void BM_SingleUavScheme(benchmark::State& state) {
  static const char* const names[] = {"tdma", "ofdma", "one-by-one", "noma"};
  const ScenarioConfig cfg = single_uav();
  const char* name = names[state.range(0)];
  state.SetLabel(name);
  for (auto _ : state) benchmark::DoNotOptimize(solve_by_name(name, cfg));
}
BENCHMARK(BM_SingleUavScheme)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void BM_TinyGrid(benchmark::State& state) {
  ScenarioConfig cfg = single_uav();
  cfg.horizon = 4.0;
  cfg.uavs = {UavSpec{Vec2(-60, -20), Vec2(60, -20), Vec2(30, 0), Vec2(30, 0), 1e4}};
  for (auto _ : state) benchmark::DoNotOptimize(grid_search_tiny(cfg, Scheme::Tdma));
}
BENCHMARK(BM_TinyGrid)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
