#include <benchmark/benchmark.h>

#include "granusim/coordinator.hpp"
#include "granusim/experiment.hpp"

namespace {

using namespace granusim;

struct Setup {
  ScenarioConfig config;
  World world;
  std::vector<DisruptionEvent> events;
  SyncSchedule schedule;

  Setup(Timestep tg, std::size_t scale) {
    for (NetworkSpec& s : config.networks) {
      s.nodes *= scale;
      s.edges *= scale;
    }
    config.factors = {tg, 9, 8};
    config.horizon = 2000;
    world = build_world(config);
    events = build_events(config, world);
    schedule = {tg, config.horizon};
  }
};

void BM_Sequential(benchmark::State& state) {
  const Setup s(state.range(0), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    Federation fed = build_federation(s.config, s.world);
    benchmark::DoNotOptimize(run_sequential_reference(fed, s.schedule, s.events));
  }
  state.SetItemsProcessed(state.iterations() * s.config.horizon);
}

void BM_Parallel(benchmark::State& state) {
  const Setup s(state.range(0), static_cast<std::size_t>(state.range(1)));
  const RunOptions options{static_cast<int>(state.range(2))};
  for (auto _ : state) {
    Federation fed = build_federation(s.config, s.world);
    benchmark::DoNotOptimize(run(fed, s.schedule, s.events, options));
  }
  state.SetItemsProcessed(state.iterations() * s.config.horizon);
}

void BM_Experiment(benchmark::State& state) {
  const ScenarioConfig base;
  const auto layout = build_layout(base.levels);
  const ExperimentOptions options{static_cast<int>(state.range(0)), ""};
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(base, layout, options));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(layout.size()));
}

}  // namespace

BENCHMARK(BM_Sequential)->ArgsProduct({{1, 12, 27}, {1, 10}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->ArgsProduct({{1, 12, 27}, {1, 10}, {1, 3}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Experiment)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
