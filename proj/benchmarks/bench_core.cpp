#include <benchmark/benchmark.h>

#include "lvc/corridor.hpp"
#include "lvc/integrator.hpp"
#include "lvc/model.hpp"
#include "lvc/regime_map.hpp"

namespace {

const lvc::Params kBase{0.48, 0.55, 1.0};

void BM_IntegrateBase(benchmark::State& state) {
  lvc::SolverConfig cfg;
  cfg.t_max = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto r = lvc::integrate(kBase, lvc::State{0.2, 0.8}, cfg);
    benchmark::DoNotOptimize(r.trajectory.t_end());
  }
}
BENCHMARK(BM_IntegrateBase)->Arg(200)->Arg(2000);

void BM_DenseEval(benchmark::State& state) {
  const auto r = lvc::integrate(kBase, lvc::State{0.2, 0.8}, lvc::SolverConfig{});
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(r.trajectory.at(t));
    t += 0.0137;
    if (t > 200.0) t -= 200.0;
  }
}
BENCHMARK(BM_DenseEval);

void BM_CorridorAnalysis(benchmark::State& state) {
  const auto r = lvc::integrate(kBase, lvc::State{0.2, 0.8}, lvc::SolverConfig{});
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto s = lvc::corridor_analysis(kBase, r.trajectory, n);
    benchmark::DoNotOptimize(s.dwell_total);
  }
}
BENCHMARK(BM_CorridorAnalysis)->Arg(2001)->Arg(20001);

void BM_Sweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto g = lvc::sweep(n, lvc::MapThresholds{}, 1.0, lvc::kDefaultContourPoints, 1);
    benchmark::DoNotOptimize(g.cells.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_Sweep)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
