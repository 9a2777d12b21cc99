#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "ergomax/dynamics.hpp"
#include "ergomax/measure.hpp"
#include "ergomax/observables.hpp"
#include "ergomax/rng.hpp"
#include "ergomax/targets.hpp"

using namespace ergomax;

namespace {

dynamics::MapSystem map_for(int which) {
  switch (which) {
    case 0: return dynamics::MapSystem::tent();
    case 1: return dynamics::MapSystem::intermittent(0.5);
    default: return dynamics::MapSystem::henon();
  }
}

const char* map_label(int which) {
  switch (which) {
    case 0: return "tent";
    case 1: return "intermittent";
    default: return "henon";
  }
}

}  // namespace

static void BM_MapStep(benchmark::State& state) {
  const auto map = map_for(static_cast<int>(state.range(0)));
  Point x = dynamics::random_initial_point(map, 1);
  for (auto _ : state) {
    x = map.step_unchecked(x);
    benchmark::DoNotOptimize(x);
  }
  state.SetLabel(map_label(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MapStep)->DenseRange(0, 2);

static void BM_OrbitJittered(benchmark::State& state) {
  const auto map = dynamics::MapSystem::tent();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    dynamics::Orbit orbit(map, Point::of(0.3141), n, {.burn_in = 0, .jitter = 1e-12, .jitter_key = 7});
    double acc = 0.0;
    for (const Point& x : orbit) acc += x[0];
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OrbitJittered)->Arg(1 << 16);

static void BM_MaxTracker(benchmark::State& state) {
  const auto map = dynamics::MapSystem::tent();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto xs = dynamics::collect_orbit(map, Point::of(0.3141), n, {.burn_in = 0, .jitter = 1e-12});
  const auto obs = obs::Observable::neg_log_dist(Point::of(0.3));
  const auto grid = obs::geometric_checkpoints(n);
  for (auto _ : state) {
    obs::ObservableMaxTracker tracker(obs, grid);
    for (const Point& x : xs) tracker.push(x);
    benchmark::DoNotOptimize(std::move(tracker).finish());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MaxTracker)->Arg(1 << 16);

static void BM_HitCounter(benchmark::State& state) {
  const auto map = dynamics::MapSystem::tent();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto xs = dynamics::collect_orbit(map, Point::of(0.3141), n, {.burn_in = 0, .jitter = 1e-12});
  const targets::TargetSchedule schedule(targets::LogPowerRule{3.0},
                                         targets::MeasureModel::analytic_lebesgue_1d(Point::of(0.3)), n);
  const auto grid = obs::geometric_checkpoints(n);
  for (auto _ : state) {
    targets::HitCounter counter(schedule, grid);
    for (const Point& x : xs) counter.push(x);
    benchmark::DoNotOptimize(std::move(counter).finish());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HitCounter)->Arg(1 << 16);

static void BM_Correlation(benchmark::State& state) {
  const auto map = dynamics::MapSystem::tent();
  const std::uint64_t n = 1 << 16;
  const auto xs = dynamics::collect_orbit(map, Point::of(0.3141), n, {.burn_in = 0, .jitter = 1e-12});
  const auto lags = measure::lag_grid(10, static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) {
    measure::CorrelationAccumulator acc(measure::TestFunction::hinge(0.3), measure::TestFunction::hinge(0.3), lags);
    for (const Point& x : xs) acc.push(x);
    benchmark::DoNotOptimize(acc.count());
  }
  state.counters["lags"] = static_cast<double>(lags.size());
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Correlation)->Arg(200)->Arg(20000);

static void BM_BallCount(benchmark::State& state) {
  const auto map = dynamics::MapSystem::henon();
  auto m = measure::EmpiricalMeasure::from_orbit(map, dynamics::random_initial_point(map, 3), 1 << 18);
  const Point c = m.sample(17);
  if (state.range(0) != 0) m.cache(c);
  double r = 1e-1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.ball_count(c, r));
    r = r > 1e-3 ? r * 0.9 : 1e-1;
  }
  state.SetLabel(state.range(0) != 0 ? "cached" : "scan");
}
BENCHMARK(BM_BallCount)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
