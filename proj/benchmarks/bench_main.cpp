#include "lagcarma/estimation.hpp"
#include "lagcarma/mixing.hpp"
#include "lagcarma/pricing.hpp"
#include "lagcarma/quadrature.hpp"
#include "lagcarma/repro.hpp"
#include "lagcarma/simulation.hpp"
#include "lagcarma/state_filter.hpp"
#include "lagcarma/transition.hpp"
#include "lagcarma/variance_grid.hpp"

#include <benchmark/benchmark.h>

using namespace lagcarma;

namespace {

TimeSeries car21_sample(double T) {
  TimeSeries obs;
  for (auto [t, y] : simulate_observations(CarmaSpec({1.35, 0.05}, {0.2, 1.0}), MixingLaw::gamma(1.0, 1.0), T, 0.01,
                                           50, 1, Eigen::VectorXd::Zero(2))) {
    obs.push_back({t, y});
  }
  return obs;
}

}  // namespace

static void BM_BuildRule(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_rule(order));
}
BENCHMARK(BM_BuildRule)->Arg(5)->Arg(40)->Arg(150);

static void BM_Discretize(benchmark::State& state) {
  const auto law = MixingLaw::inverse_gaussian(1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(discretize(law, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Discretize)->Arg(5)->Arg(40);

static void BM_EnumerateAtoms(benchmark::State& state) {
  const auto grid = build_grid(CarmaSpec({0.25}, {1.0}), 0.0, 0.25, 6);
  const auto mix = increment_mixing(MixingLaw::gamma(1.0, 1.0), grid.step, 2);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_atoms(grid, mix, std::size_t{1} << 16));
}
BENCHMARK(BM_EnumerateAtoms)->Unit(benchmark::kMillisecond);

static void BM_ConvolveAtoms(benchmark::State& state) {
  const auto spec = CarmaSpec({1.4, 0.5}, {0.2, 1.0});
  const auto grid = build_grid(spec, 0.0, 1.0 / 12, static_cast<int>(state.range(0)));
  const auto mix = increment_mixing(MixingLaw::gamma(1.0, 1.0), grid.step, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(convolve_atoms(grid, mix, PruningSettings{1e-3, 1e-14}));
}
BENCHMARK(BM_ConvolveAtoms)->Args({8, 4})->Args({8, 16})->Unit(benchmark::kMillisecond);

static void BM_KalmanFilter(benchmark::State& state) {
  const auto obs = car21_sample(1000.0);
  const CarmaSpec spec({1.35, 0.05}, {0.2, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(kalman_filter(spec, 1.0, obs));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(obs.size()));
}
BENCHMARK(BM_KalmanFilter)->Unit(benchmark::kMillisecond);

static void BM_GlLogLikelihood(benchmark::State& state) {
  const auto obs = car21_sample(1000.0);
  const CarmaSpec spec({1.35, 0.05}, {0.2, 1.0});
  FitConfig config;
  config.n = 2;
  config.m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tcbm_loglik(spec, MixingLaw::gamma(1.0, 1.0), obs, config));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(obs.size()));
}
BENCHMARK(BM_GlLogLikelihood)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_FuturesOptionStrip(benchmark::State& state) {
  const auto setup = futures_reference_setup();
  const auto strikes = option_strike_grid();
  for (auto _ : state) benchmark::DoNotOptimize(futures_option_strip(setup, 1.0 / 12, 2.0 / 12, strikes));
}
BENCHMARK(BM_FuturesOptionStrip)->Unit(benchmark::kMillisecond);

static void BM_NvmmPrice(benchmark::State& state) {
  const NvmmPricingSetup setup{MixingLaw::gamma(1.0, 1.0), -0.5, 1.0, 1.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(nvmm_european_price(setup, OptionKind::call, 1.0, 1.0, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_NvmmPrice)->Arg(20)->Arg(150);
BENCHMARK_MAIN();
