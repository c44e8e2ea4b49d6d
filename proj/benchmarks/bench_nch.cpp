#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "nch/energy.hpp"
#include "nch/kernel.hpp"
#include "nch/spectral.hpp"
#include "nch/stepper.hpp"

namespace {

nch::GridFunction random_field(const nch::PeriodicGrid& g) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = d(rng);
  return nch::GridFunction(g, std::move(v));
}

nch::PeriodicGrid grid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  return nch::PeriodicGrid(M_PI, M_PI, n, n);
}

void BM_ForwardTransform(benchmark::State& state) {
  const auto g = grid(state);
  const auto f = random_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(nch::forward(f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForwardTransform)->RangeMultiplier(2)->Range(16, 512);

void BM_Laplacian(benchmark::State& state) {
  const auto g = grid(state);
  const auto f = random_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(nch::laplacian(f));
}
BENCHMARK(BM_Laplacian)->RangeMultiplier(2)->Range(16, 512);

void BM_ConvolveFft(benchmark::State& state) {
  const auto g = grid(state);
  const auto k = nch::make_gaussian_kernel(g, 0.2);
  const auto f = random_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(nch::convolve(k, f));
}
BENCHMARK(BM_ConvolveFft)->RangeMultiplier(2)->Range(16, 512);

void BM_ConvolveDirect(benchmark::State& state) {
  const auto g = grid(state);
  const auto k = nch::make_gaussian_kernel(g, g.half_width_x() / 4);
  const auto f = random_field(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nch::convolve(k, f, nch::ConvolutionBackend::direct));
  }
}
BENCHMARK(BM_ConvolveDirect)->RangeMultiplier(2)->Range(8, 32);

void BM_Energy(benchmark::State& state) {
  const auto g = grid(state);
  const auto k = nch::make_gaussian_kernel(g, 0.2);
  const auto p = nch::make_model_params(0.5, k);
  const auto f = random_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(nch::energy(f, k, p));
}
BENCHMARK(BM_Energy)->RangeMultiplier(2)->Range(32, 512);

// One stateful step, the unit of work of every run.
void BM_SimulationAdvance(benchmark::State& state) {
  const auto g = grid(state);
  const auto k = nch::make_gaussian_kernel(g, 0.2);
  nch::SolverConfig cfg;
  cfg.dt = 1e-6;
  cfg.t_end = 1.0;
  cfg.params = nch::make_model_params(0.5, k);
  nch::Simulation sim(
      nch::GridFunction::sample(g, [](double x, double y) { return 0.05 * std::cos(x) * std::cos(y); }),
      k, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(sim.advance());
}
BENCHMARK(BM_SimulationAdvance)->RangeMultiplier(2)->Range(32, 512);

}  // namespace

BENCHMARK_MAIN();
