// OpenMP kernels against the serial reference on the same inputs.

#include <benchmark/benchmark.h>

#include "nss/initial.hpp"
#include "nss/kernels.hpp"
#include "nss/model.hpp"
#include "nss/reference.hpp"
#include "nss/spectral.hpp"
#include "nss/stepper.hpp"

namespace {

using namespace nss;

GridSpec grid_for(const benchmark::State& state) {
  return GridSpec(static_cast<int>(state.range(0)), 12.8);
}

void BM_ForwardFast(benchmark::State& state) {
  const auto g = grid_for(state);
  const SpectralGrid ops(g);
  const auto u = random_field(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ops.forward(u));
}

void BM_ForwardReference(benchmark::State& state) {
  const auto u = random_field(grid_for(state), 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::forward(u));
}

void BM_BetaFast(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto v = SpectralGrid(g).gradient(random_field(g, 2));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::beta(v));
}

void BM_BetaReference(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto v = SpectralGrid(g).gradient(random_field(g, 2));
  for (auto _ : state) benchmark::DoNotOptimize(reference::beta(v));
}

void BM_NonlinearFast(benchmark::State& state) {
  const auto g = grid_for(state);
  const SpectralGrid ops(g);
  const auto u = random_field(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(nonlinear_divergence(ops, u));
}

void BM_NonlinearReference(benchmark::State& state) {
  const auto u = random_field(grid_for(state), 3);
  for (auto _ : state) benchmark::DoNotOptimize(reference::nonlinear_divergence(u));
}

SchemeConfig scheme(const GridSpec& g) {
  SchemeConfig c;
  c.params = {0.02, 12.8, 0.5};
  c.grid = g;
  c.dt_schedule = {{1.0, 0.01}};
  return c;
}

void BM_StepFast(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto c = scheme(g);
  const SpectralGrid ops(g);
  const auto w = init_history(random_field(g, 4), c, 0.01);
  Bdf3Stepper stepper(ops, c, w, 0.01);
  for (auto _ : state) {
    stepper.reset(w);
    stepper.advance();
    benchmark::DoNotOptimize(stepper.window().u_n);
  }
}

void BM_StepReference(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto c = scheme(g);
  const auto w = init_history(random_field(g, 4), c, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(reference::step(w, c, 0.01));
}

}  // namespace

BENCHMARK(BM_ForwardFast)->Arg(32)->Arg(64);
BENCHMARK(BM_ForwardReference)->Arg(32)->Arg(64);
BENCHMARK(BM_BetaFast)->Arg(64)->Arg(256);
BENCHMARK(BM_BetaReference)->Arg(64)->Arg(256);
BENCHMARK(BM_NonlinearFast)->Arg(32)->Arg(64);
BENCHMARK(BM_NonlinearReference)->Arg(32)->Arg(64);
BENCHMARK(BM_StepFast)->Arg(32)->Arg(64);
BENCHMARK(BM_StepReference)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
