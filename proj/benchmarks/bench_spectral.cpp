#include <benchmark/benchmark.h>

#include "fraclab/spectral.hpp"
#include "fraclab/synth.hpp"

using namespace fraclab;

static void BM_ForwardInverse1D(benchmark::State& state) {
  GridSpec g(1, static_cast<int>(state.range(0)), 4.0);
  const ScalarField f = random_smooth_field(g, 1, g.n / 8);
  for (auto _ : state) benchmark::DoNotOptimize(inverse(forward(f)));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_ForwardInverse1D)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_FractionalLaplacian2D(benchmark::State& state) {
  GridSpec g(2, static_cast<int>(state.range(0)), 4.0);
  const ScalarField f = random_smooth_field(g, 2, g.n / 8);
  for (auto _ : state) benchmark::DoNotOptimize(fractional_laplacian(f, 1.0));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_FractionalLaplacian2D)->Arg(128)->Arg(256)->Arg(512);

static void BM_Semigroup2D(benchmark::State& state) {
  GridSpec g(2, static_cast<int>(state.range(0)), 4.0);
  const ScalarField f = random_smooth_field(g, 3, g.n / 8);
  for (auto _ : state) benchmark::DoNotOptimize(diffusion_semigroup(f, 1.0, 0.01));
}
BENCHMARK(BM_Semigroup2D)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
