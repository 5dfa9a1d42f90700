#include <benchmark/benchmark.h>

#include "fraclab/solver.hpp"
#include "fraclab/synth.hpp"
#include "fraclab/velocity.hpp"

using namespace fraclab;

static void BM_UpwindStep(benchmark::State& state) {
  GridSpec g(2, static_cast<int>(state.range(0)), 4.0);
  VelocityModel model{VelocityKind::composite, 0.5, 0.8, 0.5, 0.5, 5};
  const VectorField v = build_velocity(model, g);
  const ScalarField psi = positivized(random_smooth_field(g, 7, g.n / 8));
  for (auto _ : state)
    benchmark::DoNotOptimize(step_advect_conservative(psi, v, 0.005));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_UpwindStep)->Arg(128)->Arg(256)->Arg(512);

static void BM_DualSolve1D(benchmark::State& state) {
  GridSpec g(1, 1024, 4.0);
  VelocityModel model{VelocityKind::composite, 0.4, 0.6, 0.8, 0.5, 21};
  const VectorField v = build_velocity(model, g);
  const ScalarField psi = positivized(random_smooth_field(g, 9, 20));
  SolverConfig cfg;
  cfg.alpha = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_dual(psi, v, 0.25, cfg));
}
BENCHMARK(BM_DualSolve1D);
