#include <benchmark/benchmark.h>

#include "fraclab/atoms.hpp"
#include "fraclab/synth.hpp"

using namespace fraclab;

static void BM_Membership(benchmark::State& state) {
  GridSpec g(2, static_cast<int>(state.range(0)), 4.0);
  AtomParams prm;
  const Atom atom = build_canonical_atom(g, 0.25, prm);
  for (auto _ : state)
    benchmark::DoNotOptimize(atom_membership(atom.field, atom.r, prm.p, prm));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_Membership)->Arg(128)->Arg(256)->Arg(512);

static void BM_BuildCanonical(benchmark::State& state) {
  GridSpec g(1, 1024, 4.0);
  AtomParams prm;
  for (auto _ : state) benchmark::DoNotOptimize(build_canonical_atom(g, 0.125, prm));
}
BENCHMARK(BM_BuildCanonical);
