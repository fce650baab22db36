#include <benchmark/benchmark.h>

#include <tlasso/rng.hpp>
#include <tlasso/sets.hpp>

using namespace tlasso;

namespace {

void run_projection(benchmark::State& state, const ConstraintSet& set) {
  Rng rng(1);
  const Vector p = 3.0 * rng.normal_vector(set.dim());
  for (auto _ : state) benchmark::DoNotOptimize(project(set, p));
  state.SetItemsProcessed(state.iterations() * set.dim());
}

void BM_ProjectL1(benchmark::State& state) { run_projection(state, ConstraintSet::l1_ball(state.range(0), 1.0)); }
void BM_ProjectL2(benchmark::State& state) { run_projection(state, ConstraintSet::l2_ball(state.range(0), 1.0)); }
void BM_ProjectTopK(benchmark::State& state) {
  run_projection(state, ConstraintSet::top_k(state.range(0), state.range(0) / 16 + 1));
}

}  // namespace

BENCHMARK(BM_ProjectL1)->RangeMultiplier(4)->Range(64, 16384);
BENCHMARK(BM_ProjectL2)->RangeMultiplier(4)->Range(64, 16384);
BENCHMARK(BM_ProjectTopK)->RangeMultiplier(4)->Range(64, 16384);
