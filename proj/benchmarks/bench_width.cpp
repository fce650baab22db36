#include <benchmark/benchmark.h>

#include <tlasso/geometry.hpp>
#include <tlasso/rng.hpp>
#include <tlasso/sets.hpp>

using namespace tlasso;

namespace {

void BM_LocalSupportL1(benchmark::State& state) {
  const auto set = ConstraintSet::l1_ball(state.range(0), 1.0);
  Rng rng(2);
  const Vector g = rng.normal_vector(set.dim());
  for (auto _ : state) benchmark::DoNotOptimize(local_support_value(set, g, 0.3));
}

// Per-draw cost of the descent-cone support search at a sparse boundary anchor.
void BM_ConeSupport(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Vector ax = Vector::Zero(n);
  ax[0] = 0.6;
  ax[1] = -0.8;
  Vector av = Vector::Zero(n);
  av[2] = 1.0;
  const DescentCone cone(ConstraintSet::l1_ball(n, 1.4), ConstraintSet::l1_ball(n, 1.0), ax, av);
  Rng rng(3);
  const Vector g = rng.normal_vector(2 * n);
  for (auto _ : state) benchmark::DoNotOptimize(cone.support_value(g, rng));
}

void BM_WidthL2(benchmark::State& state) {
  const auto set = ConstraintSet::l2_ball(100, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_width_mc(set, static_cast<int>(state.range(0)), 1, 1));
}

}  // namespace

BENCHMARK(BM_LocalSupportL1)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_ConeSupport)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_WidthL2)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
