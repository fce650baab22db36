#include <benchmark/benchmark.h>

#include <tlasso/experiments.hpp>
#include <tlasso/model.hpp>
#include <tlasso/solver.hpp>

using namespace tlasso;

namespace {

// One corrupted sign-link solve with l1 anchor radii; range(0) is m, n = 128.
void BM_SolveSign(benchmark::State& state) {
  InstanceSpec spec;
  spec.n = 128;
  spec.m = state.range(0);
  spec.s = 4;
  spec.k = 4;
  spec.link = LinkFunction::sign();
  spec.seed = 3;
  const auto inst = generate_instance(spec);
  const double mu = link_params(spec.link).mu;
  const auto sx = resolve_set("l1:anchor", mu * inst.x_star);
  const auto sv = resolve_set("l1:anchor", inst.v_star);
  SolveOptions opts;
  opts.record_trace = false;
  int iterations = 0;
  for (auto _ : state) {
    const auto result = solve_tlasso(inst, sx, sv, opts);
    iterations = result.iterations;
    benchmark::DoNotOptimize(result.x_hat.data());
  }
  state.counters["iterations"] = iterations;
}

void BM_Lipschitz(benchmark::State& state) {
  InstanceSpec spec;
  spec.n = 128;
  spec.m = state.range(0);
  spec.seed = 4;
  const auto inst = generate_instance(spec);
  for (auto _ : state) benchmark::DoNotOptimize(lipschitz_estimate(inst, 200));
}

}  // namespace

BENCHMARK(BM_SolveSign)->Arg(250)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lipschitz)->Arg(250)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
