#include <random>

#include <benchmark/benchmark.h>

#include "dfovu/driver.hpp"
#include "dfovu/greybox.hpp"
#include "dfovu/qpkernels.hpp"
#include "dfovu/stencil.hpp"

using namespace dfovu;

namespace {

CutSet random_cuts(int k, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CutSet c;
  for (int i = 0; i < k; ++i) {
    Vector v(n);
    for (auto& x : v) x = g(rng);
    c.add(v, g(rng));
  }
  return c;
}

void BM_Evaluate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto spec = generate_random(n, n / 2, 1);
  GreyBox box(spec);
  const Vector x = Vector::Constant(n, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(box.evaluate(x).fmax);
}
BENCHMARK(BM_Evaluate)->Arg(10)->Arg(20)->Arg(50);

void BM_ProxPl(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto cuts = random_cuts(k, 10, 2);
  const Vector z0 = Vector::Zero(10);
  for (auto _ : state) benchmark::DoNotOptimize(prox_pl(cuts, z0, 3.0).z.data());
}
BENCHMARK(BM_ProxPl)->Arg(2)->Arg(8)->Arg(20)->Arg(40);

void BM_FirstOrder(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto spec = generate_random(n, n / 2, 3);
  GreyBox box(spec);
  const Vector x = Vector::Constant(n, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(approximate_first_order(box, x, 1e-3).g_eps.data());
}
BENCHMARK(BM_FirstOrder)->Arg(10)->Arg(20)->Arg(50);

void BM_Solve(benchmark::State& state) {
  const auto spec = generate_random(10, 5, 4);
  const Vector x0 = Vector::Constant(10, 0.5);
  const bool u = state.range(0) != 0;
  for (auto _ : state) {
    GreyBox box(spec);
    const auto rep = u ? dfo_vu_solve(box, x0, SolverConfig{}) : baseline_bundle_solve(box, x0, SolverConfig{});
    benchmark::DoNotOptimize(rep.f_final);
  }
}
BENCHMARK(BM_Solve)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
