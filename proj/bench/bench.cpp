// Serial reference vs OpenMP kernels on the sampling-heavy operations.

#include "spheresep/chart.hpp"
#include "spheresep/integrability.hpp"
#include "spheresep/sampling.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

using namespace spheresep;

namespace {

std::vector<double> spread(int n) {
  std::vector<double> e(static_cast<std::size_t>(n + 1));
  std::iota(e.begin(), e.end(), 0.0);
  for (auto& v : e) v = v * v + v;
  return e;
}

template <Exec E>
void verify(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto f = elliptic_form(spread(n)).form();
  for (auto _ : state) benchmark::DoNotOptimize(verify_form(f, 256, 1, {}, E));
}

template <Exec E>
void extract(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto f = elliptic_form(spread(n)).form();
  for (auto _ : state) benchmark::DoNotOptimize(stackel_from_killing(f, default_sample_count(n), 1, {}, E));
}

template <Exec E>
void chart_system(benchmark::State& state) {
  const int leaves = static_cast<int>(state.range(0));
  const auto d = DressedTree::with_random_params(RootedPlanarTree::corolla(leaves), 3);
  for (auto _ : state) benchmark::DoNotOptimize(stackel_of_chart(d, default_sample_count(leaves - 1), 1, {}, E));
}

}  // namespace

BENCHMARK(verify<Exec::serial>)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK(verify<Exec::parallel>)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(extract<Exec::serial>)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK(extract<Exec::parallel>)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(chart_system<Exec::serial>)->DenseRange(3, 6)->Unit(benchmark::kMicrosecond);
BENCHMARK(chart_system<Exec::parallel>)->DenseRange(3, 6)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
