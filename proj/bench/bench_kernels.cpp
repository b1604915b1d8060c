// OpenMP convolution against the serial reference. Pass --benchmark_filter to pick a group.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "hypercyc/measure.hpp"

using namespace hypercyc;

namespace {

struct Inputs {
  Group G;
  SparseMeasure a, b;
};

Inputs make(GroupSpec spec, int na, int nb) {
  Group G(spec);
  auto rho = step_distribution(G);
  auto a = convolution_power(G, rho, na);
  auto b = convolution_power(G, rho, nb);
  return {G, std::move(a), std::move(b)};
}

const Inputs& inputs(int which) {
  static const Inputs f2 = make(GroupSpec::free(2), 5, 4);
  static const Inputs z3 = make(GroupSpec::lattice(3), 8, 6);
  static const Inputs h = make(GroupSpec::heisenberg(), 6, 6);
  return which == 0 ? f2 : which == 1 ? z3 : h;
}

const char* kNames[] = {"F2", "Z3", "H3"};

void BM_convolve_serial(benchmark::State& st) {
  const auto& in = inputs(static_cast<int>(st.range(0)));
  st.SetLabel(kNames[st.range(0)]);
  for (auto _ : st) benchmark::DoNotOptimize(serial::convolve(in.G, in.a, in.b));
  st.counters["pairs"] = static_cast<double>(in.a.size() * in.b.size());
}

void BM_convolve_omp(benchmark::State& st) {
  const auto& in = inputs(static_cast<int>(st.range(0)));
  const int threads = static_cast<int>(st.range(1));
  st.SetLabel(kNames[st.range(0)]);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  for (auto _ : st) benchmark::DoNotOptimize(convolve(in.G, in.a, in.b));
  omp_set_num_threads(saved);
  st.counters["threads"] = threads;
  st.counters["pairs"] = static_cast<double>(in.a.size() * in.b.size());
}

void thread_args(benchmark::internal::Benchmark* b) {
  const int hw = omp_get_max_threads();
  for (int g = 0; g < 3; ++g)
    for (int t = 1; t <= hw; t *= 2) b->Args({g, t});
}

void BM_weight_table(benchmark::State& st) {
  Group G(GroupSpec::free(2));
  const int n_max = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(build_weight(G, {0.5, n_max}));
}

}  // namespace

BENCHMARK(BM_convolve_serial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_convolve_omp)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_weight_table)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
