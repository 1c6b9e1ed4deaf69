// Serial reference kernels against their OpenMP counterparts.
//
//   hlc_bench_kernels --benchmark_filter=apply_phase

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hlc/kernels.hpp"

using namespace hlc::kernels;

namespace {

std::vector<cplx> field(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  return v;
}

std::vector<double> real_field(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1e-3 * static_cast<double>(i % 1000);
  return v;
}

template <bool Parallel>
void norm_squared_bench(benchmark::State& state) {
  const auto x = field(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Parallel ? omp::norm_squared(x) : serial::norm_squared(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void apply_phase_bench(benchmark::State& state) {
  auto x = field(static_cast<std::size_t>(state.range(0)));
  const auto v = real_field(x.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      omp::apply_phase(x, v, {}, 1e-3);
    else
      serial::apply_phase(x, v, {}, 1e-3);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void modulus_power_bench(benchmark::State& state) {
  const auto x = field(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(x.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      omp::modulus_power(x, 1.0, 1.5, out);
    else
      serial::modulus_power(x, 1.0, 1.5, out);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void lincomb3_bench(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto a = field(n), b = field(n), c = field(n);
  std::vector<cplx> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      omp::lincomb3(1.0, a, cplx(0, 2), b, -1.0, c, out);
    else
      serial::lincomb3(1.0, a, cplx(0, 2), b, -1.0, c, out);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

#define HLC_PAIR(fn)                                                   \
  BENCHMARK(fn<false>)->Name(#fn "/serial")->RangeMultiplier(16)->Range(1 << 10, 1 << 22); \
  BENCHMARK(fn<true>)->Name(#fn "/omp")->RangeMultiplier(16)->Range(1 << 10, 1 << 22)

HLC_PAIR(norm_squared_bench);
HLC_PAIR(apply_phase_bench);
HLC_PAIR(modulus_power_bench);
HLC_PAIR(lincomb3_bench);

BENCHMARK_MAIN();
