// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP counterparts. The argument
// is the spatial side of a (16, side, side, 4) latent.

#include <benchmark/benchmark.h>

#include "freqcache/kernels.hpp"

namespace {

using namespace freqcache;

Shape bench_shape(const benchmark::State& state) {
  const auto side = static_cast<int>(state.range(0));
  return Shape{16, side, side, 4};
}

template <double (*Kernel)(std::span<const double>, std::span<const double>)>
void BM_SumSquaredDiff(benchmark::State& state) {
  const Shape s = bench_shape(state);
  const Tensor4 a = Tensor4::random_normal(s, 1), b = Tensor4::random_normal(s, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a.data(), b.data()));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(2 * a.size() * sizeof(double)));
}

template <double (*Kernel)(std::span<const double>)>
void BM_SumSquares(benchmark::State& state) {
  const Tensor4 a = Tensor4::random_normal(bench_shape(state), 1);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a.data()));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(a.size() * sizeof(double)));
}

template <void (*Kernel)(std::span<const double>, double, std::span<const double>, std::span<double>)>
void BM_Axpy(benchmark::State& state) {
  const Shape s = bench_shape(state);
  const Tensor4 a = Tensor4::random_normal(s, 1), b = Tensor4::random_normal(s, 2);
  Tensor4 out(s);
  for (auto _ : state) {
    Kernel(a.data(), 0.02, b.data(), out.mutable_data());
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(3 * a.size() * sizeof(double)));
}

template <void (*Kernel)(std::span<const double>, const Shape&, const DownsampleFactors&, std::span<double>)>
void BM_AvgPool(benchmark::State& state) {
  const Shape s = bench_shape(state);
  const DownsampleFactors f{2, 4, 4};
  const Tensor4 a = Tensor4::random_normal(s, 1);
  Tensor4 out(downsampled_shape(s, f));
  for (auto _ : state) {
    Kernel(a.data(), s, f, out.mutable_data());
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(a.size() * sizeof(double)));
}

#define FREQCACHE_PAIR(bm, fn)                                                   \
  BENCHMARK(bm<kernels::serial::fn>)->Name(#fn "/serial")->Arg(32)->Arg(64)->Arg(128); \
  BENCHMARK(bm<kernels::parallel::fn>)->Name(#fn "/openmp")->Arg(32)->Arg(64)->Arg(128)->UseRealTime()

FREQCACHE_PAIR(BM_SumSquares, sum_squares);
FREQCACHE_PAIR(BM_SumSquaredDiff, sum_squared_diff);
FREQCACHE_PAIR(BM_Axpy, axpy);
FREQCACHE_PAIR(BM_AvgPool, avg_pool);

}  // namespace

BENCHMARK_MAIN();
