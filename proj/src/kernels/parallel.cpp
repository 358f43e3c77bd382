// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include "freqcache/kernels.hpp"

namespace freqcache::kernels::parallel {
namespace {

// Partial sums over fixed chunks, combined serially in chunk order.
template <typename ChunkFn>
double chunked_reduce(std::size_t n, ChunkFn&& chunk_sum) {
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  if (chunks <= 1) return n == 0 ? 0.0 : chunk_sum(0, n);
  std::vector<double> partial(chunks);
  const auto nc = static_cast<long long>(chunks);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (long long k = 0; k < nc; ++k) {
    const std::size_t lo = static_cast<std::size_t>(k) * kReductionChunk;
    const std::size_t hi = std::min(n, lo + kReductionChunk);
    partial[static_cast<std::size_t>(k)] = chunk_sum(lo, hi);
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

}  // namespace

double sum(std::span<const double> x) {
  return chunked_reduce(x.size(), [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += x[i];
    return acc;
  });
}

double sum_squares(std::span<const double> x) {
  return chunked_reduce(x.size(), [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += x[i] * x[i];
    return acc;
  });
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  return chunked_reduce(a.size(), [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double d = a[i] - b[i];
      acc += d * d;
    }
    return acc;
  });
}

void axpy(std::span<const double> a, double scale, std::span<const double> b,
          std::span<double> out) {
  const auto n = static_cast<long long>(a.size());
#pragma omp parallel for simd schedule(static) if (a.size() >= kParallelThreshold)
  for (long long i = 0; i < n; ++i) out[i] = a[i] + scale * b[i];
}

void avg_pool(std::span<const double> in, const Shape& s,
              const DownsampleFactors& f, std::span<double> out) {
  const Shape o = downsampled_shape(s, f);
  const double inv = 1.0 / static_cast<double>(f.volume());
  const auto rows = static_cast<long long>(o.t * o.h);
#pragma omp parallel for schedule(static) if (in.size() >= kParallelThreshold)
  for (long long row = 0; row < rows; ++row) {
    const std::size_t t = static_cast<std::size_t>(row) / o.h;
    const std::size_t h = static_cast<std::size_t>(row) % o.h;
    for (std::size_t w = 0; w < o.w; ++w)
      for (std::size_t c = 0; c < o.c; ++c) {
        // Same accumulation order as the serial reference.
        double acc = 0.0;
        for (std::size_t dt = 0; dt < f.temporal; ++dt)
          for (std::size_t dh = 0; dh < f.height; ++dh)
            for (std::size_t dw = 0; dw < f.width; ++dw)
              acc += in[s.index(t * f.temporal + dt, h * f.height + dh,
                                w * f.width + dw, c)];
        out[o.index(t, h, w, c)] = acc * inv;
      }
  }
}

}  // namespace freqcache::kernels::parallel
