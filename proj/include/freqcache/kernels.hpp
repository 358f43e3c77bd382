// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Data-parallel inner loops. Every kernel has a plain serial reference and
// an OpenMP version. Reductions in the OpenMP version sum fixed-size chunks
// and then combine the partials in chunk order, so results are bitwise
// independent of the worker count. Elementwise kernels are bitwise equal to
// their serial references.

#pragma once

#include <cstddef>
#include <span>

#include "freqcache/tensor.hpp"

namespace freqcache::kernels {

inline constexpr std::size_t kReductionChunk = 1024;
// Below this many elements the OpenMP kernels stay on one thread.
inline constexpr std::size_t kParallelThreshold = 1 << 14;

namespace serial {

double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
void axpy(std::span<const double> a, double scale, std::span<const double> b,
          std::span<double> out);
void avg_pool(std::span<const double> in, const Shape& in_shape,
              const DownsampleFactors& f, std::span<double> out);

}  // namespace serial

namespace parallel {

double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
void axpy(std::span<const double> a, double scale, std::span<const double> b,
          std::span<double> out);
void avg_pool(std::span<const double> in, const Shape& in_shape,
              const DownsampleFactors& f, std::span<double> out);

}  // namespace parallel

}  // namespace freqcache::kernels
