// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/kernels.hpp"

namespace freqcache::kernels::serial {

double sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

double sum_squares(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy(std::span<const double> a, double scale, std::span<const double> b,
          std::span<double> out) {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + scale * b[i];
}

void avg_pool(std::span<const double> in, const Shape& s,
              const DownsampleFactors& f, std::span<double> out) {
  const Shape o = downsampled_shape(s, f);
  const double inv = 1.0 / static_cast<double>(f.volume());
  for (std::size_t t = 0; t < o.t; ++t)
    for (std::size_t h = 0; h < o.h; ++h)
      for (std::size_t w = 0; w < o.w; ++w)
        for (std::size_t c = 0; c < o.c; ++c) {
          double acc = 0.0;
          for (std::size_t dt = 0; dt < f.temporal; ++dt)
            for (std::size_t dh = 0; dh < f.height; ++dh)
              for (std::size_t dw = 0; dw < f.width; ++dw)
                acc += in[s.index(t * f.temporal + dt, h * f.height + dh,
                                  w * f.width + dw, c)];
          out[o.index(t, h, w, c)] = acc * inv;
        }
}

}  // namespace freqcache::kernels::serial
