// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/fft.hpp"

#include <cmath>
#include <numbers>

namespace freqcache {
namespace {

std::size_t smallest_factor(std::size_t n) {
  if (n % 2 == 0) return 2;
  for (std::size_t p = 3; p * p <= n; p += 2)
    if (n % p == 0) return p;
  return n;
}

Complex twiddle(std::size_t k, std::size_t n, double sign) {
  // Reduce the index first so the angle stays in [0, 2*pi).
  const double angle =
      sign * 2.0 * std::numbers::pi * static_cast<double>(k % n) /
      static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

void transform(const Complex* in, std::size_t stride, Complex* out,
               std::size_t n, double sign, Complex* scratch) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t p = smallest_factor(n);
  if (p == n) {
    for (std::size_t k = 0; k < n; ++k) {
      Complex acc = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        acc += in[j * stride] * twiddle(j * k, n, sign);
      out[k] = acc;
    }
    return;
  }
  const std::size_t m = n / p;
  // Sub-transforms of the p decimated sequences land in scratch[r*m ..].
  for (std::size_t r = 0; r < p; ++r)
    transform(in + r * stride, stride * p, scratch + r * m, m, sign, out);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t km = k % m;
    Complex acc = 0.0;
    for (std::size_t r = 0; r < p; ++r)
      acc += scratch[r * m + km] * twiddle(r * k, n, sign);
    out[k] = acc;
  }
}

}  // namespace

void fft_inplace(std::span<Complex> data, bool inverse) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  std::vector<Complex> input(data.begin(), data.end());
  std::vector<Complex> scratch(n);
  // Each level writes sub-results into its scratch and lends `out` to the
  // level below; `out` is only written once the sub-transforms are done.
  transform(input.data(), 1, data.data(), n, inverse ? 1.0 : -1.0,
            scratch.data());
}

void fft2_unitary(std::span<Complex> data, std::size_t rows, std::size_t cols,
                  bool inverse) {
  for (std::size_t r = 0; r < rows; ++r)
    fft_inplace(data.subspan(r * cols, cols), inverse);
  std::vector<Complex> column(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = data[r * cols + c];
    fft_inplace(column, inverse);
    for (std::size_t r = 0; r < rows; ++r) data[r * cols + c] = column[r];
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows * cols));
  for (Complex& v : data) v *= scale;
}

}  // namespace freqcache
