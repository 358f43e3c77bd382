// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace freqcache {

using Complex = std::complex<double>;

/// Unnormalized 1-D DFT of arbitrary length (mixed-radix Cooley-Tukey,
/// direct summation for prime factors). `inverse` flips the twiddle sign;
/// scaling is left to the caller.
void fft_inplace(std::span<Complex> data, bool inverse);

/// Unitary 2-D DFT of a row-major rows x cols buffer: both directions are
/// scaled by 1/sqrt(rows * cols), so Parseval holds with constant 1.
void fft2_unitary(std::span<Complex> data, std::size_t rows, std::size_t cols,
                  bool inverse);

}  // namespace freqcache
