// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "freqcache/fft.hpp"
#include "freqcache/tensor.hpp"

namespace freqcache {

/// Forward and inverse transforms are each scaled by 1/sqrt(H*W).
inline constexpr const char* kFftNormalization = "unitary";
/// Ratio between a frequency-domain band norm and the spatial-domain norm of
/// the same band after inverse transform. 1 under the unitary convention.
inline constexpr double kParsevalConstant = 1.0;
inline constexpr double kDefaultRadiusFraction = 0.2;

/// Signed frequency of DFT bin `index` in a length-`n` transform: bins above
/// n/2 map to negative frequencies.
double signed_frequency(std::size_t index, std::size_t n);

/// Centered circular low-pass region over (H, W) frequency bins.
class FrequencyMask {
 public:
  FrequencyMask(std::size_t height, std::size_t width, double radius);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  double radius() const { return radius_; }
  bool is_low(std::size_t u, std::size_t v) const {
    return low_[u * width_ + v] != 0;
  }
  std::size_t low_count() const;

 private:
  std::size_t height_;
  std::size_t width_;
  double radius_;
  std::vector<std::uint8_t> low_;
};

/// Mask with radius (1/5) * min(h, w).
FrequencyMask default_mask(std::size_t h, std::size_t w);
FrequencyMask mask_with_fraction(std::size_t h, std::size_t w,
                                 double radius_fraction);

/// Complex coefficients laid out like a Tensor4: (t, u, v, c) with (u, v) the
/// frequency bins of each (frame, channel) slice.
struct Spectrum {
  Shape shape;
  std::vector<Complex> coeff;
};

struct SpectrumPair {
  Spectrum low;   // masked-in bins, zeros elsewhere
  Spectrum high;  // the complement
};

Spectrum fft2(const Tensor4& x);
/// Inverse transform; returns the real part (the imaginary part vanishes for
/// Hermitian-symmetric spectra, which every masked real input produces).
Tensor4 ifft2_real(const Spectrum& s);

SpectrumPair fft2_split(const Tensor4& x, const FrequencyMask& mask);
Spectrum recombine(const SpectrumPair& pair);

enum class Band { low, high };
/// Spatial-domain projection of x onto one band.
Tensor4 band_pass(const Tensor4& x, const FrequencyMask& mask, Band band);

struct BandNorms {
  double full = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Norms of the full, low, and high bands of spectrum(a) - spectrum(b),
/// summed over all frames and channels.
BandNorms band_difference(const Tensor4& a, const Tensor4& b,
                          const FrequencyMask& mask);

double lfd(const Tensor4& a, const Tensor4& b, const FrequencyMask& mask);
double hfd(const Tensor4& a, const Tensor4& b, const FrequencyMask& mask);

double spectrum_norm(const Spectrum& s);

}  // namespace freqcache
