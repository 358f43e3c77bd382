// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/spectral.hpp"

#include <cmath>

#include "freqcache/error.hpp"

namespace freqcache {

double signed_frequency(std::size_t index, std::size_t n) {
  const auto i = static_cast<double>(index);
  return 2 * index > n ? i - static_cast<double>(n) : i;
}

FrequencyMask::FrequencyMask(std::size_t height, std::size_t width,
                             double radius)
    : height_(height), width_(width), radius_(radius) {
  if (height == 0 || width == 0) throw DimensionError("mask extent must be >= 1");
  if (!(radius >= 0.0)) throw ConfigError("mask radius must be >= 0");
  low_.resize(height * width);
  for (std::size_t u = 0; u < height; ++u) {
    const double fu = signed_frequency(u, height);
    for (std::size_t v = 0; v < width; ++v) {
      const double fv = signed_frequency(v, width);
      low_[u * width + v] = std::hypot(fu, fv) <= radius ? 1 : 0;
    }
  }
}

std::size_t FrequencyMask::low_count() const {
  std::size_t n = 0;
  for (auto b : low_) n += b;
  return n;
}

FrequencyMask default_mask(std::size_t h, std::size_t w) {
  return mask_with_fraction(h, w, kDefaultRadiusFraction);
}

FrequencyMask mask_with_fraction(std::size_t h, std::size_t w,
                                 double radius_fraction) {
  return FrequencyMask(h, w,
                       radius_fraction * static_cast<double>(std::min(h, w)));
}

namespace {

void check_mask(const Shape& s, const FrequencyMask& mask) {
  if (mask.height() != s.h || mask.width() != s.w) {
    throw DimensionError("frequency mask (" + std::to_string(mask.height()) +
                         "," + std::to_string(mask.width()) +
                         ") does not match tensor spatial extent (" +
                         std::to_string(s.h) + "," + std::to_string(s.w) + ")");
  }
}

// Runs `fn(slice_index, buffer)` over every (frame, channel) slice. Slices
// are independent, so the parallel loop is bitwise equal to a serial one.
template <typename Fn>
void for_each_slice(const Shape& s, Fn&& fn) {
  const auto slices = static_cast<long long>(s.t * s.c);
  const bool big = s.size() >= 4096;
#pragma omp parallel if (big)
  {
    std::vector<Complex> buf(s.h * s.w);
#pragma omp for schedule(static)
    for (long long k = 0; k < slices; ++k) fn(static_cast<std::size_t>(k), buf);
  }
}

void gather(const Shape& s, std::size_t slice, const double* src,
            std::vector<Complex>& buf) {
  const std::size_t t = slice / s.c, c = slice % s.c;
  for (std::size_t h = 0; h < s.h; ++h)
    for (std::size_t w = 0; w < s.w; ++w)
      buf[h * s.w + w] = src[s.index(t, h, w, c)];
}

}  // namespace

Spectrum fft2(const Tensor4& x) {
  const Shape& s = x.shape();
  Spectrum out{s, std::vector<Complex>(s.size())};
  for_each_slice(s, [&](std::size_t slice, std::vector<Complex>& buf) {
    gather(s, slice, x.data().data(), buf);
    fft2_unitary(buf, s.h, s.w, false);
    const std::size_t t = slice / s.c, c = slice % s.c;
    for (std::size_t u = 0; u < s.h; ++u)
      for (std::size_t v = 0; v < s.w; ++v)
        out.coeff[s.index(t, u, v, c)] = buf[u * s.w + v];
  });
  return out;
}

Tensor4 ifft2_real(const Spectrum& sp) {
  const Shape& s = sp.shape;
  Tensor4 out(s);
  auto o = out.mutable_data();
  for_each_slice(s, [&](std::size_t slice, std::vector<Complex>& buf) {
    const std::size_t t = slice / s.c, c = slice % s.c;
    for (std::size_t u = 0; u < s.h; ++u)
      for (std::size_t v = 0; v < s.w; ++v)
        buf[u * s.w + v] = sp.coeff[s.index(t, u, v, c)];
    fft2_unitary(buf, s.h, s.w, true);
    for (std::size_t h = 0; h < s.h; ++h)
      for (std::size_t w = 0; w < s.w; ++w)
        o[s.index(t, h, w, c)] = buf[h * s.w + w].real();
  });
  return out;
}

SpectrumPair fft2_split(const Tensor4& x, const FrequencyMask& mask) {
  check_mask(x.shape(), mask);
  Spectrum full = fft2(x);
  SpectrumPair pair{full, full};
  const Shape& s = full.shape;
  for (std::size_t t = 0; t < s.t; ++t)
    for (std::size_t u = 0; u < s.h; ++u)
      for (std::size_t v = 0; v < s.w; ++v)
        for (std::size_t c = 0; c < s.c; ++c) {
          const std::size_t i = s.index(t, u, v, c);
          if (mask.is_low(u, v))
            pair.high.coeff[i] = 0.0;
          else
            pair.low.coeff[i] = 0.0;
        }
  return pair;
}

Spectrum recombine(const SpectrumPair& pair) {
  if (pair.low.shape != pair.high.shape)
    throw DimensionError("recombine: band shapes differ");
  Spectrum out = pair.low;
  for (std::size_t i = 0; i < out.coeff.size(); ++i)
    out.coeff[i] += pair.high.coeff[i];
  return out;
}

Tensor4 band_pass(const Tensor4& x, const FrequencyMask& mask, Band band) {
  SpectrumPair pair = fft2_split(x, mask);
  return ifft2_real(band == Band::low ? pair.low : pair.high);
}

BandNorms band_difference(const Tensor4& a, const Tensor4& b,
                          const FrequencyMask& mask) {
  check_same_shape(a, b, "band_difference");
  check_mask(a.shape(), mask);
  const Shape& s = a.shape();
  const std::size_t slices = s.t * s.c;
  // Per-slice energies, merged in slice order below.
  std::vector<double> low(slices), high(slices);
  const Tensor4 diff = axpy(a, -1.0, b);
  for_each_slice(s, [&](std::size_t slice, std::vector<Complex>& buf) {
    gather(s, slice, diff.data().data(), buf);
    fft2_unitary(buf, s.h, s.w, false);
    double lo = 0.0, hi = 0.0;
    for (std::size_t u = 0; u < s.h; ++u)
      for (std::size_t v = 0; v < s.w; ++v) {
        const double e = std::norm(buf[u * s.w + v]);
        (mask.is_low(u, v) ? lo : hi) += e;
      }
    low[slice] = lo;
    high[slice] = hi;
  });
  double lo = 0.0, hi = 0.0;
  for (std::size_t k = 0; k < slices; ++k) {
    lo += low[k];
    hi += high[k];
  }
  return BandNorms{std::sqrt(lo + hi), std::sqrt(lo), std::sqrt(hi)};
}

double lfd(const Tensor4& a, const Tensor4& b, const FrequencyMask& mask) {
  return band_difference(a, b, mask).low;
}

double hfd(const Tensor4& a, const Tensor4& b, const FrequencyMask& mask) {
  return band_difference(a, b, mask).high;
}

double spectrum_norm(const Spectrum& s) {
  double acc = 0.0;
  for (const Complex& v : s.coeff) acc += std::norm(v);
  return std::sqrt(acc);
}

}  // namespace freqcache
