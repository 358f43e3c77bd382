// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace freqcache {

/// Latent shape (frames, height, width, channels). Data is stored row-major
/// in exactly this order, so element (t, h, w, c) lives at
/// ((t * H + h) * W + w) * C + c.
struct Shape {
  std::size_t t = 1;
  std::size_t h = 1;
  std::size_t w = 1;
  std::size_t c = 1;

  constexpr std::size_t size() const { return t * h * w * c; }
  /// Token count used by the cost model: one token per (frame, row, column).
  constexpr std::size_t tokens() const { return t * h * w; }
  constexpr std::size_t index(std::size_t ti, std::size_t hi, std::size_t wi,
                              std::size_t ci) const {
    return ((ti * h + hi) * w + wi) * c + ci;
  }
  friend constexpr bool operator==(const Shape&, const Shape&) = default;
  std::string to_string() const;
};

/// Per-axis mean-pooling factors for trial inference.
struct DownsampleFactors {
  std::size_t temporal = 2;
  std::size_t height = 4;
  std::size_t width = 4;

  constexpr std::size_t volume() const { return temporal * height * width; }
  friend constexpr bool operator==(const DownsampleFactors&,
                                   const DownsampleFactors&) = default;
  std::string to_string() const;
};

/// Throws DimensionError naming the first axis the factors do not divide.
void check_divisible(const Shape& shape, const DownsampleFactors& f);
Shape downsampled_shape(const Shape& shape, const DownsampleFactors& f);

/// Dense rank-4 tensor of finite 64-bit reals.
class Tensor4 {
 public:
  Tensor4() : Tensor4(Shape{}) {}
  explicit Tensor4(Shape shape, double fill = 0.0);
  /// Throws DimensionError on a length mismatch or zero-sized axis, and
  /// DomainError on non-finite input.
  Tensor4(Shape shape, std::vector<double> data);

  static Tensor4 random_normal(Shape shape, std::uint64_t seed);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t t, std::size_t h, std::size_t w, std::size_t c) const {
    return data_[shape_.index(t, h, w, c)];
  }
  double& at(std::size_t t, std::size_t h, std::size_t w, std::size_t c) {
    return data_[shape_.index(t, h, w, c)];
  }

  bool all_finite() const;

  /// Bitwise equality of shape and every element.
  bool identical(const Tensor4& other) const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

void check_same_shape(const Tensor4& a, const Tensor4& b, const char* what);

Tensor4 avg_downsample(const Tensor4& x, const DownsampleFactors& f);
double sum_squares(const Tensor4& x);
double l2_norm(const Tensor4& x);
double mean(const Tensor4& x);
double mse(const Tensor4& a, const Tensor4& b);
/// Elementwise a + scale * b.
Tensor4 axpy(const Tensor4& a, double scale, const Tensor4& b);
Tensor4 scaled(const Tensor4& x, double scale);
/// Elementwise feature + delta; the residual connection every block path
/// shares, so full and cached forwards round identically.
Tensor4 add_residual(const Tensor4& feature, const Tensor4& delta);

}  // namespace freqcache
