// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/tensor.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "freqcache/error.hpp"
#include "freqcache/kernels.hpp"

namespace freqcache {

std::string Shape::to_string() const {
  std::ostringstream os;
  os << "(" << t << "," << h << "," << w << "," << c << ")";
  return os.str();
}

std::string DownsampleFactors::to_string() const {
  std::ostringstream os;
  os << "(" << temporal << "," << height << "," << width << ")";
  return os.str();
}

void check_divisible(const Shape& shape, const DownsampleFactors& f) {
  auto check = [](std::size_t dim, std::size_t factor, const char* axis) {
    if (factor == 0 || dim % factor != 0) {
      throw DimensionError(std::string("downsample factor ") +
                           std::to_string(factor) + " does not divide " + axis +
                           " extent " + std::to_string(dim));
    }
  };
  check(shape.t, f.temporal, "temporal");
  check(shape.h, f.height, "height");
  check(shape.w, f.width, "width");
}

Shape downsampled_shape(const Shape& shape, const DownsampleFactors& f) {
  check_divisible(shape, f);
  return Shape{shape.t / f.temporal, shape.h / f.height, shape.w / f.width,
               shape.c};
}

namespace {

void check_dims(const Shape& s) {
  if (s.t == 0 || s.h == 0 || s.w == 0 || s.c == 0) {
    throw DimensionError("tensor dimensions must be >= 1, got " +
                         s.to_string());
  }
}

}  // namespace

Tensor4::Tensor4(Shape shape, double fill) : shape_(shape) {
  check_dims(shape_);
  if (!std::isfinite(fill)) throw DomainError("tensor fill value is not finite");
  data_.assign(shape_.size(), fill);
}

Tensor4::Tensor4(Shape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  check_dims(shape_);
  if (data_.size() != shape_.size()) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_.to_string());
  }
  if (!all_finite()) throw DomainError("tensor data contains NaN or Inf");
}

Tensor4 Tensor4::random_normal(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor4 out(shape);
  for (double& v : out.data_) v = normal(rng);
  return out;
}

bool Tensor4::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool Tensor4::identical(const Tensor4& other) const {
  return shape_ == other.shape_ &&
         std::memcmp(data_.data(), other.data_.data(),
                     data_.size() * sizeof(double)) == 0;
}

void check_same_shape(const Tensor4& a, const Tensor4& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape mismatch " +
                         a.shape().to_string() + " vs " +
                         b.shape().to_string());
  }
}

Tensor4 avg_downsample(const Tensor4& x, const DownsampleFactors& f) {
  const Shape o = downsampled_shape(x.shape(), f);
  if (o == x.shape()) return x;
  Tensor4 out(o);
  kernels::parallel::avg_pool(x.data(), x.shape(), f, out.mutable_data());
  return out;
}

double sum_squares(const Tensor4& x) {
  return kernels::parallel::sum_squares(x.data());
}

double l2_norm(const Tensor4& x) { return std::sqrt(sum_squares(x)); }

double mean(const Tensor4& x) {
  return kernels::parallel::sum(x.data()) / static_cast<double>(x.size());
}

double mse(const Tensor4& a, const Tensor4& b) {
  check_same_shape(a, b, "mse");
  return kernels::parallel::sum_squared_diff(a.data(), b.data()) /
         static_cast<double>(a.size());
}

Tensor4 axpy(const Tensor4& a, double scale, const Tensor4& b) {
  check_same_shape(a, b, "axpy");
  Tensor4 out(a.shape());
  kernels::parallel::axpy(a.data(), scale, b.data(), out.mutable_data());
  return out;
}

Tensor4 scaled(const Tensor4& x, double scale) {
  Tensor4 out(x.shape());
  auto o = out.mutable_data();
  auto in = x.data();
  for (std::size_t i = 0; i < in.size(); ++i) o[i] = scale * in[i];
  return out;
}

Tensor4 add_residual(const Tensor4& feature, const Tensor4& delta) {
  check_same_shape(feature, delta, "residual");
  Tensor4 out(feature.shape());
  auto o = out.mutable_data();
  const auto f = feature.data();
  const auto d = delta.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = f[i] + d[i];
  return out;
}

}  // namespace freqcache
