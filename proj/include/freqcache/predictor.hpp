// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "freqcache/tensor.hpp"

namespace freqcache {

struct StepInfo {
  int index = 0;  // i in t_i; N for the first evaluation
  double t = 1.0;
};

/// Networks that decompose into M residual blocks F^j = F^{j-1} + D^j.
class BlockStructured {
 public:
  virtual ~BlockStructured() = default;
  virtual std::size_t block_count() const = 0;
  /// Residual branch of block j (0-based) applied to its input feature.
  virtual Tensor4 block_delta(std::size_t j, const Tensor4& input,
                              double t) const = 0;
};

/// Velocity predictor. Implementations are immutable and deterministic:
/// identical (z, step) always yields a bitwise-identical result. They must
/// also accept inputs pooled by any factor that divides their native shape;
/// that is how trial inference calls them.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Tensor4 evaluate(const Tensor4& z, const StepInfo& step) const = 0;
  /// True when the output ignores the live latent (trace replay).
  virtual bool open_loop() const { return false; }
  virtual const BlockStructured* blocks() const { return nullptr; }
  virtual std::string name() const = 0;
};

/// Returns zeros; property tests use it.
class ZeroPredictor final : public Predictor {
 public:
  Tensor4 evaluate(const Tensor4& z, const StepInfo&) const override {
    return Tensor4(z.shape());
  }
  std::string name() const override { return "zero"; }
};

}  // namespace freqcache
