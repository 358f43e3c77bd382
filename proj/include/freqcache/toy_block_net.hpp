// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Small residual network over the channel axis. Block j maps its input
// feature F to F + D^j with
//
//   projection:  D^j = s_j * g_j(t) * tanh(W_j F + b_j)   (per cell)
//   constant:    D^j = s_j * b_j                          (broadcast)
//
// where g_j(t) = 1 + a_j * sin(2 pi (w_j t + p_j)). Constant blocks ignore
// both input and timestep.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "freqcache/predictor.hpp"

namespace freqcache {

enum class BlockKind { projection, constant };

struct ToyBlock {
  BlockKind kind = BlockKind::projection;
  double scale = 1.0;
  std::vector<double> weight;  // C x C, row-major (out, in)
  std::vector<double> bias;    // C
  double gain_amplitude = 0.0;
  double gain_frequency = 1.0;
  double gain_phase = 0.0;
};

struct ToyBlockNetParams {
  std::size_t blocks = 16;
  std::size_t channels = 2;
  double min_scale = 0.05;
  double max_scale = 1.0;
  std::uint64_t seed = 7;
};

struct BlockForward {
  Tensor4 output;
  /// F^1..F^M when captured.
  std::optional<std::vector<Tensor4>> intermediates;
};

class ToyBlockNet final : public Predictor, public BlockStructured {
 public:
  /// Throws ConfigError on inconsistent block parameters.
  ToyBlockNet(std::size_t channels, std::vector<ToyBlock> blocks);

  /// Seeded projection blocks with scales log-uniform in [min, max].
  static ToyBlockNet random(const ToyBlockNetParams& params);
  /// Every block scaled by zero.
  static ToyBlockNet identity(std::size_t blocks, std::size_t channels);

  std::size_t channels() const { return channels_; }
  std::size_t block_count() const override { return blocks_.size(); }
  const std::vector<ToyBlock>& block_params() const { return blocks_; }
  Tensor4 block_delta(std::size_t j, const Tensor4& input,
                      double t) const override;
  BlockForward forward(const Tensor4& z, double t, bool capture) const;

  Tensor4 evaluate(const Tensor4& z, const StepInfo& step) const override;
  const BlockStructured* blocks() const override { return this; }
  std::string name() const override { return "toy-block-net"; }

 private:
  std::size_t channels_;
  std::vector<ToyBlock> blocks_;
};

BlockForward toy_block_forward(const ToyBlockNet& net, const Tensor4& z,
                               double t, bool capture);

}  // namespace freqcache
