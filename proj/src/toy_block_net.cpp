// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/toy_block_net.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "freqcache/error.hpp"
#include "freqcache/kernels.hpp"

namespace freqcache {

ToyBlockNet::ToyBlockNet(std::size_t channels, std::vector<ToyBlock> blocks)
    : channels_(channels), blocks_(std::move(blocks)) {
  if (channels_ == 0) throw ConfigError("toy net needs at least one channel");
  for (const auto& b : blocks_) {
    if (b.bias.size() != channels_)
      throw ConfigError("toy block bias length must equal channel count");
    if (b.kind == BlockKind::projection &&
        b.weight.size() != channels_ * channels_)
      throw ConfigError("toy block weight must be C x C");
    if (!std::isfinite(b.scale)) throw ConfigError("toy block scale must be finite");
  }
}

ToyBlockNet ToyBlockNet::random(const ToyBlockNetParams& p) {
  if (!(p.min_scale > 0.0) || !(p.max_scale >= p.min_scale))
    throw ConfigError("toy net scales must satisfy 0 < min <= max");
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double inv_sqrt_c = 1.0 / std::sqrt(static_cast<double>(p.channels));
  const double log_ratio = std::log(p.min_scale / p.max_scale);

  std::vector<ToyBlock> blocks(p.blocks);
  for (auto& b : blocks) {
    b.kind = BlockKind::projection;
    b.scale = p.max_scale * std::exp(unit(rng) * log_ratio);
    b.weight.resize(p.channels * p.channels);
    for (double& w : b.weight) w = normal(rng) * inv_sqrt_c;
    b.bias.resize(p.channels);
    for (double& v : b.bias) v = 0.5 * normal(rng);
    b.gain_amplitude = 0.2 + 0.6 * unit(rng);
    b.gain_frequency = 0.5 + unit(rng);
    b.gain_phase = unit(rng);
  }
  return ToyBlockNet(p.channels, std::move(blocks));
}

ToyBlockNet ToyBlockNet::identity(std::size_t blocks, std::size_t channels) {
  ToyBlock b;
  b.scale = 0.0;
  b.weight.assign(channels * channels, 0.0);
  b.bias.assign(channels, 0.0);
  return ToyBlockNet(channels, std::vector<ToyBlock>(blocks, b));
}

Tensor4 ToyBlockNet::block_delta(std::size_t j, const Tensor4& input,
                                 double t) const {
  if (j >= blocks_.size()) throw DimensionError("block index out of range");
  if (input.shape().c != channels_)
    throw DimensionError("toy net expects " + std::to_string(channels_) +
                         " channels, got " + input.shape().to_string());
  const ToyBlock& b = blocks_[j];
  const std::size_t C = channels_;
  Tensor4 out(input.shape());
  auto o = out.mutable_data();
  const auto cells = static_cast<long long>(input.shape().tokens());

  if (b.kind == BlockKind::constant) {
    for (long long cell = 0; cell < cells; ++cell)
      for (std::size_t c = 0; c < C; ++c)
        o[static_cast<std::size_t>(cell) * C + c] = b.scale * b.bias[c];
    return out;
  }

  const double gain =
      b.scale * (1.0 + b.gain_amplitude *
                           std::sin(2.0 * std::numbers::pi *
                                    (b.gain_frequency * t + b.gain_phase)));
  const auto x = input.data();
#pragma omp parallel for schedule(static) if (input.size() >= kernels::kParallelThreshold)
  for (long long cell = 0; cell < cells; ++cell) {
    const std::size_t base = static_cast<std::size_t>(cell) * C;
    for (std::size_t r = 0; r < C; ++r) {
      double acc = b.bias[r];
      for (std::size_t c = 0; c < C; ++c) acc += b.weight[r * C + c] * x[base + c];
      o[base + r] = gain * std::tanh(acc);
    }
  }
  return out;
}

BlockForward ToyBlockNet::forward(const Tensor4& z, double t,
                                  bool capture) const {
  BlockForward result;
  if (capture) result.intermediates.emplace();
  Tensor4 f = z;
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    f = add_residual(f, block_delta(j, f, t));
    if (capture) result.intermediates->push_back(f);
  }
  result.output = std::move(f);
  return result;
}

Tensor4 ToyBlockNet::evaluate(const Tensor4& z, const StepInfo& step) const {
  return forward(z, step.t, false).output;
}

BlockForward toy_block_forward(const ToyBlockNet& net, const Tensor4& z,
                               double t, bool capture) {
  return net.forward(z, t, capture);
}

}  // namespace freqcache
