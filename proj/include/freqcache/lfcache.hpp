// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Step-level reuse driven by the low-frequency difference of a cheap trial
// evaluation on a pooled latent.
//
// Step N always runs full inference. Steps inside the warmup window run both
// a trial and a full evaluation and track the largest trial LFD; the
// threshold is alpha times that maximum. Afterwards every step adds its
// trial LFD to an accumulated error E and skips while E stays below the
// threshold; a full evaluation resets E to 0.

#pragma once

#include <optional>
#include <vector>

#include "freqcache/blockcache.hpp"
#include "freqcache/predictor.hpp"
#include "freqcache/report.hpp"
#include "freqcache/sampler.hpp"
#include "freqcache/schedule.hpp"
#include "freqcache/spectral.hpp"

namespace freqcache {

enum class ReuseStrategy { prediction, residual };
const char* to_string(ReuseStrategy r);

struct LfCacheConfig {
  double alpha = 0.5;
  /// Steps (counting step N) during which skipping is forbidden.
  int warmup_steps = 5;
  DownsampleFactors downsample{2, 4, 4};
  ReuseStrategy reuse = ReuseStrategy::prediction;
  /// Mask radius as a fraction of min(H, W) of the pooled latent.
  double radius_fraction = kDefaultRadiusFraction;

  /// Throws ConfigError.
  void validate() const;
  friend bool operator==(const LfCacheConfig&, const LfCacheConfig&) = default;
};

/// max(lfds) * alpha. Throws ConfigError when empty or any entry is negative.
double relative_threshold(const std::vector<double>& warmup_lfds, double alpha);

/// LFD between pred(Downsample(z)) and Downsample(cached_f) on the pooled
/// grid. Throws DimensionError when the factors do not divide z.
double trial_lfd(const Predictor& pred, const Tensor4& z, const StepInfo& step,
                 const Tensor4& cached_f, const LfCacheConfig& cfg);

struct CacheState {
  double accumulated = 0.0;
  double threshold = 0.0;
  bool threshold_set = false;
  double warmup_max = 0.0;
};

/// E += delta; skip iff E < threshold. Does not reset E on a full
/// decision; the caller does that after recomputing its cache. Throws
/// StateError before the threshold exists.
Decision accumulate_decide(CacheState& state, double delta);

SampleResult lfcache_sample(const Predictor& pred, const Tensor4& z_init,
                            const TimestepSchedule& sched,
                            const LfCacheConfig& cfg,
                            const std::optional<BlockCacheConfig>& block_cfg = {});

/// Decisions for a fixed increment sequence (open loop): increments[k]
/// belongs to step N - k, and increments[0] is ignored because the first
/// step is always full.
std::vector<Decision> simulate_decisions(const std::vector<double>& increments,
                                         double alpha, int warmup_steps);
/// Same, with the threshold given directly and no warmup beyond step N.
std::vector<Decision> simulate_with_threshold(const std::vector<double>& increments,
                                              double threshold);

}  // namespace freqcache
