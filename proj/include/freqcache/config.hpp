// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration: a flat document of `key = value` lines with at most one
// dotted section per key. `#` starts a comment.
//
//   mode                       baseline | lfcache | lfcache+block | open-loop
//   seeds                      comma list of latent seeds
//   latent.shape               T,H,W,C
//   predictor.kind             scene | gaussian | pair | toy-net | trace
//   predictor.seed             required for scene and toy-net
//   predictor.components       scene component count
//   predictor.amplitude        scene mean RMS, or the pair's |mu|
//   predictor.variance         component variance
//   predictor.mean             gaussian mean
//   predictor.coupling         per-cell | joint (pair only)
//   predictor.blocks           toy-net block count
//   predictor.trace            PCTR file for the trace predictor
//   schedule.steps             N
//   schedule.kind              uniform | shifted
//   schedule.shift
//   lfcache.alpha, lfcache.warmup, lfcache.downsample (r,s_h,s_w),
//   lfcache.reuse (prediction | residual), lfcache.radius_fraction
//   blockcache.cache_rate, blockcache.refresh_interval
//   output.dir, output.trace

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "freqcache/blockcache.hpp"
#include "freqcache/lfcache.hpp"
#include "freqcache/predictor.hpp"
#include "freqcache/schedule.hpp"

namespace freqcache {

enum class RunMode { baseline, lfcache, lfcache_block, open_loop };
const char* to_string(RunMode m);

struct PredictorConfig {
  std::string kind = "scene";
  std::optional<std::uint64_t> seed;
  std::size_t components = 2;
  double amplitude = 0.8;
  double variance = 4.0;
  double mean = 0.0;
  std::string coupling = "per-cell";
  std::size_t blocks = 16;
  std::string trace;
  friend bool operator==(const PredictorConfig&, const PredictorConfig&) = default;
};

struct ScheduleConfig {
  int steps = 50;
  ScheduleKind kind = ScheduleKind::uniform;
  double shift = 1.0;
  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

struct RunConfig {
  RunMode mode = RunMode::baseline;
  std::vector<std::uint64_t> seeds;
  Shape latent{4, 16, 16, 2};
  PredictorConfig predictor;
  ScheduleConfig schedule;
  LfCacheConfig lfcache;
  BlockCacheConfig blockcache;
  std::string output_dir = ".";
  std::string output_trace;

  /// Throws ConfigError explaining the violated invariant.
  void validate() const;
  /// validate() plus the run-time requirement that every seed is given.
  void validate_for_run() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError naming the offending key or line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

RunMode parse_mode(const std::string& s);
DownsampleFactors parse_factors(const std::string& s);
Shape parse_shape(const std::string& s);
std::vector<std::uint64_t> parse_seed_list(const std::string& s);

std::unique_ptr<Predictor> build_predictor(const RunConfig& cfg);
TimestepSchedule build_schedule(const RunConfig& cfg);

}  // namespace freqcache
