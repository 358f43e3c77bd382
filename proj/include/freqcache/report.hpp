// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freqcache/tensor.hpp"

namespace freqcache {

enum class Decision { warmup_full, full, skip };

const char* to_string(Decision d);

/// One row of the decision log.
struct StepRecord {
  int step = 0;
  double t = 0.0;
  Decision decision = Decision::full;
  bool trial = false;        // a trial inference ran at this step
  double trial_lfd = 0.0;    // valid when `trial`
  double error_before = 0.0; // accumulated error compared against the threshold
  double error_after = 0.0;  // accumulated error carried into the next step
  double cost_units = 0.0;
  bool partial_blocks = false;
  std::size_t pivotal_blocks = 0;  // equals total_blocks on full-block steps
  std::size_t total_blocks = 0;    // 0 when the predictor has no blocks
};

/// Token-step cost model. A full evaluation costs T*H*W units, a trial
/// evaluation on the pooled latent (T/r)*(H/s_h)*(W/s_w), and a partial
/// block evaluation T*H*W scaled by the executed (pivotal) fraction.
struct CostModel {
  double full_units = 0.0;
  double trial_units = 0.0;

  static CostModel for_shape(const Shape& latent,
                             const DownsampleFactors& trial);
  double partial_units(std::size_t pivotal, std::size_t total) const {
    return full_units * static_cast<double>(pivotal) /
           static_cast<double>(total);
  }
};

struct Quality {
  double mse = 0.0;
  double psnr = 0.0;
  std::string reference;
};

struct RunReport {
  std::string mode;
  std::string predictor;
  Shape latent;
  int steps_total = 0;
  std::vector<StepRecord> rows;

  // Post-warmup full inferences; warmup steps are counted separately.
  std::size_t full_eval_count = 0;
  std::size_t warmup_count = 0;
  std::size_t skip_count = 0;
  std::size_t trial_eval_count = 0;
  std::size_t partial_block_count = 0;

  double cost_units = 0.0;
  double baseline_cost_units = 0.0;
  CostModel cost_model;

  double threshold = 0.0;         // delta; 0 when no threshold was set
  double warmup_max_lfd = 0.0;
  bool threshold_set = false;
  bool open_loop = false;
  double wall_time_seconds = 0.0;
  std::optional<Quality> quality;

  /// Appends a row and updates the counters and cost total.
  void add(const StepRecord& row);
};

}  // namespace freqcache
