// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/report.hpp"

namespace freqcache {

const char* to_string(Decision d) {
  switch (d) {
    case Decision::warmup_full:
      return "warmup-full";
    case Decision::full:
      return "full";
    case Decision::skip:
      return "skip";
  }
  return "?";
}

CostModel CostModel::for_shape(const Shape& latent,
                               const DownsampleFactors& trial) {
  CostModel m;
  m.full_units = static_cast<double>(latent.tokens());
  m.trial_units = static_cast<double>(latent.tokens()) /
                  static_cast<double>(trial.volume());
  return m;
}

void RunReport::add(const StepRecord& row) {
  rows.push_back(row);
  switch (row.decision) {
    case Decision::warmup_full:
      ++warmup_count;
      break;
    case Decision::full:
      ++full_eval_count;
      break;
    case Decision::skip:
      ++skip_count;
      break;
  }
  if (row.trial) ++trial_eval_count;
  if (row.partial_blocks) ++partial_block_count;
  cost_units += row.cost_units;
}

}  // namespace freqcache
