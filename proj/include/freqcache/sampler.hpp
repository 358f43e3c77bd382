// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "freqcache/predictor.hpp"
#include "freqcache/report.hpp"
#include "freqcache/schedule.hpp"

namespace freqcache {

/// z + (t_next - t_cur) * f. Throws ScheduleError unless t_next < t_cur.
Tensor4 euler_step(const Tensor4& z, const Tensor4& f, double t_cur,
                   double t_next);

struct SampleResult {
  Tensor4 latent;
  RunReport report;
};

/// Full inference at every step.
SampleResult sample_baseline(const Predictor& pred, const Tensor4& z_init,
                             const TimestepSchedule& sched);

/// No-cache trajectory with every latent and prediction kept:
/// latents[k] and predictions[k] belong to step N - k.
struct Trajectory {
  std::vector<Tensor4> latents;
  std::vector<Tensor4> predictions;
  Tensor4 final_latent;

  int step_of(std::size_t k) const {
    return static_cast<int>(latents.size() - k);
  }
};

Trajectory record_trajectory(const Predictor& pred, const Tensor4& z_init,
                             const TimestepSchedule& sched);

}  // namespace freqcache
