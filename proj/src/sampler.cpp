// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/sampler.hpp"

#include <chrono>

#include "freqcache/error.hpp"

namespace freqcache {

Tensor4 euler_step(const Tensor4& z, const Tensor4& f, double t_cur,
                   double t_next) {
  check_same_shape(z, f, "euler_step");
  if (!(t_next < t_cur))
    throw ScheduleError("euler_step requires t_next < t_cur");
  return axpy(z, t_next - t_cur, f);
}

SampleResult sample_baseline(const Predictor& pred, const Tensor4& z_init,
                             const TimestepSchedule& sched) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.mode = "baseline";
  report.predictor = pred.name();
  report.latent = z_init.shape();
  report.steps_total = sched.steps();
  report.open_loop = pred.open_loop();
  report.cost_model = CostModel::for_shape(z_init.shape(), DownsampleFactors{1, 1, 1});
  report.baseline_cost_units = report.cost_model.full_units * sched.steps();

  Tensor4 z = z_init;
  for (int i = sched.steps(); i >= 1; --i) {
    const double t = sched.time(i);
    const Tensor4 f = pred.evaluate(z, StepInfo{i, t});
    z = euler_step(z, f, t, sched.time(i - 1));
    StepRecord row;
    row.step = i;
    row.t = t;
    row.decision = Decision::full;
    row.cost_units = report.cost_model.full_units;
    report.add(row);
  }
  report.wall_time_seconds = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
  return SampleResult{std::move(z), std::move(report)};
}

Trajectory record_trajectory(const Predictor& pred, const Tensor4& z_init,
                             const TimestepSchedule& sched) {
  Trajectory traj;
  Tensor4 z = z_init;
  for (int i = sched.steps(); i >= 1; --i) {
    const double t = sched.time(i);
    Tensor4 f = pred.evaluate(z, StepInfo{i, t});
    Tensor4 next = euler_step(z, f, t, sched.time(i - 1));
    traj.latents.push_back(std::move(z));
    traj.predictions.push_back(std::move(f));
    z = std::move(next);
  }
  traj.final_latent = std::move(z);
  return traj;
}

}  // namespace freqcache
