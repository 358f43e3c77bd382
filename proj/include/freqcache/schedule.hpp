// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace freqcache {

enum class ScheduleKind { uniform, shifted };

/// Decreasing times t_N > ... > t_0. Step i (N >= i >= 1) evaluates the
/// predictor at t_i and moves the latent to t_{i-1}.
class TimestepSchedule {
 public:
  /// `descending` lists t_N first and t_0 last. Throws ScheduleError unless
  /// it is strictly decreasing, inside [0, 1], and has at least two entries.
  explicit TimestepSchedule(std::vector<double> descending);

  int steps() const { return static_cast<int>(times_.size()) - 1; }
  /// t_i for 0 <= i <= N.
  double time(int i) const { return times_[times_.size() - 1 - i]; }
  const std::vector<double>& descending() const { return times_; }

 private:
  std::vector<double> times_;
};

/// uniform: t_i = i/n. shifted: t_i = shift*u / (1 + (shift-1)*u), u = i/n.
/// Throws ConfigError for n < 2 or shift <= 0.
TimestepSchedule make_schedule(int n, ScheduleKind kind = ScheduleKind::uniform,
                               double shift = 1.0);

}  // namespace freqcache
