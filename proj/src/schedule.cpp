// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/schedule.hpp"

#include <string>

#include "freqcache/error.hpp"

namespace freqcache {

TimestepSchedule::TimestepSchedule(std::vector<double> descending)
    : times_(std::move(descending)) {
  if (times_.size() < 2)
    throw ScheduleError("schedule needs at least one step");
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (!(times_[k] >= 0.0 && times_[k] <= 1.0))
      throw ScheduleError("schedule time " + std::to_string(times_[k]) +
                          " outside [0, 1]");
    if (k > 0 && !(times_[k] < times_[k - 1]))
      throw ScheduleError("schedule is not strictly decreasing at position " +
                          std::to_string(k));
  }
}

TimestepSchedule make_schedule(int n, ScheduleKind kind, double shift) {
  if (n < 2) throw ConfigError("schedule.steps must be >= 2");
  if (!(shift > 0.0)) throw ConfigError("schedule.shift must be > 0");
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int i = n; i >= 0; --i) {
    const double u = static_cast<double>(i) / n;
    double v = u;
    if (kind == ScheduleKind::shifted && shift != 1.0)
      v = shift * u / (1.0 + (shift - 1.0) * u);
    t[static_cast<std::size_t>(n - i)] = v;
  }
  t.front() = 1.0;
  t.back() = 0.0;
  return TimestepSchedule(std::move(t));
}

}  // namespace freqcache
