// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Diagnostic experiments on no-cache trajectories, cost accounting, and the
// metrics used to compare runs.

#pragma once

#include <string>
#include <vector>

#include "freqcache/predictor.hpp"
#include "freqcache/report.hpp"
#include "freqcache/schedule.hpp"
#include "freqcache/spectral.hpp"
#include "freqcache/toy_block_net.hpp"

namespace freqcache {

/// What a single-step skip reuses from step i + 1.
///   full       the whole prediction
///   low_only   the low band; the high band is computed fresh
///   high_only  the high band; the low band is computed fresh
enum class InfluenceVariant { full, low_only, high_only };
const char* to_string(InfluenceVariant v);

struct InfluenceProfile {
  InfluenceVariant variant = InfluenceVariant::full;
  std::vector<int> steps;          // N - 1 down to 1
  std::vector<double> influence;   // MSE of the final latent vs the no-cache run
};

/// One sampler run per step i < N with only step i altered.
InfluenceProfile single_step_skip_influence(
    const Predictor& pred, const Tensor4& z_init, const TimestepSchedule& sched,
    InfluenceVariant variant, double radius_fraction = kDefaultRadiusFraction);

struct DiffProfile {
  std::vector<int> steps;     // i for the pair (F_{i+1}, F_i), N - 1 down to 1
  std::vector<double> raw;
  std::vector<double> low;
  std::vector<double> high;
};

DiffProfile adjacent_diff_profile(const Predictor& pred, const Tensor4& z_init,
                                  const TimestepSchedule& sched,
                                  double radius_fraction = kDefaultRadiusFraction);

struct FactorSensitivity {
  DownsampleFactors factors;
  std::vector<double> lfd;  // per step, N - 1 down to 1
  double pearson = 0.0;
  double spearman = 0.0;
};

struct ResolutionSensitivity {
  std::vector<int> steps;
  std::vector<double> full_lfd;
  std::vector<FactorSensitivity> factors;
};

/// Factor sets swept by the resolution experiment.
std::vector<DownsampleFactors> default_factor_list();

/// Throws DimensionError when a factor set does not divide the latent.
ResolutionSensitivity resolution_sensitivity(
    const Predictor& pred, const Tensor4& z_init, const TimestepSchedule& sched,
    const std::vector<DownsampleFactors>& factors,
    double radius_fraction = kDefaultRadiusFraction);

struct BlockProfileRow {
  int step = 0;
  std::vector<double> importance;
};

/// Throws ScheduleError when a probe step is outside 1..N.
std::vector<BlockProfileRow> block_profile(const ToyBlockNet& net,
                                           const Tensor4& z_init,
                                           const TimestepSchedule& sched,
                                           const std::vector<int>& probe_steps);

struct CostSummary {
  double speedup_units = 1.0;
  double skip_fraction = 0.0;
  /// Trial cost relative to the no-cache cost.
  double trial_overhead_fraction = 0.0;
  /// Skip fraction at which skipped work pays for the trials.
  double break_even_skip_fraction = 0.0;
};

CostSummary cost_accounting(const RunReport& report);

/// Returned by psnr when the inputs are identical.
inline constexpr double kPsnrCap = 200.0;

/// 10 log10(peak^2 / mse). Throws DimensionError on a shape mismatch and
/// DomainError unless peak > 0.
double psnr(const Tensor4& a, const Tensor4& b, double peak);

/// Pearson correlation of fractional ranks (ties averaged). Throws
/// DimensionError on a length mismatch or fewer than 3 entries.
double spearman(const std::vector<double>& x, const std::vector<double>& y);
/// Same preconditions. Identical inputs give exactly 1; a constant input
/// gives 0.
double pearson(const std::vector<double>& x, const std::vector<double>& y);
std::vector<double> fractional_ranks(const std::vector<double>& x);

/// Fills report.quality against `reference`, with peak = max |reference|.
void attach_quality(RunReport& report, const Tensor4& result,
                    const Tensor4& reference, const std::string& label);

}  // namespace freqcache
