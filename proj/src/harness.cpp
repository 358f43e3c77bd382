// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "freqcache/blockcache.hpp"
#include "freqcache/error.hpp"
#include "freqcache/sampler.hpp"

namespace freqcache {
namespace {

Tensor4 splice(const Tensor4& low_from, const Tensor4& high_from,
               const FrequencyMask& mask) {
  const SpectrumPair lo = fft2_split(low_from, mask);
  const SpectrumPair hi = fft2_split(high_from, mask);
  return ifft2_real(recombine(SpectrumPair{lo.low, hi.high}));
}

// Continue sampling from the latent after step `i` has produced `z_next`.
Tensor4 finish(const Predictor& pred, Tensor4 z, const TimestepSchedule& sched,
               int from_step) {
  for (int j = from_step; j >= 1; --j) {
    const double t = sched.time(j);
    z = euler_step(z, pred.evaluate(z, StepInfo{j, t}), t, sched.time(j - 1));
  }
  return z;
}

void check_lengths(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw DimensionError("correlation inputs differ in length: " +
                         std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  if (x.size() < 3) throw DimensionError("correlation needs at least 3 entries");
}

}  // namespace

const char* to_string(InfluenceVariant v) {
  switch (v) {
    case InfluenceVariant::full:
      return "full";
    case InfluenceVariant::low_only:
      return "low-only";
    case InfluenceVariant::high_only:
      return "high-only";
  }
  return "?";
}

InfluenceProfile single_step_skip_influence(const Predictor& pred,
                                            const Tensor4& z_init,
                                            const TimestepSchedule& sched,
                                            InfluenceVariant variant,
                                            double radius_fraction) {
  const Trajectory base = record_trajectory(pred, z_init, sched);
  const Shape& s = z_init.shape();
  const FrequencyMask mask = mask_with_fraction(s.h, s.w, radius_fraction);
  const int n = sched.steps();

  InfluenceProfile out;
  out.variant = variant;
  for (int i = n - 1; i >= 1; --i) {
    const std::size_t k = static_cast<std::size_t>(n - i);
    const Tensor4& fresh = base.predictions[k];
    const Tensor4& stale = base.predictions[k - 1];
    Tensor4 f;
    switch (variant) {
      case InfluenceVariant::full:
        f = stale;
        break;
      case InfluenceVariant::low_only:
        f = splice(stale, fresh, mask);
        break;
      case InfluenceVariant::high_only:
        f = splice(fresh, stale, mask);
        break;
    }
    const double t = sched.time(i);
    Tensor4 z = euler_step(base.latents[k], f, t, sched.time(i - 1));
    z = finish(pred, std::move(z), sched, i - 1);
    out.steps.push_back(i);
    out.influence.push_back(mse(z, base.final_latent));
  }
  return out;
}

DiffProfile adjacent_diff_profile(const Predictor& pred, const Tensor4& z_init,
                                  const TimestepSchedule& sched,
                                  double radius_fraction) {
  const Trajectory base = record_trajectory(pred, z_init, sched);
  const Shape& s = z_init.shape();
  const FrequencyMask mask = mask_with_fraction(s.h, s.w, radius_fraction);
  DiffProfile out;
  for (std::size_t k = 1; k < base.predictions.size(); ++k) {
    const BandNorms b =
        band_difference(base.predictions[k], base.predictions[k - 1], mask);
    out.steps.push_back(base.step_of(k));
    out.raw.push_back(b.full);
    out.low.push_back(b.low);
    out.high.push_back(b.high);
  }
  return out;
}

std::vector<DownsampleFactors> default_factor_list() {
  return {{1, 2, 2}, {1, 4, 4}, {1, 8, 8}, {2, 4, 4}, {4, 4, 4}};
}

ResolutionSensitivity resolution_sensitivity(
    const Predictor& pred, const Tensor4& z_init, const TimestepSchedule& sched,
    const std::vector<DownsampleFactors>& factors, double radius_fraction) {
  for (const auto& f : factors) check_divisible(z_init.shape(), f);
  const Trajectory base = record_trajectory(pred, z_init, sched);

  auto lfd_series = [&](const DownsampleFactors& f) {
    std::vector<double> out;
    for (std::size_t k = 1; k < base.predictions.size(); ++k) {
      const int i = base.step_of(k);
      const Tensor4 zs = avg_downsample(base.latents[k], f);
      const Tensor4 trial = pred.evaluate(zs, StepInfo{i, sched.time(i)});
      const Tensor4 prev = avg_downsample(base.predictions[k - 1], f);
      const Shape& s = zs.shape();
      out.push_back(lfd(trial, prev, mask_with_fraction(s.h, s.w, radius_fraction)));
    }
    return out;
  };

  ResolutionSensitivity out;
  for (std::size_t k = 1; k < base.predictions.size(); ++k)
    out.steps.push_back(base.step_of(k));
  out.full_lfd = lfd_series(DownsampleFactors{1, 1, 1});
  for (const auto& f : factors) {
    FactorSensitivity fs;
    fs.factors = f;
    fs.lfd = lfd_series(f);
    fs.pearson = pearson(fs.lfd, out.full_lfd);
    fs.spearman = spearman(fs.lfd, out.full_lfd);
    out.factors.push_back(std::move(fs));
  }
  return out;
}

std::vector<BlockProfileRow> block_profile(const ToyBlockNet& net,
                                           const Tensor4& z_init,
                                           const TimestepSchedule& sched,
                                           const std::vector<int>& probe_steps) {
  const int n = sched.steps();
  for (int p : probe_steps)
    if (p < 1 || p > n)
      throw ScheduleError("probe step " + std::to_string(p) + " outside 1.." +
                          std::to_string(n));
  const Trajectory base = record_trajectory(net, z_init, sched);
  std::vector<BlockProfileRow> out;
  for (int p : probe_steps) {
    const Tensor4& z = base.latents[static_cast<std::size_t>(n - p)];
    const BlockForward fw = net.forward(z, sched.time(p), true);
    out.push_back(BlockProfileRow{p, block_importance(*fw.intermediates, z)});
  }
  return out;
}

CostSummary cost_accounting(const RunReport& report) {
  CostSummary c;
  if (report.cost_units > 0.0) c.speedup_units = report.baseline_cost_units / report.cost_units;
  if (report.steps_total > 0)
    c.skip_fraction = static_cast<double>(report.skip_count) /
                      static_cast<double>(report.steps_total);
  if (report.baseline_cost_units > 0.0) {
    c.trial_overhead_fraction = static_cast<double>(report.trial_eval_count) *
                                report.cost_model.trial_units /
                                report.baseline_cost_units;
  }
  c.break_even_skip_fraction = c.trial_overhead_fraction;
  return c;
}

double psnr(const Tensor4& a, const Tensor4& b, double peak) {
  check_same_shape(a, b, "psnr");
  if (!(peak > 0.0)) throw DomainError("psnr peak must be > 0");
  const double m = mse(a, b);
  if (m == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / m));
}

std::vector<double> fractional_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  check_lengths(x, y);
  if (x == y) {
    const bool constant = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    return constant ? 0.0 : 1.0;
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  check_lengths(x, y);
  return pearson(fractional_ranks(x), fractional_ranks(y));
}

void attach_quality(RunReport& report, const Tensor4& result,
                    const Tensor4& reference, const std::string& label) {
  double peak = 0.0;
  for (double v : reference.data()) peak = std::max(peak, std::abs(v));
  Quality q;
  q.mse = mse(result, reference);
  q.psnr = psnr(result, reference, peak > 0.0 ? peak : 1.0);
  q.reference = label;
  report.quality = q;
}

}  // namespace freqcache
