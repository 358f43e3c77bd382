// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/lfcache.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "freqcache/error.hpp"

namespace freqcache {

const char* to_string(ReuseStrategy r) {
  return r == ReuseStrategy::prediction ? "prediction" : "residual";
}

void LfCacheConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (warmup_steps < 1) throw ConfigError("warmup_steps must be >= 1");
  if (downsample.temporal == 0 || downsample.height == 0 || downsample.width == 0)
    throw ConfigError("downsample factors must be >= 1");
  if (!(radius_fraction > 0.0)) throw ConfigError("mask radius fraction must be > 0");
}

double relative_threshold(const std::vector<double>& warmup_lfds, double alpha) {
  if (warmup_lfds.empty()) throw ConfigError("threshold needs at least one warmup LFD");
  for (double v : warmup_lfds)
    if (!(v >= 0.0)) throw ConfigError("warmup LFDs must be >= 0");
  return *std::max_element(warmup_lfds.begin(), warmup_lfds.end()) * alpha;
}

double trial_lfd(const Predictor& pred, const Tensor4& z, const StepInfo& step,
                 const Tensor4& cached_f, const LfCacheConfig& cfg) {
  check_same_shape(z, cached_f, "trial_lfd");
  check_divisible(z.shape(), cfg.downsample);
  const Tensor4 zs = avg_downsample(z, cfg.downsample);
  const Tensor4 trial = pred.evaluate(zs, step);
  const Tensor4 cached = avg_downsample(cached_f, cfg.downsample);
  const Shape& s = zs.shape();
  return lfd(trial, cached, mask_with_fraction(s.h, s.w, cfg.radius_fraction));
}

Decision accumulate_decide(CacheState& state, double delta) {
  if (!state.threshold_set)
    throw StateError("accumulate_decide called before warmup completed");
  state.accumulated += delta;
  return state.accumulated < state.threshold ? Decision::skip : Decision::full;
}

SampleResult lfcache_sample(const Predictor& pred, const Tensor4& z_init,
                            const TimestepSchedule& sched,
                            const LfCacheConfig& cfg,
                            const std::optional<BlockCacheConfig>& block_cfg) {
  cfg.validate();
  check_divisible(z_init.shape(), cfg.downsample);
  const BlockStructured* net = nullptr;
  if (block_cfg) {
    block_cfg->validate();
    net = pred.blocks();
    if (net == nullptr)
      throw ConfigError("block cache requires a block-structured predictor");
  }
  const auto start = std::chrono::steady_clock::now();

  RunReport report;
  report.mode = block_cfg ? "lfcache+block" : "lfcache";
  report.predictor = pred.name();
  report.latent = z_init.shape();
  report.steps_total = sched.steps();
  report.open_loop = pred.open_loop();
  report.cost_model = CostModel::for_shape(z_init.shape(), cfg.downsample);
  report.baseline_cost_units = report.cost_model.full_units * sched.steps();

  CacheState state;
  BlockCacheState blocks;
  std::vector<double> warmup_lfds;
  Tensor4 z = z_init;
  Tensor4 f_prev;    // prediction used at the previous step
  Tensor4 residual;  // F - Z at the last full inference

  const int n = sched.steps();
  for (int i = n; i >= 1; --i) {
    const int k = n - i;  // steps already taken
    const StepInfo info{i, sched.time(i)};
    StepRecord row;
    row.step = i;
    row.t = info.t;
    row.total_blocks = net ? net->block_count() : 0;
    row.pivotal_blocks = row.total_blocks;

    if (k > 0) {
      row.trial = true;
      row.trial_lfd = trial_lfd(pred, z, info, f_prev, cfg);
      row.cost_units += report.cost_model.trial_units;
    }

    const bool warmup = k < cfg.warmup_steps || !state.threshold_set;
    Tensor4 f;
    if (warmup) {
      row.decision = Decision::warmup_full;
      f = pred.evaluate(z, info);
      row.cost_units += report.cost_model.full_units;
      if (row.trial) {
        warmup_lfds.push_back(row.trial_lfd);
        state.warmup_max = std::max(state.warmup_max, row.trial_lfd);
      }
      if (k + 1 >= cfg.warmup_steps && !warmup_lfds.empty()) {
        state.threshold = relative_threshold(warmup_lfds, cfg.alpha);
        state.threshold_set = true;
      }
    } else {
      row.decision = accumulate_decide(state, row.trial_lfd);
      row.error_before = state.accumulated;
      if (row.decision == Decision::skip) {
        f = cfg.reuse == ReuseStrategy::prediction ? f_prev
                                                   : add_residual(z, residual);
      } else if (net != nullptr) {
        BlockCacheResult r = blockcache_forward(*net, z, info.t, *block_cfg, blocks);
        f = std::move(r.output);
        row.partial_blocks = r.partial;
        row.pivotal_blocks = r.pivotal_count;
        row.cost_units += r.partial
                              ? report.cost_model.partial_units(r.pivotal_count,
                                                                r.block_count)
                              : report.cost_model.full_units;
      } else {
        f = pred.evaluate(z, info);
        row.cost_units += report.cost_model.full_units;
      }
    }
    if (row.decision != Decision::skip) {
      state.accumulated = 0.0;
      if (cfg.reuse == ReuseStrategy::residual) residual = axpy(f, -1.0, z);
    }
    row.error_after = state.accumulated;

    z = euler_step(z, f, info.t, sched.time(i - 1));
    f_prev = std::move(f);
    report.add(row);
  }
  report.threshold = state.threshold;
  report.threshold_set = state.threshold_set;
  report.warmup_max_lfd = state.warmup_max;
  report.wall_time_seconds = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
  return SampleResult{std::move(z), std::move(report)};
}

std::vector<Decision> simulate_decisions(const std::vector<double>& increments,
                                         double alpha, int warmup_steps) {
  std::vector<Decision> out;
  CacheState state;
  std::vector<double> warm;
  for (std::size_t k = 0; k < increments.size(); ++k) {
    const bool warmup = static_cast<int>(k) < warmup_steps || !state.threshold_set;
    if (warmup) {
      out.push_back(Decision::warmup_full);
      if (k > 0) warm.push_back(increments[k]);
      if (static_cast<int>(k) + 1 >= warmup_steps && !warm.empty()) {
        state.threshold = relative_threshold(warm, alpha);
        state.threshold_set = true;
      }
      continue;
    }
    const Decision d = accumulate_decide(state, increments[k]);
    if (d == Decision::full) state.accumulated = 0.0;
    out.push_back(d);
  }
  return out;
}

std::vector<Decision> simulate_with_threshold(const std::vector<double>& increments,
                                              double threshold) {
  std::vector<Decision> out;
  CacheState state;
  state.threshold = threshold;
  state.threshold_set = true;
  for (std::size_t k = 0; k < increments.size(); ++k) {
    if (k == 0) {
      out.push_back(Decision::warmup_full);
      continue;
    }
    const Decision d = accumulate_decide(state, increments[k]);
    if (d == Decision::full) state.accumulated = 0.0;
    out.push_back(d);
  }
  return out;
}

}  // namespace freqcache
