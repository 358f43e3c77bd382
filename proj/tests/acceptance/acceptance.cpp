// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "freqcache/blockcache.hpp"
#include "freqcache/fft.hpp"
#include "freqcache/harness.hpp"
#include "freqcache/lfcache.hpp"
#include "freqcache/mixture.hpp"
#include "freqcache/sampler.hpp"
#include "freqcache/spectral.hpp"
#include "freqcache/toy_block_net.hpp"
#include "freqcache/trace.hpp"

using namespace freqcache;

namespace {

const Shape kShape{4, 16, 16, 2};
constexpr int kSteps = 50;
const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5, 6, 7, 8};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MixturePredictor scene(std::uint64_t seed) {
  SceneMixtureParams p;
  p.seed = seed;
  return MixturePredictor(scene_mixture(kShape, p));
}

Tensor4 noise(std::uint64_t seed) { return Tensor4::random_normal(kShape, 1000 + seed); }

double average(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------

Outcome no_skip_degeneracy() {
  const auto t0 = std::chrono::steady_clock::now();
  const TimestepSchedule sched = make_schedule(kSteps);
  int equal = 0, total = 0;
  for (auto s : kSeeds) {
    const MixturePredictor pred = scene(s);
    const Tensor4 z = noise(s);
    const Tensor4 base = sample_baseline(pred, z, sched).latent;
    LfCacheConfig tiny;
    tiny.alpha = 1e-12;
    const SampleResult a = lfcache_sample(pred, z, sched, tiny);
    LfCacheConfig long_warmup;
    long_warmup.warmup_steps = kSteps;
    const SampleResult b = lfcache_sample(pred, z, sched, long_warmup);
    equal += (a.latent.identical(base) && a.report.skip_count == 0) ? 1 : 0;
    equal += (b.latent.identical(base) &&
              b.report.warmup_count == static_cast<std::size_t>(kSteps)) ? 1 : 0;
    total += 2;
  }
  const double secs = seconds_since(t0);
  return {equal == total && secs < 10.0,
          std::to_string(equal) + "/" + std::to_string(total) + " runs bitwise equal, " +
              fmt("%.2f s", secs)};
}

// Independent reference: first entry is always full, later entries
// accumulate and reset.
std::vector<int> reference_decisions(const std::vector<double>& inc, double delta) {
  std::vector<int> out{1};
  double e = 0.0;
  for (std::size_t k = 1; k < inc.size(); ++k) {
    e += inc[k];
    if (e < delta) {
      out.push_back(0);
    } else {
      out.push_back(1);
      e = 0.0;
    }
  }
  return out;
}

Outcome accumulate_reset_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> inc_dist(0.0, 1.0), delta_dist(0.0, 6.0);
  std::vector<double> deltas(20);
  for (double& d : deltas) d = delta_dist(rng);
  std::sort(deltas.begin(), deltas.end());
  int mismatches = 0, monotone_violations = 0;
  for (int s = 0; s < 100; ++s) {
    std::vector<double> inc(50);
    for (double& v : inc) v = inc_dist(rng);
    std::size_t prev_full = inc.size() + 1;
    for (double d : deltas) {
      const auto got = simulate_with_threshold(inc, d);
      const auto want = reference_decisions(inc, d);
      std::size_t full = 0;
      for (std::size_t k = 0; k < got.size(); ++k) {
        const int g = got[k] == Decision::skip ? 0 : 1;
        mismatches += g != want[k];
        full += g;
      }
      monotone_violations += full > prev_full;
      prev_full = full;
    }
  }
  return {mismatches == 0 && monotone_violations == 0,
          "2000 sequences, " + std::to_string(mismatches) + " decision mismatches, " +
              std::to_string(monotone_violations) + " monotonicity violations"};
}

std::vector<Complex> direct_dft2(const std::vector<double>& x, std::size_t h, std::size_t w) {
  std::vector<Complex> out(h * w);
  const double scale = 1.0 / std::sqrt(static_cast<double>(h * w));
  for (std::size_t u = 0; u < h; ++u)
    for (std::size_t v = 0; v < w; ++v) {
      Complex acc = 0.0;
      for (std::size_t a = 0; a < h; ++a)
        for (std::size_t b = 0; b < w; ++b) {
          const double ph = -2.0 * M_PI *
                            (static_cast<double>((u * a) % h) / static_cast<double>(h) +
                             static_cast<double>((v * b) % w) / static_cast<double>(w));
          acc += x[a * w + b] * Complex(std::cos(ph), std::sin(ph));
        }
      out[u * w + v] = acc * scale;
    }
  return out;
}

Outcome spectral_correctness() {
  const std::vector<std::pair<std::size_t, std::size_t>> sizes = {
      {20, 20}, {12, 18}, {16, 16}, {7, 9}, {15, 10}, {8, 32}, {1, 5}, {13, 13}, {6, 4}, {24, 30}};
  double worst_split = 0.0;
  for (int s = 0; s < 50; ++s) {
    const auto [h, w] = sizes[static_cast<std::size_t>(s) % sizes.size()];
    const Tensor4 x = Tensor4::random_normal(Shape{1, h, w, 1}, 500 + s);
    const FrequencyMask mask = default_mask(h, w);
    const SpectrumPair split = fft2_split(x, mask);
    const auto ref = direct_dft2(x.values(), h, w);
    double err = 0.0, norm = 0.0;
    for (std::size_t u = 0; u < h; ++u)
      for (std::size_t v = 0; v < w; ++v) {
        const std::size_t i = u * w + v;
        const Complex lo = mask.is_low(u, v) ? ref[i] : Complex(0.0);
        const Complex hi = mask.is_low(u, v) ? Complex(0.0) : ref[i];
        err += std::norm(split.low.coeff[i] - lo) + std::norm(split.high.coeff[i] - hi);
        norm += std::norm(ref[i]);
      }
    worst_split = std::max(worst_split, std::sqrt(err / norm));
  }
  double worst_parseval = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto [h, w] = sizes[static_cast<std::size_t>(s) % sizes.size()];
    const Shape shape{2, h, w, 3};
    const Tensor4 a = Tensor4::random_normal(shape, 900 + s);
    const Tensor4 b = Tensor4::random_normal(shape, 5000 + s);
    const BandNorms n = band_difference(a, b, default_mask(h, w));
    const double raw = l2_norm(axpy(a, -1.0, b));
    worst_parseval = std::max(
        worst_parseval, std::abs(n.low * n.low + n.high * n.high - raw * raw) / (raw * raw));
  }
  return {worst_split <= 1e-9 && worst_parseval <= 1e-9,
          "worst split rel err " + fmt("%.2e", worst_split) + ", worst Parseval rel err " +
              fmt("%.2e", worst_parseval)};
}

Outcome analytic_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Shape one{1, 1, 1, 1};
  int within = 0;
  double worst_z = 0.0;
  for (int p = 0; p < 20; ++p) {
    // Random three-component scalar mixture.
    const std::size_t K = 3;
    std::vector<double> w(K), m(K), v(K);
    double ws = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      w[k] = 0.2 + unit(rng);
      ws += w[k];
      m[k] = 3.0 * normal(rng);
      v[k] = 0.1 + 2.0 * unit(rng);
    }
    GaussianMixtureSpec spec;
    spec.latent = one;
    for (std::size_t k = 0; k < K; ++k)
      spec.components.push_back({w[k] / ws, Tensor4(one, m[k]), v[k]});
    spec.components.back().weight =
        1.0 - spec.components[0].weight - spec.components[1].weight;
    const double t = 0.05 + 0.95 * unit(rng);
    // x drawn from the marginal at t so the point is typical.
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    const std::size_t k0 = pick(rng);
    const double x = (1.0 - t) * (m[k0] + std::sqrt(v[k0]) * normal(rng)) + t * normal(rng);

    const double analytic = mixture_velocity(spec, Tensor4(one, x), t)[0];

    // Self-normalized importance weights over prior draws of X_0.
    const int S = 1000000;
    std::vector<double> vel(S), logw(S);
    for (int s = 0; s < S; ++s) {
      const std::size_t k = pick(rng);
      const double x0 = m[k] + std::sqrt(v[k]) * normal(rng);
      const double r = (x - (1.0 - t) * x0) / t;
      logw[static_cast<std::size_t>(s)] = -0.5 * r * r;
      vel[static_cast<std::size_t>(s)] = (x - x0) / t;
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    double sw = 0.0, swv = 0.0;
    for (int s = 0; s < S; ++s) {
      const double wt = std::exp(logw[static_cast<std::size_t>(s)] - top);
      sw += wt;
      swv += wt * vel[static_cast<std::size_t>(s)];
    }
    const double est = swv / sw;
    double var = 0.0;
    for (int s = 0; s < S; ++s) {
      const double wt = std::exp(logw[static_cast<std::size_t>(s)] - top) / sw;
      const double d = vel[static_cast<std::size_t>(s)] - est;
      var += wt * wt * d * d;
    }
    const double z = std::abs(analytic - est) / std::sqrt(var);
    worst_z = std::max(worst_z, z);
    within += z <= 3.0;
  }
  const double secs = seconds_since(t0);
  return {within == 20 && secs < 60.0,
          std::to_string(within) + "/20 points within 3 SE (worst " + fmt("%.2f", worst_z) +
              " SE), " + fmt("%.1f s", secs)};
}

struct SeedProfiles {
  InfluenceProfile full, high_only;
  DiffProfile diff;
};

const std::vector<SeedProfiles>& profiles() {
  static const std::vector<SeedProfiles> cache = [] {
    std::vector<SeedProfiles> out;
    const TimestepSchedule sched = make_schedule(kSteps);
    for (auto s : kSeeds) {
      const MixturePredictor pred = scene(s);
      const Tensor4 z = noise(s);
      out.push_back({single_step_skip_influence(pred, z, sched, InfluenceVariant::full),
                     single_step_skip_influence(pred, z, sched, InfluenceVariant::high_only),
                     adjacent_diff_profile(pred, z, sched)});
    }
    return out;
  }();
  return cache;
}

Outcome influence_trend() {
  std::vector<double> rhos;
  std::size_t steps = 0;
  std::vector<double> mean_full, mean_high;
  for (const auto& p : profiles()) {
    std::vector<double> progress;
    for (int i : p.full.steps) progress.push_back(static_cast<double>(kSteps - i));
    rhos.push_back(spearman(p.full.influence, progress));
    steps = p.full.influence.size();
    mean_full.resize(steps, 0.0);
    mean_high.resize(steps, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
      mean_full[k] += p.full.influence[k] / static_cast<double>(kSeeds.size());
      mean_high[k] += p.high_only.influence[k] / static_cast<double>(kSeeds.size());
    }
  }
  std::size_t dominated = 0;
  for (std::size_t k = 0; k < steps; ++k) dominated += mean_high[k] <= mean_full[k];
  const double frac = static_cast<double>(dominated) / static_cast<double>(steps);
  const double rho = average(rhos);
  return {rho <= -0.5 && frac >= 0.9,
          "mean Spearman(influence, progress) " + fmt("%.3f", rho) +
              ", HF-only <= full at " + fmt("%.1f%%", 100.0 * frac) + " of steps"};
}

Outcome lfd_alignment() {
  std::vector<double> rhos, fractions;
  for (const auto& p : profiles()) {
    rhos.push_back(spearman(p.diff.low, p.full.influence));
    const std::size_t n = p.diff.raw.size();
    const std::size_t q = n / 4;
    double hi = 0.0, raw = 0.0;
    for (std::size_t k = n - q; k < n; ++k) {
      hi += p.diff.high[k] * p.diff.high[k];
      raw += p.diff.raw[k] * p.diff.raw[k];
    }
    fractions.push_back(hi / raw);
  }
  const double rho = average(rhos), frac = average(fractions);
  return {rho >= 0.6 && frac > 0.5,
          "mean Spearman(LFD, influence) " + fmt("%.3f", rho) +
              ", final-quartile HF energy fraction " + fmt("%.3f", frac)};
}

Outcome resolution() {
  const TimestepSchedule sched = make_schedule(kSteps);
  std::vector<double> p244, p444;
  for (auto s : kSeeds) {
    const MixturePredictor pred = scene(s);
    const auto r = resolution_sensitivity(pred, noise(s), sched, {{2, 4, 4}, {4, 4, 4}});
    p244.push_back(r.factors[0].pearson);
    p444.push_back(r.factors[1].pearson);
  }
  const double a = average(p244), b = average(p444);
  return {a >= 0.9 && a >= b,
          "mean Pearson (2,4,4) " + fmt("%.3f", a) + ", (4,4,4) " + fmt("%.3f", b)};
}

Outcome closed_loop() {
  const TimestepSchedule sched = make_schedule(kSteps);
  double min_skip = 1.0, min_speedup = 1e9;
  double mse_base = 0.0, mse_quarter = 0.0;
  int turbo_ge = 0, break_even_violations = 0;
  auto check_break_even = [&](const RunReport& r) {
    const CostSummary c = cost_accounting(r);
    if (c.skip_fraction > c.break_even_skip_fraction && c.speedup_units < 1.0)
      ++break_even_violations;
  };
  for (auto s : kSeeds) {
    const MixturePredictor pred = scene(s);
    const Tensor4 z = noise(s);
    const Tensor4 ref = sample_baseline(pred, z, sched).latent;
    LfCacheConfig base, quarter, turbo;
    quarter.alpha = 0.25;
    turbo.alpha = 0.7;
    const SampleResult rb = lfcache_sample(pred, z, sched, base);
    const SampleResult rq = lfcache_sample(pred, z, sched, quarter);
    const SampleResult rt = lfcache_sample(pred, z, sched, turbo);
    for (const auto* r : {&rb, &rq, &rt}) check_break_even(r->report);
    const CostSummary cb = cost_accounting(rb.report);
    min_skip = std::min(min_skip, cb.skip_fraction);
    min_speedup = std::min(min_speedup, cb.speedup_units);
    mse_base += mse(rb.latent, ref);
    mse_quarter += mse(rq.latent, ref);
    turbo_ge += rt.report.skip_count >= rb.report.skip_count;
  }
  const double ratio = mse_base / mse_quarter;
  return {min_skip >= 0.2 && min_speedup >= 1.2 && ratio <= 5.0 && turbo_ge >= 6 &&
              break_even_violations == 0,
          "min skip fraction " + fmt("%.2f", min_skip) + ", min speedup " +
              fmt("%.3f", min_speedup) + ", MSE(0.5)/MSE(0.25) " + fmt("%.2f", ratio) +
              ", turbo skips >= base on " + std::to_string(turbo_ge) +
              "/8 seeds, break-even violations " + std::to_string(break_even_violations)};
}

ToyBlockNet constant_tail_net(std::uint64_t seed, std::size_t projecting, std::size_t constant) {
  ToyBlockNetParams p;
  p.blocks = projecting;
  p.channels = kShape.c;
  p.min_scale = 0.5;
  p.seed = seed;
  std::vector<ToyBlock> blocks = ToyBlockNet::random(p).block_params();
  std::mt19937_64 rng(seed + 99);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t j = 0; j < constant; ++j) {
    ToyBlock b;
    b.kind = BlockKind::constant;
    b.scale = 1e-3;
    b.bias = {normal(rng), normal(rng)};
    blocks.insert(blocks.begin() + static_cast<long>((j * 7) % (blocks.size() + 1)), b);
  }
  return ToyBlockNet(kShape.c, std::move(blocks));
}

Outcome blockcache_exactness() {
  const TimestepSchedule sched = make_schedule(kSteps);
  int ok = 0, total = 0;
  // Degenerate configurations against the plain forward along a trajectory.
  for (auto s : kSeeds) {
    ToyBlockNetParams p;
    p.channels = kShape.c;
    p.seed = s;
    const ToyBlockNet net = ToyBlockNet::random(p);
    const Trajectory traj = record_trajectory(net, noise(s), sched);
    for (const BlockCacheConfig cfg : {BlockCacheConfig{0.0, 3}, BlockCacheConfig{0.4, 0}}) {
      BlockCacheState state;
      bool all = true;
      for (std::size_t k = 0; k < traj.latents.size(); ++k) {
        const double t = sched.time(traj.step_of(k));
        const auto r = blockcache_forward(net, traj.latents[k], t, cfg, state);
        all = all && r.output.identical(net.forward(traj.latents[k], t, false).output);
      }
      ok += all;
      ++total;
    }
  }
  // Constant-delta blocks are the least important, so every cache rate that
  // only skips them is exact; a net of only constant blocks is exact at any rate.
  int exact = 0, exact_total = 0;
  for (auto s : kSeeds) {
    const ToyBlockNet mixed = constant_tail_net(s, 6, 6);
    const ToyBlockNet all_constant = constant_tail_net(s, 0, 8);
    const Trajectory traj = record_trajectory(mixed, noise(s), sched);
    for (double rate : {0.0, 0.1, 0.25, 0.4, 0.5}) {
      for (const ToyBlockNet* net : {&mixed, &all_constant}) {
        BlockCacheState state;
        bool all = true;
        for (std::size_t k = 0; k < traj.latents.size(); ++k) {
          const double t = sched.time(traj.step_of(k));
          const auto r = blockcache_forward(*net, traj.latents[k], t, {rate, 3}, state);
          all = all && r.output.identical(net->forward(traj.latents[k], t, false).output);
        }
        exact += all;
        ++exact_total;
      }
    }
    for (double rate : {0.75, 1.0}) {
      BlockCacheState state;
      bool all = true;
      for (std::size_t k = 0; k < traj.latents.size(); ++k) {
        const double t = sched.time(traj.step_of(k));
        const auto r = blockcache_forward(all_constant, traj.latents[k], t, {rate, 3}, state);
        all = all && r.output.identical(all_constant.forward(traj.latents[k], t, false).output);
      }
      exact += all;
      ++exact_total;
    }
  }
  // Pivotal-set size in closed-loop decision logs.
  int size_violations = 0;
  std::size_t partial_rows = 0;
  for (auto s : kSeeds) {
    ToyBlockNetParams p;
    p.channels = kShape.c;
    p.seed = s;
    const ToyBlockNet net = ToyBlockNet::random(p);
    for (double rate : {0.2, 0.4, 0.5, 0.8}) {
      const auto r = lfcache_sample(net, noise(s), sched, LfCacheConfig{},
                                    BlockCacheConfig{rate, 3});
      for (const auto& row : r.report.rows) {
        if (!row.partial_blocks) continue;
        ++partial_rows;
        size_violations += row.pivotal_blocks !=
                           row.total_blocks - skipped_block_count(row.total_blocks, rate);
      }
    }
  }
  return {ok == total && exact == exact_total && size_violations == 0 && partial_rows > 0,
          "degenerate " + std::to_string(ok) + "/" + std::to_string(total) +
              ", constant-delta " + std::to_string(exact) + "/" + std::to_string(exact_total) +
              ", pivotal-size violations " + std::to_string(size_violations) + " over " +
              std::to_string(partial_rows) + " partial steps"};
}

Outcome cost_model() {
  // 25 full and 25 skipped steps, a trial at each of the 50.
  RunReport r;
  r.steps_total = 50;
  r.cost_model = CostModel::for_shape(kShape, DownsampleFactors{2, 4, 4});
  r.baseline_cost_units = 50 * r.cost_model.full_units;
  for (int i = 50; i >= 1; --i) {
    StepRecord row;
    row.step = i;
    row.trial = true;
    row.decision = i % 2 ? Decision::full : Decision::skip;
    row.cost_units = r.cost_model.trial_units +
                     (row.decision == Decision::full ? r.cost_model.full_units : 0.0);
    r.add(row);
  }
  const double want = 50.0 * 32.0 / (25.0 * 32.0 + 50.0);
  const double got = cost_accounting(r).speedup_units;

  // Record a baseline, write it, read it back, replay open-loop.
  const TimestepSchedule sched = make_schedule(kSteps);
  const MixturePredictor pred = scene(3);
  const Tensor4 z = noise(3);
  const SampleResult base = sample_baseline(pred, z, sched);
  const auto path = std::filesystem::temp_directory_path() / "freqcache_acceptance.pctr";
  write_trace(path, record_trace(pred, z, sched));
  const TracePredictor replay(read_trace(path));
  const SampleResult again = sample_baseline(replay, z, sched);
  std::filesystem::remove(path);
  const bool trace_ok = again.latent.identical(base.latent) && again.report.open_loop;
  return {std::abs(got - want) <= 1e-9 && trace_ok,
          "speedup_units " + fmt("%.12f", got) + " vs " + fmt("%.12f", want) +
              ", trace replay " + (trace_ok ? "bitwise identical" : "MISMATCH")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 no-skip degeneracy", no_skip_degeneracy},
      {"C2 accumulate-reset oracle", accumulate_reset_oracle},
      {"C3 spectral correctness", spectral_correctness},
      {"C4 analytic-oracle fidelity", analytic_oracle},
      {"C5 skip-influence trend", influence_trend},
      {"C6 LFD/influence alignment", lfd_alignment},
      {"C7 trial resolution", resolution},
      {"C8 closed-loop speed/quality", closed_loop},
      {"C9 BlockCache exactness", blockcache_exactness},
      {"C10 cost model and trace replay", cost_model},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
