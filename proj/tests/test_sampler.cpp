// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "freqcache/error.hpp"
#include "freqcache/mixture.hpp"
#include "freqcache/sampler.hpp"

using namespace freqcache;

TEST_CASE("uniform and shifted schedules") {
  const auto u = make_schedule(4).descending();
  REQUIRE(u.size() == 5);
  const std::vector<double> want = {1.0, 0.75, 0.5, 0.25, 0.0};
  for (std::size_t i = 0; i < 5; ++i) CHECK(u[i] == want[i]);
  CHECK(make_schedule(7, ScheduleKind::shifted, 1.0).descending() ==
        make_schedule(7).descending());
  const TimestepSchedule s = make_schedule(2, ScheduleKind::shifted, 3.0);
  CHECK(s.time(1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(s.time(2) == 1.0);
  CHECK(s.time(0) == 0.0);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(make_schedule(1), ConfigError);
  CHECK_THROWS_AS(make_schedule(10, ScheduleKind::shifted, 0.0), ConfigError);
  CHECK_THROWS_AS(TimestepSchedule({1.0}), ScheduleError);
  CHECK_THROWS_AS(TimestepSchedule({1.0, 0.5, 0.5, 0.0}), ScheduleError);
  CHECK_THROWS_AS(TimestepSchedule({1.2, 0.0}), ScheduleError);
  CHECK_THROWS_AS(TimestepSchedule({1.0, -0.1}), ScheduleError);
  // A terminal time above zero is allowed.
  CHECK(TimestepSchedule({1.0, 0.5, 0.01}).steps() == 2);
  for (double shift : {0.3, 1.0, 3.0, 7.5}) {
    const auto d = make_schedule(50, ScheduleKind::shifted, shift).descending();
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] < d[i - 1]);
  }
}

TEST_CASE("euler_step examples") {
  const Shape s{1, 2, 2, 1};
  const Tensor4 z = Tensor4::random_normal(s, 1);
  CHECK(euler_step(z, Tensor4(s), 0.5, 0.4).identical(z));
  const Tensor4 r = euler_step(Tensor4(s), Tensor4(s, 1.0), 0.5, 0.4);
  for (double v : r.data()) CHECK(v == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK_THROWS_AS(euler_step(z, Tensor4(s), 0.4, 0.4), ScheduleError);
  CHECK_THROWS_AS(euler_step(z, Tensor4(s), 0.4, 0.5), ScheduleError);
  CHECK_THROWS_AS(euler_step(z, Tensor4(Shape{1, 2, 2, 2}), 0.5, 0.4), DimensionError);
}

TEST_CASE("baseline sampling contract") {
  const Shape s{2, 4, 4, 2};
  const Tensor4 z = Tensor4::random_normal(s, 4);
  const ZeroPredictor zero;
  const SampleResult r0 = sample_baseline(zero, z, make_schedule(10));
  CHECK(r0.latent.identical(z));
  CHECK(r0.report.full_eval_count == 10);
  CHECK(r0.report.skip_count == 0);
  CHECK(r0.report.rows.size() == 10);
  CHECK(r0.report.rows.front().step == 10);
  CHECK(r0.report.rows.back().step == 1);

  // One Euler step from t = 1 to 0.
  const MixturePredictor g(single_gaussian(s, 0.0, 1.0));
  const SampleResult one = sample_baseline(g, z, TimestepSchedule({1.0, 0.0}));
  CHECK(one.report.full_eval_count == 1);
  CHECK(one.latent.identical(euler_step(z, g.evaluate(z, {1, 1.0}), 1.0, 0.0)));

  const MixturePredictor m(scene_mixture(Shape{4, 16, 16, 2}));
  const Tensor4 zz = Tensor4::random_normal(Shape{4, 16, 16, 2}, 8);
  CHECK(sample_baseline(m, zz, make_schedule(20)).latent.identical(
      sample_baseline(m, zz, make_schedule(20)).latent));
}

TEST_CASE("terminal mean of single-Gaussian sampling converges to the data mean") {
  const Shape s{1, 1, 1, 1};
  const MixturePredictor g(single_gaussian(s, 1.5, 0.5));
  const TimestepSchedule sched = make_schedule(1000);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 256; ++seed)
    total += sample_baseline(g, Tensor4::random_normal(s, seed), sched).latent[0];
  CHECK(std::abs(total / 256.0 - 1.5) < 0.1);
}

TEST_CASE("terminal variance of single-Gaussian sampling matches the data variance") {
  const Shape s{1, 1, 1, 8};
  const double var = 2.0;
  const MixturePredictor g(single_gaussian(s, -0.5, var));
  const TimestepSchedule sched = make_schedule(500);
  std::vector<double> samples;
  for (std::uint64_t seed = 0; seed < 512; ++seed) {
    const Tensor4 z0 = sample_baseline(g, Tensor4::random_normal(s, 77 + seed), sched).latent;
    samples.insert(samples.end(), z0.data().begin(), z0.data().end());
  }
  double m = 0.0;
  for (double v : samples) m += v;
  m /= static_cast<double>(samples.size());
  double v2 = 0.0;
  for (double v : samples) v2 += (v - m) * (v - m);
  v2 /= static_cast<double>(samples.size() - 1);
  CHECK(std::abs(v2 - var) <= 0.15 * var);
}

TEST_CASE("two-component sampling splits evenly between modes") {
  const Shape s{1, 1, 1, 2};
  const MixturePredictor p(symmetric_pair(s, 2.0, 1.0, MixtureCoupling::joint));
  const TimestepSchedule sched = make_schedule(200);
  int plus = 0;
  for (std::uint64_t seed = 0; seed < 512; ++seed) {
    const Tensor4 z0 = sample_baseline(p, Tensor4::random_normal(s, 3000 + seed), sched).latent;
    plus += (z0[0] + z0[1]) > 0.0;
  }
  const double frac = plus / 512.0;
  CHECK(frac >= 0.42);
  CHECK(frac <= 0.58);
}

TEST_CASE("schedule refinement shrinks the discretization error") {
  const Shape s{1, 4, 4, 2};
  const MixturePredictor p(symmetric_pair(s, 1.5, 0.5, MixtureCoupling::per_cell));
  const Tensor4 z = Tensor4::random_normal(s, 12);
  const std::vector<int> ladder = {8, 16, 32, 64};
  const Tensor4 ref = sample_baseline(p, z, make_schedule(640)).latent;
  double prev = 1e300;
  for (int n : ladder) {
    const double err = l2_norm(axpy(sample_baseline(p, z, make_schedule(n)).latent, -1.0, ref));
    if (prev > 1e-10) CHECK(err <= 0.95 * prev);
    prev = err;
  }
}

TEST_CASE("record_trajectory keeps every latent and prediction") {
  const Shape s{2, 4, 4, 2};
  const MixturePredictor g(single_gaussian(s, 0.3, 1.0));
  const Tensor4 z = Tensor4::random_normal(s, 2);
  const TimestepSchedule sched = make_schedule(6);
  const Trajectory tr = record_trajectory(g, z, sched);
  REQUIRE(tr.latents.size() == 6);
  CHECK(tr.latents[0].identical(z));
  CHECK(tr.step_of(0) == 6);
  CHECK(tr.step_of(5) == 1);
  CHECK(tr.final_latent.identical(sample_baseline(g, z, sched).latent));
  CHECK(tr.predictions[2].identical(g.evaluate(tr.latents[2], {4, sched.time(4)})));
}
