// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "freqcache/blockcache.hpp"
#include "freqcache/error.hpp"
#include "freqcache/lfcache.hpp"
#include "freqcache/toy_block_net.hpp"

using namespace freqcache;

namespace {

const Shape kShape{4, 16, 16, 2};

std::vector<std::size_t> idx(std::initializer_list<std::size_t> v) { return v; }

}  // namespace

TEST_CASE("skipped count rounds half to even") {
  CHECK(skipped_block_count(16, 0.4) == 6);   // 6.4
  CHECK(skipped_block_count(5, 0.5) == 2);    // 2.5
  CHECK(skipped_block_count(7, 0.5) == 4);    // 3.5
  CHECK(skipped_block_count(10, 0.25) == 2);  // 2.5
  CHECK(skipped_block_count(3, 1.0 / 3.0) == 1);
  CHECK(skipped_block_count(8, 0.0) == 0);
  CHECK(skipped_block_count(8, 1.0) == 8);
}

TEST_CASE("select_pivotal examples") {
  CHECK(select_pivotal({5, 1, 4, 2}, 0.5) == idx({0, 2}));
  CHECK(select_pivotal({5, 1, 4, 2}, 0.0) == idx({0, 1, 2, 3}));
  CHECK(select_pivotal({3, 3, 1}, 1.0 / 3.0) == idx({0, 1}));
  CHECK(select_pivotal({1, 3, 3}, 2.0 / 3.0) == idx({1}));
  CHECK(select_pivotal({2, 2, 2, 2}, 0.5) == idx({0, 1}));
  CHECK(select_pivotal({1, 2}, 1.0).empty());
}

TEST_CASE("block_importance examples") {
  const Tensor4 z = Tensor4::random_normal(kShape, 1);
  const ToyBlockNet id = ToyBlockNet::identity(4, 2);
  for (double v : block_importance(*id.forward(z, 0.5, true).intermediates, z)) CHECK(v == 0.0);

  const Shape one{1, 1, 1, 1};
  const std::vector<double> single =
      block_importance({Tensor4(one, 1.0)}, Tensor4(one, 0.0));
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 1.0);
  CHECK_THROWS_AS(block_importance({Tensor4(Shape{1, 1, 1, 2})}, Tensor4(one)), DimensionError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((BlockCacheConfig{-0.1, 3}.validate()), ConfigError);
  CHECK_THROWS_AS((BlockCacheConfig{1.1, 3}.validate()), ConfigError);
  CHECK_THROWS_AS((BlockCacheConfig{0.4, -1}.validate()), ConfigError);
  CHECK_NOTHROW((BlockCacheConfig{}.validate()));
}

TEST_CASE("refresh cycle: one full-block pass then L partial passes") {
  const ToyBlockNet net = ToyBlockNet::random({});
  const Tensor4 z = Tensor4::random_normal(kShape, 3);
  BlockCacheState state;
  const BlockCacheConfig cfg{0.4, 3};
  std::vector<bool> partial;
  std::vector<int> ages;
  for (int k = 0; k < 9; ++k) {
    const auto r = blockcache_forward(net, z, 0.9 - 0.05 * k, cfg, state);
    partial.push_back(r.partial);
    ages.push_back(state.age);
    CHECK(state.age <= cfg.refresh_interval);
    CHECK(r.block_count == 16);
    CHECK(r.pivotal_count == (r.partial ? 10u : 16u));
    CHECK(state.pivotal.size() + skipped_block_count(16, 0.4) == 16);
  }
  CHECK(partial == std::vector<bool>{false, true, true, true, false, true, true, true, false});
  CHECK(ages == std::vector<int>{0, 1, 2, 3, 0, 1, 2, 3, 0});
}

TEST_CASE("pivotal set is recomputed at each refresh") {
  const ToyBlockNet net = ToyBlockNet::random({});
  BlockCacheState state;
  const BlockCacheConfig cfg{0.5, 0};
  std::vector<std::vector<std::size_t>> sets;
  for (double t : {0.95, 0.6, 0.3, 0.05}) {
    blockcache_forward(net, Tensor4::random_normal(kShape, 4), t, cfg, state);
    std::vector<double> norms;
    for (const auto& d : state.deltas) norms.push_back(l2_norm(d));
    CHECK(state.pivotal == select_pivotal(norms, 0.5));
    sets.push_back(state.pivotal);
  }
}

TEST_CASE("stale state is rejected") {
  const ToyBlockNet net = ToyBlockNet::random({});
  BlockCacheState state;
  blockcache_forward(net, Tensor4::random_normal(kShape, 1), 0.5, {}, state);
  state.deltas.pop_back();
  CHECK_THROWS_AS(blockcache_forward(net, Tensor4::random_normal(kShape, 1), 0.4, {}, state),
                  StateError);
}

TEST_CASE("degenerate configurations equal the plain forward bitwise") {
  const ToyBlockNet net = ToyBlockNet::random({});
  for (const BlockCacheConfig cfg : {BlockCacheConfig{0.0, 3}, BlockCacheConfig{0.6, 0}}) {
    BlockCacheState state;
    for (int k = 0; k < 8; ++k) {
      const Tensor4 z = Tensor4::random_normal(kShape, 10 + k);
      const double t = 1.0 - 0.1 * k;
      CHECK(blockcache_forward(net, z, t, cfg, state).output.identical(net.forward(z, t, false).output));
    }
  }
}

TEST_CASE("constant-delta blocks are reused exactly") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ToyBlock> blocks;
  for (int j = 0; j < 6; ++j) {
    ToyBlock b;
    b.kind = BlockKind::constant;
    b.scale = 0.1 + 0.1 * j;
    b.bias = {normal(rng), normal(rng)};
    blocks.push_back(b);
  }
  const ToyBlockNet net(2, blocks);
  for (double rate : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    BlockCacheState state;
    for (int k = 0; k < 8; ++k) {
      const Tensor4 z = Tensor4::random_normal(kShape, 20 + k);
      const double t = 1.0 - 0.1 * k;
      CHECK(blockcache_forward(net, z, t, {rate, 3}, state).output.identical(
          net.forward(z, t, false).output));
    }
  }
}

TEST_CASE("closed-loop block cache logs pivotal-set sizes and partial costs") {
  const ToyBlockNet net = ToyBlockNet::random({});
  const Tensor4 z = Tensor4::random_normal(kShape, 8);
  const auto r = lfcache_sample(net, z, make_schedule(50), LfCacheConfig{}, BlockCacheConfig{});
  CHECK(r.report.mode == "lfcache+block");
  CHECK(r.report.partial_block_count > 0);
  for (const auto& row : r.report.rows) {
    CHECK(row.total_blocks == 16);
    if (row.partial_blocks) {
      CHECK(row.pivotal_blocks == 10);
      CHECK(row.decision == Decision::full);
      CHECK(row.cost_units == doctest::Approx(r.report.cost_model.trial_units +
                                              r.report.cost_model.full_units * 10.0 / 16.0));
    }
    if (row.decision == Decision::warmup_full) CHECK_FALSE(row.partial_blocks);
  }
  CHECK_THROWS_AS(lfcache_sample(ZeroPredictor{}, z, make_schedule(10), LfCacheConfig{},
                                 BlockCacheConfig{}),
                  ConfigError);
}

TEST_CASE("block cache with zero rate matches plain lfcache bitwise") {
  const ToyBlockNet net = ToyBlockNet::random({});
  const TimestepSchedule sched = make_schedule(50);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Tensor4 z = Tensor4::random_normal(kShape, 100 + seed);
    const auto plain = lfcache_sample(net, z, sched, LfCacheConfig{});
    const auto zero = lfcache_sample(net, z, sched, LfCacheConfig{}, BlockCacheConfig{0.0, 3});
    const auto no_window = lfcache_sample(net, z, sched, LfCacheConfig{}, BlockCacheConfig{0.4, 0});
    CHECK(zero.latent.identical(plain.latent));
    CHECK(no_window.latent.identical(plain.latent));
    CHECK(zero.report.cost_units == plain.report.cost_units);
  }
}
