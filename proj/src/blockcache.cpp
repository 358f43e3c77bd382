// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/blockcache.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "freqcache/error.hpp"

namespace freqcache {

void BlockCacheConfig::validate() const {
  if (!(cache_rate >= 0.0 && cache_rate <= 1.0))
    throw ConfigError("cache_rate must lie in [0, 1]");
  if (refresh_interval < 0) throw ConfigError("refresh_interval must be >= 0");
}

std::size_t skipped_block_count(std::size_t blocks, double cache_rate) {
  const double r = std::nearbyint(cache_rate * static_cast<double>(blocks));
  return std::min(blocks, static_cast<std::size_t>(std::max(r, 0.0)));
}

std::vector<double> block_importance(const std::vector<Tensor4>& intermediates,
                                     const Tensor4& input) {
  std::vector<double> out;
  out.reserve(intermediates.size());
  const Tensor4* prev = &input;
  for (const auto& f : intermediates) {
    check_same_shape(*prev, f, "block_importance");
    out.push_back(l2_norm(axpy(f, -1.0, *prev)));
    prev = &f;
  }
  return out;
}

std::vector<std::size_t> select_pivotal(const std::vector<double>& importances,
                                        double cache_rate) {
  const std::size_t m = importances.size();
  const std::size_t keep = m - skipped_block_count(m, cache_rate);
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return importances[a] > importances[b];
  });
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return idx;
}

BlockCacheResult blockcache_forward(const BlockStructured& net, const Tensor4& z,
                                    double t, const BlockCacheConfig& cfg,
                                    BlockCacheState& state) {
  const std::size_t m = net.block_count();
  if (state.primed && state.deltas.size() != m)
    throw StateError("block cache holds " + std::to_string(state.deltas.size()) +
                     " deltas for a " + std::to_string(m) + "-block network");

  BlockCacheResult result;
  result.block_count = m;
  Tensor4 f = z;

  if (!state.primed || state.age >= cfg.refresh_interval) {
    state.deltas.clear();
    state.deltas.reserve(m);
    std::vector<double> norms(m);
    for (std::size_t j = 0; j < m; ++j) {
      Tensor4 d = net.block_delta(j, f, t);
      norms[j] = l2_norm(d);
      f = add_residual(f, d);
      state.deltas.push_back(std::move(d));
    }
    state.pivotal = select_pivotal(norms, cfg.cache_rate);
    state.age = 0;
    state.primed = true;
    result.pivotal_count = m;
  } else {
    std::size_t next = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const bool pivotal = next < state.pivotal.size() && state.pivotal[next] == j;
      if (pivotal) {
        ++next;
        f = add_residual(f, net.block_delta(j, f, t));
      } else {
        check_same_shape(f, state.deltas[j], "cached block delta");
        f = add_residual(f, state.deltas[j]);
      }
    }
    ++state.age;
    result.partial = true;
    result.pivotal_count = state.pivotal.size();
  }
  result.output = std::move(f);
  return result;
}

}  // namespace freqcache
