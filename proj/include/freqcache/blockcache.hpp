// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Block-level reuse inside one network evaluation. A full-block pass runs
// every block, caches its delta D^j = F^j - F^{j-1}, and ranks blocks by
// ||D^j||. Up to L following passes execute only the pivotal blocks and
// substitute F^{j-1} + D^j for the rest.

#pragma once

#include <vector>

#include "freqcache/predictor.hpp"

namespace freqcache {

struct BlockCacheConfig {
  /// Fraction of blocks skipped on a partial pass.
  double cache_rate = 0.4;
  /// Partial passes allowed between full-block passes.
  int refresh_interval = 3;

  /// Throws ConfigError.
  void validate() const;
  friend bool operator==(const BlockCacheConfig&, const BlockCacheConfig&) = default;
};

struct BlockCacheState {
  std::vector<Tensor4> deltas;
  std::vector<std::size_t> pivotal;  // sorted
  int age = 0;                       // partial passes since the last full-block pass
  bool primed = false;
};

/// round(rate * M) with ties to even.
std::size_t skipped_block_count(std::size_t blocks, double cache_rate);

/// ||F^j - F^{j-1}|| for j = 1..M with F^0 = input.
std::vector<double> block_importance(const std::vector<Tensor4>& intermediates,
                                     const Tensor4& input);

/// The M - round(rate * M) largest entries; ties go to the lower index.
/// Returned in increasing index order.
std::vector<std::size_t> select_pivotal(const std::vector<double>& importances,
                                        double cache_rate);

struct BlockCacheResult {
  Tensor4 output;
  bool partial = false;
  std::size_t pivotal_count = 0;  // blocks executed
  std::size_t block_count = 0;
};

/// Throws StateError when a primed state holds the wrong number of deltas.
BlockCacheResult blockcache_forward(const BlockStructured& net, const Tensor4& z,
                                    double t, const BlockCacheConfig& cfg,
                                    BlockCacheState& state);

}  // namespace freqcache
