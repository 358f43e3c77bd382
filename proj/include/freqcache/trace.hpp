// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Recorded predictions and the PCTR file format.
//
// All integers and reals are little-endian.
//
//   offset  size        field
//   0       4           magic "PCTR"
//   4       4  u32      format version (1)
//   8       4  u32      element tag (1 = f64)
//   12      16 4 x u32  shape T, H, W, C
//   28      4  u32      step count N
//   32      8(N+1) f64  schedule t_N ... t_0
//   ...     N records   i32 step index, f64 t, T*H*W*C f64 prediction
//
// Records run from step N down to step 1 (the terminal evaluation).

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "freqcache/predictor.hpp"
#include "freqcache/schedule.hpp"

namespace freqcache {

inline constexpr char kTraceMagic[4] = {'P', 'C', 'T', 'R'};
inline constexpr std::uint32_t kTraceVersion = 1;
inline constexpr std::uint32_t kTraceElementF64 = 1;

struct TraceRecord {
  int step = 0;
  double t = 0.0;
  Tensor4 prediction;
};

struct TraceArchive {
  Shape shape;
  std::vector<double> schedule;  // t_N first
  std::vector<TraceRecord> records;

  int steps() const { return static_cast<int>(records.size()); }
  /// Record k must hold step N - k at t = schedule[k] with the shared shape.
  /// Throws TraceError.
  void validate() const;
  /// Throws TraceError when the step is absent.
  const TraceRecord& at_step(int step) const;
  TimestepSchedule timestep_schedule() const;
};

/// Runs the predictor without caching and keeps every prediction.
TraceArchive record_trace(const Predictor& pred, const Tensor4& z_init,
                          const TimestepSchedule& sched);

std::vector<std::uint8_t> encode_trace(const TraceArchive& archive);
TraceArchive decode_trace(const std::vector<std::uint8_t>& bytes);
void write_trace(const std::filesystem::path& path, const TraceArchive& archive);
TraceArchive read_trace(const std::filesystem::path& path);

/// Recorded prediction for `step_index`, verbatim.
Tensor4 trace_replay_evaluate(const TraceArchive& archive, int step_index);

/// Open-loop predictor: returns the recorded prediction for the step and
/// ignores the latent. Pooled inputs receive the pooled recording.
class TracePredictor final : public Predictor {
 public:
  explicit TracePredictor(TraceArchive archive);
  Tensor4 evaluate(const Tensor4& z, const StepInfo& step) const override;
  bool open_loop() const override { return true; }
  std::string name() const override { return "trace"; }
  const TraceArchive& archive() const { return archive_; }

 private:
  TraceArchive archive_;
};

}  // namespace freqcache
