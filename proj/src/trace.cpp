// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/trace.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "freqcache/error.hpp"
#include "freqcache/sampler.hpp"

namespace freqcache {
namespace {

static_assert(std::endian::native == std::endian::little,
              "trace I/O assumes a little-endian host");

constexpr std::size_t kHeaderFixed = 32;
constexpr std::size_t kRecordPrefix = 4 + 8;

class Writer {
 public:
  template <class T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes.insert(bytes.end(), p, p + sizeof(T));
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}
  template <class T>
  T get(const char* what) {
    if (pos_ + sizeof(T) > bytes_.size())
      throw TraceError(std::string("truncated trace reading ") + what +
                       " at byte offset " + std::to_string(pos_));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t pos() const { return pos_; }
  const std::uint8_t* here() const { return bytes_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t to_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max())
    throw TraceError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void TraceArchive::validate() const {
  if (records.empty()) throw TraceError("trace has no records");
  if (schedule.size() != records.size() + 1)
    throw TraceError("trace schedule must hold N + 1 times");
  const int n = steps();
  for (int k = 0; k < n; ++k) {
    const TraceRecord& r = records[static_cast<std::size_t>(k)];
    if (r.step != n - k)
      throw TraceError("trace record " + std::to_string(k) + " has step " +
                       std::to_string(r.step) + ", expected " +
                       std::to_string(n - k));
    if (r.t != schedule[static_cast<std::size_t>(k)])
      throw TraceError("trace record " + std::to_string(k) +
                       " time does not match the schedule");
    if (r.prediction.shape() != shape)
      throw TraceError("trace record " + std::to_string(k) + " shape " +
                       r.prediction.shape().to_string() + " differs from " +
                       shape.to_string());
  }
}

const TraceRecord& TraceArchive::at_step(int step) const {
  const int n = steps();
  if (step < 1 || step > n)
    throw TraceError("step " + std::to_string(step) +
                     " not in trace with N = " + std::to_string(n));
  return records[static_cast<std::size_t>(n - step)];
}

TimestepSchedule TraceArchive::timestep_schedule() const {
  try {
    return TimestepSchedule(schedule);
  } catch (const ScheduleError& e) {
    throw TraceError(std::string("trace schedule invalid: ") + e.what());
  }
}

TraceArchive record_trace(const Predictor& pred, const Tensor4& z_init,
                          const TimestepSchedule& sched) {
  Trajectory traj = record_trajectory(pred, z_init, sched);
  TraceArchive a;
  a.shape = z_init.shape();
  a.schedule = sched.descending();
  for (std::size_t k = 0; k < traj.predictions.size(); ++k)
    a.records.push_back(TraceRecord{traj.step_of(k), sched.time(traj.step_of(k)),
                                    std::move(traj.predictions[k])});
  return a;
}

std::vector<std::uint8_t> encode_trace(const TraceArchive& archive) {
  archive.validate();
  Writer w;
  for (char c : kTraceMagic) w.put(static_cast<std::uint8_t>(c));
  w.put(kTraceVersion);
  w.put(kTraceElementF64);
  w.put(to_u32(archive.shape.t, "T"));
  w.put(to_u32(archive.shape.h, "H"));
  w.put(to_u32(archive.shape.w, "W"));
  w.put(to_u32(archive.shape.c, "C"));
  w.put(to_u32(archive.records.size(), "N"));
  for (double t : archive.schedule) w.put(t);
  for (const auto& r : archive.records) {
    w.put(static_cast<std::int32_t>(r.step));
    w.put(r.t);
    for (double v : r.prediction.data()) w.put(v);
  }
  return std::move(w.bytes);
}

TraceArchive decode_trace(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto c = r.get<std::uint8_t>("magic");
    if (c != static_cast<std::uint8_t>(kTraceMagic[i]))
      throw TraceError("bad trace magic at byte offset " + std::to_string(i));
  }
  const auto version = r.get<std::uint32_t>("version");
  if (version != kTraceVersion)
    throw TraceError("unsupported trace version " + std::to_string(version) +
                     " at byte offset 4");
  const auto tag = r.get<std::uint32_t>("element tag");
  if (tag != kTraceElementF64)
    throw TraceError("unsupported element tag " + std::to_string(tag) +
                     " at byte offset 8");
  TraceArchive a;
  a.shape.t = r.get<std::uint32_t>("shape");
  a.shape.h = r.get<std::uint32_t>("shape");
  a.shape.w = r.get<std::uint32_t>("shape");
  a.shape.c = r.get<std::uint32_t>("shape");
  if (a.shape.size() == 0) throw TraceError("zero-sized trace shape at byte offset 12");
  const std::size_t n = r.get<std::uint32_t>("step count");

  const std::size_t cells = a.shape.size();
  const std::size_t expected =
      kHeaderFixed + 8 * (n + 1) + n * (kRecordPrefix + 8 * cells);
  if (bytes.size() != expected)
    throw TraceError("trace length mismatch: expected " +
                     std::to_string(expected) + " bytes, got " +
                     std::to_string(bytes.size()) + " (payload starts at byte offset " +
                     std::to_string(kHeaderFixed + 8 * (n + 1)) + ")");

  a.schedule.resize(n + 1);
  for (double& t : a.schedule) t = r.get<double>("schedule");
  a.records.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    TraceRecord rec;
    rec.step = r.get<std::int32_t>("step index");
    rec.t = r.get<double>("record time");
    std::vector<double> data(cells);
    std::memcpy(data.data(), r.here(), 8 * cells);
    r.skip(8 * cells);
    try {
      rec.prediction = Tensor4(a.shape, std::move(data));
    } catch (const Error& e) {
      throw TraceError("trace record " + std::to_string(k) + ": " + e.what());
    }
    a.records.push_back(std::move(rec));
  }
  a.validate();
  return a;
}

void write_trace(const std::filesystem::path& path, const TraceArchive& archive) {
  const auto bytes = encode_trace(archive);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw TraceError("failed writing " + path.string());
}

TraceArchive read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

Tensor4 trace_replay_evaluate(const TraceArchive& archive, int step_index) {
  return archive.at_step(step_index).prediction;
}

TracePredictor::TracePredictor(TraceArchive archive)
    : archive_(std::move(archive)) {
  archive_.validate();
}

Tensor4 TracePredictor::evaluate(const Tensor4& z, const StepInfo& step) const {
  const Tensor4& rec = archive_.at_step(step.index).prediction;
  if (z.shape() == archive_.shape) return rec;
  const Shape& s = archive_.shape;
  const Shape& p = z.shape();
  if (p.c != s.c || s.t % p.t != 0 || s.h % p.h != 0 || s.w % p.w != 0)
    throw DimensionError("input " + p.to_string() +
                         " is not a pooling of trace shape " + s.to_string());
  return avg_downsample(rec, DownsampleFactors{s.t / p.t, s.h / p.h, s.w / p.w});
}

}  // namespace freqcache
