// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "freqcache/error.hpp"
#include "freqcache/mixture.hpp"
#include "freqcache/toy_block_net.hpp"
#include "freqcache/trace.hpp"

namespace freqcache {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" +
                      v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::vector<std::size_t> size_list(const std::string& what, const std::string& s,
                                   std::size_t n) {
  const auto parts = split(s, ',');
  if (parts.size() != n)
    throw ConfigError(what + ": expected " + std::to_string(n) +
                      " comma-separated values, got '" + s + "'");
  std::vector<std::size_t> out;
  for (const auto& p : parts) {
    const std::uint64_t v = to_u64(what, p);
    if (v == 0) throw ConfigError(what + ": values must be >= 1");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

ScheduleKind parse_schedule_kind(const std::string& s) {
  if (s == "uniform") return ScheduleKind::uniform;
  if (s == "shifted") return ScheduleKind::shifted;
  throw ConfigError("schedule.kind must be uniform or shifted, got '" + s + "'");
}

ReuseStrategy parse_reuse(const std::string& s) {
  if (s == "prediction") return ReuseStrategy::prediction;
  if (s == "residual") return ReuseStrategy::residual;
  throw ConfigError("lfcache.reuse must be prediction or residual, got '" + s + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"mode", [](RunConfig& c, auto&, auto& v) { c.mode = parse_mode(v); }},
      {"seeds", [](RunConfig& c, auto&, auto& v) { c.seeds = parse_seed_list(v); }},
      {"latent.shape", [](RunConfig& c, auto&, auto& v) { c.latent = parse_shape(v); }},
      {"predictor.kind", [](RunConfig& c, auto&, auto& v) { c.predictor.kind = v; }},
      {"predictor.seed",
       [](RunConfig& c, auto& k, auto& v) { c.predictor.seed = to_u64(k, v); }},
      {"predictor.components",
       [](RunConfig& c, auto& k, auto& v) { c.predictor.components = to_u64(k, v); }},
      {"predictor.amplitude",
       [](RunConfig& c, auto& k, auto& v) { c.predictor.amplitude = to_double(k, v); }},
      {"predictor.variance",
       [](RunConfig& c, auto& k, auto& v) { c.predictor.variance = to_double(k, v); }},
      {"predictor.mean",
       [](RunConfig& c, auto& k, auto& v) { c.predictor.mean = to_double(k, v); }},
      {"predictor.coupling", [](RunConfig& c, auto&, auto& v) { c.predictor.coupling = v; }},
      {"predictor.blocks",
       [](RunConfig& c, auto& k, auto& v) { c.predictor.blocks = to_u64(k, v); }},
      {"predictor.trace", [](RunConfig& c, auto&, auto& v) { c.predictor.trace = v; }},
      {"schedule.steps",
       [](RunConfig& c, auto& k, auto& v) { c.schedule.steps = to_int(k, v); }},
      {"schedule.kind",
       [](RunConfig& c, auto&, auto& v) { c.schedule.kind = parse_schedule_kind(v); }},
      {"schedule.shift",
       [](RunConfig& c, auto& k, auto& v) { c.schedule.shift = to_double(k, v); }},
      {"lfcache.alpha",
       [](RunConfig& c, auto& k, auto& v) { c.lfcache.alpha = to_double(k, v); }},
      {"lfcache.warmup",
       [](RunConfig& c, auto& k, auto& v) { c.lfcache.warmup_steps = to_int(k, v); }},
      {"lfcache.downsample",
       [](RunConfig& c, auto&, auto& v) { c.lfcache.downsample = parse_factors(v); }},
      {"lfcache.reuse",
       [](RunConfig& c, auto&, auto& v) { c.lfcache.reuse = parse_reuse(v); }},
      {"lfcache.radius_fraction",
       [](RunConfig& c, auto& k, auto& v) { c.lfcache.radius_fraction = to_double(k, v); }},
      {"blockcache.cache_rate",
       [](RunConfig& c, auto& k, auto& v) { c.blockcache.cache_rate = to_double(k, v); }},
      {"blockcache.refresh_interval",
       [](RunConfig& c, auto& k, auto& v) { c.blockcache.refresh_interval = to_int(k, v); }},
      {"output.dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = v; }},
      {"output.trace", [](RunConfig& c, auto&, auto& v) { c.output_trace = v; }},
  };
  return m;
}

void check_divisible_or_config(const Shape& s, const DownsampleFactors& f,
                               const std::string& what) {
  try {
    check_divisible(s, f);
  } catch (const DimensionError& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

bool seeded_kind(const std::string& kind) {
  return kind == "scene" || kind == "toy-net";
}

}  // namespace

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::baseline:
      return "baseline";
    case RunMode::lfcache:
      return "lfcache";
    case RunMode::lfcache_block:
      return "lfcache+block";
    case RunMode::open_loop:
      return "open-loop";
  }
  return "?";
}

RunMode parse_mode(const std::string& s) {
  if (s == "baseline") return RunMode::baseline;
  if (s == "lfcache") return RunMode::lfcache;
  if (s == "lfcache+block") return RunMode::lfcache_block;
  if (s == "open-loop") return RunMode::open_loop;
  throw ConfigError("mode must be baseline, lfcache, lfcache+block or open-loop, got '" +
                    s + "'");
}

DownsampleFactors parse_factors(const std::string& s) {
  const auto v = size_list("downsample", s, 3);
  return DownsampleFactors{v[0], v[1], v[2]};
}

Shape parse_shape(const std::string& s) {
  const auto v = size_list("latent.shape", s, 4);
  return Shape{v[0], v[1], v[2], v[3]};
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& p : split(s, ',')) out.push_back(to_u64("seeds", p));
  return out;
}

void RunConfig::validate() const {
  lfcache.validate();
  blockcache.validate();
  if (schedule.steps < 2) throw ConfigError("schedule.steps must be >= 2");
  if (!(schedule.shift > 0.0)) throw ConfigError("schedule.shift must be > 0");
  const auto& k = predictor.kind;
  if (k != "scene" && k != "gaussian" && k != "pair" && k != "toy-net" && k != "trace")
    throw ConfigError("predictor.kind must be scene, gaussian, pair, toy-net or trace, got '" +
                      k + "'");
  if (predictor.coupling != "per-cell" && predictor.coupling != "joint")
    throw ConfigError("predictor.coupling must be per-cell or joint");
  if (!(predictor.variance > 0.0)) throw ConfigError("predictor.variance must be > 0");
  if (k == "scene") {
    if (predictor.components == 0) throw ConfigError("predictor.components must be >= 1");
    check_divisible_or_config(latent, SceneMixtureParams{}.structure,
                              "scene predictor structure (2,4,4)");
  }
  if (k == "trace" && predictor.trace.empty())
    throw ConfigError("predictor.kind = trace requires predictor.trace");
  if (mode == RunMode::lfcache_block && k != "toy-net")
    throw ConfigError("mode lfcache+block requires predictor.kind = toy-net");
  if (mode == RunMode::open_loop && k != "trace")
    throw ConfigError("mode open-loop requires predictor.kind = trace");
  if (mode != RunMode::baseline)
    check_divisible_or_config(latent, lfcache.downsample, "lfcache.downsample");
}

void RunConfig::validate_for_run() const {
  validate();
  if (seeds.empty()) throw ConfigError("no seeds given; set seeds = ... explicitly");
  if (seeded_kind(predictor.kind) && !predictor.seed)
    throw ConfigError("predictor.seed is required for predictor.kind = " +
                      predictor.kind);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[')
      throw ConfigError("line " + std::to_string(lineno) +
                        ": section headers are not supported; use dotted keys");
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::count(key.begin(), key.end(), '.') > 1)
      throw ConfigError("key '" + key + "': nested sections are not supported");
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "mode = " << to_string(c.mode) << "\n";
  if (!c.seeds.empty()) {
    o << "seeds = ";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) o << (i ? "," : "") << c.seeds[i];
    o << "\n";
  }
  o << "latent.shape = " << c.latent.t << "," << c.latent.h << "," << c.latent.w << ","
    << c.latent.c << "\n";
  const auto& p = c.predictor;
  o << "predictor.kind = " << p.kind << "\n";
  if (p.seed) o << "predictor.seed = " << *p.seed << "\n";
  o << "predictor.components = " << p.components << "\n"
    << "predictor.amplitude = " << fmt(p.amplitude) << "\n"
    << "predictor.variance = " << fmt(p.variance) << "\n"
    << "predictor.mean = " << fmt(p.mean) << "\n"
    << "predictor.coupling = " << p.coupling << "\n"
    << "predictor.blocks = " << p.blocks << "\n";
  if (!p.trace.empty()) o << "predictor.trace = " << p.trace << "\n";
  o << "schedule.steps = " << c.schedule.steps << "\n"
    << "schedule.kind = "
    << (c.schedule.kind == ScheduleKind::uniform ? "uniform" : "shifted") << "\n"
    << "schedule.shift = " << fmt(c.schedule.shift) << "\n";
  const auto& l = c.lfcache;
  o << "lfcache.alpha = " << fmt(l.alpha) << "\n"
    << "lfcache.warmup = " << l.warmup_steps << "\n"
    << "lfcache.downsample = " << l.downsample.temporal << "," << l.downsample.height
    << "," << l.downsample.width << "\n"
    << "lfcache.reuse = " << to_string(l.reuse) << "\n"
    << "lfcache.radius_fraction = " << fmt(l.radius_fraction) << "\n";
  o << "blockcache.cache_rate = " << fmt(c.blockcache.cache_rate) << "\n"
    << "blockcache.refresh_interval = " << c.blockcache.refresh_interval << "\n";
  o << "output.dir = " << c.output_dir << "\n";
  if (!c.output_trace.empty()) o << "output.trace = " << c.output_trace << "\n";
  return o.str();
}

std::unique_ptr<Predictor> build_predictor(const RunConfig& cfg) {
  const auto& p = cfg.predictor;
  if (p.kind == "scene") {
    SceneMixtureParams sp;
    sp.components = p.components;
    sp.amplitude = p.amplitude;
    sp.variance = p.variance;
    sp.seed = p.seed.value_or(sp.seed);
    return std::make_unique<MixturePredictor>(scene_mixture(cfg.latent, sp));
  }
  if (p.kind == "gaussian")
    return std::make_unique<MixturePredictor>(
        single_gaussian(cfg.latent, p.mean, p.variance));
  if (p.kind == "pair")
    return std::make_unique<MixturePredictor>(symmetric_pair(
        cfg.latent, p.amplitude, p.variance,
        p.coupling == "joint" ? MixtureCoupling::joint : MixtureCoupling::per_cell));
  if (p.kind == "toy-net") {
    ToyBlockNetParams tp;
    tp.blocks = p.blocks;
    tp.channels = cfg.latent.c;
    tp.seed = p.seed.value_or(tp.seed);
    return std::make_unique<ToyBlockNet>(ToyBlockNet::random(tp));
  }
  if (p.kind == "trace") {
    TraceArchive a = read_trace(p.trace);
    if (a.shape != cfg.latent)
      throw ConfigError("trace shape " + a.shape.to_string() +
                        " differs from latent.shape " + cfg.latent.to_string());
    return std::make_unique<TracePredictor>(std::move(a));
  }
  throw ConfigError("unknown predictor.kind '" + p.kind + "'");
}

TimestepSchedule build_schedule(const RunConfig& cfg) {
  if (cfg.predictor.kind == "trace") {
    const TraceArchive a = read_trace(cfg.predictor.trace);
    return a.timestep_schedule();
  }
  return make_schedule(cfg.schedule.steps, cfg.schedule.kind, cfg.schedule.shift);
}

}  // namespace freqcache
