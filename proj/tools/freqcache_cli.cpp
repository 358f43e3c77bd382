// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: single runs, benchmarks, sweeps, trace analysis and
// figure series.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "freqcache/config.hpp"
#include "freqcache/error.hpp"
#include "freqcache/harness.hpp"
#include "freqcache/lfcache.hpp"
#include "freqcache/mixture.hpp"
#include "freqcache/report_io.hpp"
#include "freqcache/sampler.hpp"
#include "freqcache/trace.hpp"

namespace fs = std::filesystem;
using namespace freqcache;

namespace {

// Options shared by every subcommand that builds a RunConfig. Flags are
// appended to the config document as extra lines, so they override it.
struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::string mode;
  std::string seeds;
  std::string predictor_seed;

  void add_to(CLI::App* app, bool with_mode) {
    app->add_option("-c,--config", config, "Config file (key = value lines)");
    app->add_option("--set", sets, "Extra config line, e.g. --set lfcache.alpha=0.7");
    if (with_mode)
      app->add_option("--mode", mode, "baseline | lfcache | lfcache+block | open-loop");
    app->add_option("--seed", seeds, "Latent seed(s), comma-separated");
    app->add_option("--predictor-seed", predictor_seed, "Seed of the scene or toy-net predictor");
  }

  RunConfig resolve() const {
    std::string text;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw ConfigError("cannot open config " + config);
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str() + "\n";
    }
    for (const auto& s : sets) text += s + "\n";
    if (!mode.empty()) text += "mode = " + mode + "\n";
    if (!seeds.empty()) text += "seeds = " + seeds + "\n";
    if (!predictor_seed.empty()) text += "predictor.seed = " + predictor_seed + "\n";
    RunConfig cfg = parse_config(text);
    cfg.validate_for_run();
    return cfg;
  }
};

struct Run {
  SampleResult result;
  std::string name;
  double alpha = 0.0;
};

SampleResult run_mode(const RunConfig& cfg, RunMode mode, const Predictor& pred,
                      const TimestepSchedule& sched, const Tensor4& z,
                      const LfCacheConfig& lf) {
  switch (mode) {
    case RunMode::baseline:
      return sample_baseline(pred, z, sched);
    case RunMode::lfcache:
    case RunMode::open_loop: {
      SampleResult r = lfcache_sample(pred, z, sched, lf);
      if (mode == RunMode::open_loop) r.report.mode = "open-loop";
      return r;
    }
    case RunMode::lfcache_block:
      return lfcache_sample(pred, z, sched, lf, cfg.blockcache);
  }
  throw ConfigError("unhandled mode");
}

Tensor4 initial_latent(const RunConfig& cfg, std::uint64_t seed) {
  return Tensor4::random_normal(cfg.latent, seed);
}

nlohmann::json run_json(const RunConfig& cfg, std::uint64_t seed, const RunReport& r) {
  nlohmann::json j = report_to_json(r);
  j["seed"] = seed;
  j["config"] = serialize_config(cfg);
  return j;
}

std::string factor_label(const DownsampleFactors& f) {
  return std::to_string(f.temporal) + "x" + std::to_string(f.height) + "x" + std::to_string(f.width);
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  if (!p.empty()) fs::create_directories(p);
  return p;
}

std::vector<std::string> summary_row(const std::string& name, std::uint64_t seed, double alpha,
                                     const RunReport& r) {
  const CostSummary c = cost_accounting(r);
  const double m = r.quality ? r.quality->mse : 0.0;
  const double p = r.quality ? r.quality->psnr : kPsnrCap;
  return {std::to_string(seed),
          name,
          r.mode,
          format_number(alpha),
          std::to_string(r.skip_count),
          std::to_string(r.full_eval_count),
          std::to_string(r.warmup_count),
          std::to_string(r.trial_eval_count),
          std::to_string(r.partial_block_count),
          format_number(c.skip_fraction),
          format_number(c.speedup_units),
          format_number(c.trial_overhead_fraction),
          format_number(m),
          format_number(p)};
}

const CsvRow kSummaryColumns = {"seed",  "name",   "mode",   "alpha",          "skips",
                                "fulls", "warmup", "trials", "partial_blocks", "skip_fraction",
                                "speedup_units", "trial_overhead_fraction", "mse", "psnr_db"};

void print_table(const CsvRow& header, const std::vector<CsvRow>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  auto line = [&](const CsvRow& r) {
    for (std::size_t i = 0; i < r.size(); ++i)
      std::printf("%-*s%s", static_cast<int>(width[i]), r[i].c_str(), i + 1 < r.size() ? "  " : "\n");
  };
  line(header);
  for (const auto& r : rows) line(r);
}

// ---------------------------------------------------------------------------

int cmd_generate(const CommonOptions& common, const std::string& out,
                 const std::string& decisions, const std::string& trace_out) {
  const RunConfig cfg = common.resolve();
  if (cfg.seeds.size() != 1) throw ConfigError("generate takes exactly one seed");
  const std::uint64_t seed = cfg.seeds.front();
  const auto pred = build_predictor(cfg);
  const TimestepSchedule sched = build_schedule(cfg);
  const Tensor4 z = initial_latent(cfg, seed);

  SampleResult r = run_mode(cfg, cfg.mode, *pred, sched, z, cfg.lfcache);
  if (cfg.mode != RunMode::baseline) {
    const SampleResult base = sample_baseline(*pred, z, sched);
    attach_quality(r.report, r.latent, base.latent, "baseline");
  }
  const fs::path out_path(out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_report_json(out_path, run_json(cfg, seed, r.report), r.report.wall_time_seconds);
  if (!decisions.empty()) write_decision_log(decisions, r.report);
  const std::string trace_path = !trace_out.empty() ? trace_out : cfg.output_trace;
  if (!trace_path.empty()) write_trace(trace_path, record_trace(*pred, z, sched));

  const CostSummary c = cost_accounting(r.report);
  std::printf("%s: %zu skips / %d steps, speedup %.3f (cost units)", r.report.mode.c_str(),
              r.report.skip_count, r.report.steps_total, c.speedup_units);
  if (r.report.quality) std::printf(", mse vs baseline %.3e", r.report.quality->mse);
  std::printf("\nwrote %s\n", out.c_str());
  return 0;
}

int cmd_bench(const CommonOptions& common, const std::string& out) {
  RunConfig cfg = common.resolve();
  const auto pred = build_predictor(cfg);
  const TimestepSchedule sched = build_schedule(cfg);
  std::vector<CsvRow> rows;
  for (std::uint64_t seed : cfg.seeds) {
    const Tensor4 z = initial_latent(cfg, seed);
    const SampleResult base = sample_baseline(*pred, z, sched);
    RunReport br = base.report;
    attach_quality(br, base.latent, base.latent, "baseline");
    rows.push_back(summary_row("baseline", seed, 0.0, br));

    struct Variant {
      std::string name;
      double alpha;
      bool block;
    };
    std::vector<Variant> variants = {{"base", 0.5, false}, {"turbo", 0.7, false}};
    if (pred->blocks() != nullptr) variants.push_back({"turbo+block", 0.7, true});
    for (const auto& v : variants) {
      LfCacheConfig lf = cfg.lfcache;
      lf.alpha = v.alpha;
      SampleResult r = v.block ? lfcache_sample(*pred, z, sched, lf, cfg.blockcache)
                               : lfcache_sample(*pred, z, sched, lf);
      attach_quality(r.report, r.latent, base.latent, "baseline");
      rows.push_back(summary_row(v.name, seed, v.alpha, r.report));
    }
  }
  const fs::path path = ensure_dir(cfg.output_dir) / out;
  write_csv(path, kSummaryColumns, rows);
  print_table(kSummaryColumns, rows);
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int cmd_sweep(const CommonOptions& common, std::vector<double> alphas,
              std::vector<std::string> factor_specs, std::vector<double> cache_rates,
              const std::string& out) {
  const RunConfig cfg = common.resolve();
  const auto pred = build_predictor(cfg);
  const TimestepSchedule sched = build_schedule(cfg);
  if (alphas.empty()) alphas = {cfg.lfcache.alpha};
  std::vector<DownsampleFactors> factors;
  for (auto s : factor_specs) {
    std::replace(s.begin(), s.end(), 'x', ',');
    factors.push_back(parse_factors(s));
  }
  if (factors.empty()) factors = default_factor_list();
  for (const auto& f : factors) check_divisible(cfg.latent, f);
  const bool blocks = !cache_rates.empty();
  if (blocks && pred->blocks() == nullptr)
    throw ConfigError("--cache-rate needs a block-structured predictor (predictor.kind = toy-net)");
  if (!blocks) cache_rates = {-1.0};

  struct Cell {
    std::uint64_t seed;
    double alpha;
    DownsampleFactors f;
    double rate;
  };
  std::vector<Cell> cells;
  for (auto seed : cfg.seeds)
    for (double a : alphas)
      for (const auto& f : factors)
        for (double c : cache_rates) cells.push_back({seed, a, f, c});

  std::map<std::uint64_t, Tensor4> reference;
  for (auto seed : cfg.seeds)
    reference[seed] = sample_baseline(*pred, initial_latent(cfg, seed), sched).latent;

  // Cells are independent; each writes only its own slot.
  std::vector<CsvRow> rows(cells.size());
  std::vector<std::string> errors(cells.size());
  const auto n = static_cast<long long>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    const Cell& c = cells[static_cast<std::size_t>(i)];
    try {
      LfCacheConfig lf = cfg.lfcache;
      lf.alpha = c.alpha;
      lf.downsample = c.f;
      const Tensor4 z = initial_latent(cfg, c.seed);
      SampleResult r = c.rate >= 0.0
                           ? lfcache_sample(*pred, z, sched, lf, BlockCacheConfig{c.rate, cfg.blockcache.refresh_interval})
                           : lfcache_sample(*pred, z, sched, lf);
      const CostSummary s = cost_accounting(r.report);
      rows[static_cast<std::size_t>(i)] = {
          std::to_string(c.seed), format_number(c.alpha), factor_label(c.f),
          c.rate >= 0.0 ? format_number(c.rate) : "none", std::to_string(r.report.skip_count),
          format_number(s.skip_fraction), format_number(s.speedup_units),
          format_number(s.trial_overhead_fraction), format_number(mse(r.latent, reference.at(c.seed)))};
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);
  const CsvRow header = {"seed",          "alpha",         "downsample",
                         "cache_rate",    "skips",         "skip_fraction",
                         "speedup_units", "trial_overhead_fraction", "mse"};
  const fs::path path = ensure_dir(cfg.output_dir) / out;
  write_csv(path, header, rows);
  print_table(header, rows);
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int cmd_analyze_trace(const std::string& trace_path, std::vector<double> alphas, int warmup,
                      const std::string& downsample, std::string out_dir, int delta_points) {
  // Only the recording is consulted; no live predictor is built.
  const TraceArchive archive = read_trace(trace_path);
  const TracePredictor replay(archive);
  const TimestepSchedule sched = archive.timestep_schedule();
  LfCacheConfig lf;
  lf.warmup_steps = warmup;
  lf.downsample = parse_factors(downsample);
  lf.validate();
  check_divisible(archive.shape, lf.downsample);
  if (alphas.empty()) alphas = {0.5, 0.7};
  const fs::path dir = ensure_dir(out_dir);

  // Decisions against the recording. The replayed predictions ignore the
  // latent, so the starting point does not affect the schedule.
  std::vector<CsvRow> schedule_rows;
  for (double a : alphas) {
    lf.alpha = a;
    const SampleResult r = lfcache_sample(replay, Tensor4(archive.shape), sched, lf);
    for (const auto& row : r.report.rows)
      schedule_rows.push_back({format_number(a), std::to_string(row.step), format_number(row.t),
                               to_string(row.decision), format_number(row.trial_lfd),
                               format_number(row.error_before)});
    const CostSummary c = cost_accounting(r.report);
    std::printf("alpha %-5s skips %2zu / %d  speedup %.3f\n", format_number(a).c_str(),
                r.report.skip_count, r.report.steps_total, c.speedup_units);
  }
  write_csv(dir / "trace_schedules.csv",
            {"alpha", "step", "t", "decision", "trial_lfd", "error_before"}, schedule_rows);

  // Counterfactual thresholds on fixed increments: the pooled LFD between
  // consecutive recorded predictions.
  const Shape pooled = downsampled_shape(archive.shape, lf.downsample);
  const FrequencyMask mask = mask_with_fraction(pooled.h, pooled.w, lf.radius_fraction);
  std::vector<double> inc{0.0};
  for (std::size_t k = 1; k < archive.records.size(); ++k)
    inc.push_back(lfd(avg_downsample(archive.records[k].prediction, lf.downsample),
                      avg_downsample(archive.records[k - 1].prediction, lf.downsample), mask));
  double warm_max = 0.0;
  for (std::size_t k = 1; k < inc.size() && static_cast<int>(k) < std::max(warmup, 2); ++k)
    warm_max = std::max(warm_max, inc[k]);
  const CostModel cm = CostModel::for_shape(archive.shape, lf.downsample);
  const double n = static_cast<double>(archive.records.size());
  std::vector<CsvRow> delta_rows;
  for (int p = 0; p <= delta_points; ++p) {
    const double alpha_equiv = 2.0 * p / delta_points;
    const double delta = alpha_equiv * warm_max;
    const auto d = simulate_with_threshold(inc, delta);
    const auto skips = static_cast<double>(std::count(d.begin(), d.end(), Decision::skip));
    const double cost = (n - skips) * cm.full_units + (n - 1.0) * cm.trial_units;
    delta_rows.push_back({format_number(delta), format_number(alpha_equiv),
                          format_number(n - skips), format_number(skips),
                          format_number(n * cm.full_units / cost)});
  }
  write_csv(dir / "trace_thresholds.csv",
            {"delta", "alpha_equivalent", "full_count", "skip_count", "speedup_units"}, delta_rows);
  std::printf("wrote %s and %s\n", (dir / "trace_schedules.csv").string().c_str(),
              (dir / "trace_thresholds.csv").string().c_str());
  return 0;
}

std::vector<double> as_x(const std::vector<int>& steps) {
  return std::vector<double>(steps.begin(), steps.end());
}

double series_max(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

int cmd_figures(const CommonOptions& common, bool svg, std::string toy_seed) {
  const RunConfig cfg = common.resolve();
  if (cfg.seeds.size() != 1) throw ConfigError("figures takes exactly one seed");
  const std::uint64_t seed = cfg.seeds.front();
  const auto pred = build_predictor(cfg);
  const TimestepSchedule sched = build_schedule(cfg);
  const Tensor4 z = initial_latent(cfg, seed);
  const fs::path dir = ensure_dir(cfg.output_dir);
  nlohmann::json summary = {{"seed", seed}, {"config", serialize_config(cfg)}};

  // Skip influence per variant.
  std::vector<InfluenceProfile> inf;
  for (auto v : {InfluenceVariant::full, InfluenceVariant::low_only, InfluenceVariant::high_only})
    inf.push_back(single_step_skip_influence(*pred, z, sched, v, cfg.lfcache.radius_fraction));
  std::vector<CsvRow> rows;
  for (std::size_t k = 0; k < inf[0].steps.size(); ++k)
    rows.push_back({std::to_string(inf[0].steps[k]), format_number(inf[0].influence[k]),
                    format_number(inf[1].influence[k]), format_number(inf[2].influence[k])});
  write_csv(dir / "influence.csv", {"step", "full", "low_only", "high_only"}, rows);
  for (const auto& p : inf) summary["influence_max"][to_string(p.variant)] = series_max(p.influence);

  // Adjacent differences.
  const DiffProfile d = adjacent_diff_profile(*pred, z, sched, cfg.lfcache.radius_fraction);
  rows.clear();
  for (std::size_t k = 0; k < d.steps.size(); ++k)
    rows.push_back({std::to_string(d.steps[k]), format_number(d.raw[k]), format_number(d.low[k]),
                    format_number(d.high[k])});
  write_csv(dir / "adjacent_diff.csv", {"step", "raw", "low", "high"}, rows);
  summary["adjacent_diff_max"] = {{"raw", series_max(d.raw)}, {"low", series_max(d.low)},
                                  {"high", series_max(d.high)}};
  summary["spearman_lfd_influence"] = spearman(d.low, inf[0].influence);

  // Trial resolution.
  std::vector<DownsampleFactors> factors;
  for (const auto& f : default_factor_list())
    if (cfg.latent.t % f.temporal == 0 && cfg.latent.h % f.height == 0 &&
        cfg.latent.w % f.width == 0)
      factors.push_back(f);
  const ResolutionSensitivity rs =
      resolution_sensitivity(*pred, z, sched, factors, cfg.lfcache.radius_fraction);
  CsvRow header = {"step", "full"};
  for (const auto& f : rs.factors) header.push_back(factor_label(f.factors));
  rows.clear();
  for (std::size_t k = 0; k < rs.steps.size(); ++k) {
    CsvRow r = {std::to_string(rs.steps[k]), format_number(rs.full_lfd[k])};
    for (const auto& f : rs.factors) r.push_back(format_number(f.lfd[k]));
    rows.push_back(r);
  }
  write_csv(dir / "resolution_lfd.csv", header, rows);
  for (const auto& f : rs.factors)
    summary["resolution"][factor_label(f.factors)] = {{"pearson", f.pearson}, {"spearman", f.spearman}};

  // Block importance on the toy network.
  ToyBlockNetParams tp;
  tp.channels = cfg.latent.c;
  if (!toy_seed.empty()) tp.seed = std::stoull(toy_seed);
  else if (cfg.predictor.seed) tp.seed = *cfg.predictor.seed;
  const ToyBlockNet net = ToyBlockNet::random(tp);
  const int n = sched.steps();
  std::vector<int> probes;
  for (int p : {n, (3 * n) / 4, n / 2, n / 4, 1})
    if (std::find(probes.begin(), probes.end(), p) == probes.end() && p >= 1) probes.push_back(p);
  const auto bp = block_profile(net, z, sched, probes);
  header = {"block"};
  for (const auto& row : bp) header.push_back("step_" + std::to_string(row.step));
  rows.clear();
  for (std::size_t j = 0; j < net.block_count(); ++j) {
    CsvRow r = {std::to_string(j)};
    for (const auto& row : bp) r.push_back(format_number(row.importance[j]));
    rows.push_back(r);
  }
  write_csv(dir / "block_importance.csv", header, rows);
  summary["toy_net_seed"] = tp.seed;

  if (svg) {
    write_svg_lines(dir / "influence.svg", "Single-step skip influence", "step",
                    as_x(inf[0].steps),
                    {{"full", inf[0].influence}, {"low-only", inf[1].influence},
                     {"high-only", inf[2].influence}});
    write_svg_lines(dir / "adjacent_diff.svg", "Adjacent prediction difference", "step",
                    as_x(d.steps), {{"raw", d.raw}, {"low", d.low}, {"high", d.high}});
    std::vector<SvgSeries> res = {{"full", rs.full_lfd}};
    for (const auto& f : rs.factors) res.push_back({factor_label(f.factors), f.lfd});
    write_svg_lines(dir / "resolution_lfd.svg", "Trial LFD by pooling factor", "step",
                    as_x(rs.steps), res);
    std::vector<double> blocks(net.block_count());
    std::iota(blocks.begin(), blocks.end(), 0.0);
    std::vector<SvgSeries> imp;
    for (const auto& row : bp) imp.push_back({"step " + std::to_string(row.step), row.importance});
    write_svg_lines(dir / "block_importance.svg", "Block importance", "block", blocks, imp);
  }
  {
    std::ofstream js(dir / "figures_summary.json");
    js << summary.dump(2) << "\n";
  }
  std::printf("wrote figure series to %s\n", dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freqcache: frequency-aware step caching for rectified-flow samplers"};
  app.require_subcommand(1);

  CommonOptions gen_opts;
  std::string gen_out = "report.json", gen_decisions, gen_trace;
  auto* gen = app.add_subcommand("generate", "One sampling run, JSON report, optional trace");
  gen_opts.add_to(gen, true);
  gen->add_option("-o,--out", gen_out, "Report path");
  gen->add_option("--decisions", gen_decisions, "Decision-log CSV path");
  gen->add_option("--trace", gen_trace, "Write the no-cache predictions as a PCTR trace");

  CommonOptions bench_opts;
  std::string bench_out = "bench.csv";
  auto* bench = app.add_subcommand("bench", "Baseline against base/turbo cached runs");
  bench_opts.add_to(bench, false);
  bench->add_option("-o,--out", bench_out, "CSV file name inside output.dir");

  CommonOptions sweep_opts;
  std::vector<double> sweep_alphas, sweep_rates;
  std::vector<std::string> sweep_factors;
  std::string sweep_out = "sweep.csv";
  auto* sweep = app.add_subcommand("sweep", "Grid over alpha, pooling factors and cache rate");
  sweep_opts.add_to(sweep, false);
  sweep->add_option("--alpha", sweep_alphas, "Alpha values")->delimiter(',');
  sweep->add_option("--factor", sweep_factors, "Pooling factors as TxHxW (repeatable)");
  sweep->add_option("--cache-rate", sweep_rates, "Block cache rates")->delimiter(',');
  sweep->add_option("-o,--out", sweep_out, "CSV file name inside output.dir");

  std::string at_trace, at_downsample = "2,4,4", at_out = ".";
  std::vector<double> at_alphas;
  int at_warmup = 5, at_points = 40;
  auto* at = app.add_subcommand("analyze-trace", "Open-loop schedules and threshold analysis");
  at->add_option("trace", at_trace, "PCTR trace file")->required();
  at->add_option("--alpha", at_alphas, "Alpha values")->delimiter(',');
  at->add_option("--warmup", at_warmup, "Warmup steps");
  at->add_option("--downsample", at_downsample, "Pooling factors r,s_h,s_w");
  at->add_option("--points", at_points, "Threshold grid size");
  at->add_option("-o,--out-dir", at_out, "Output directory");

  CommonOptions fig_opts;
  bool fig_svg = false;
  std::string fig_toy_seed;
  auto* fig = app.add_subcommand("figures", "CSV series for the diagnostic experiments");
  fig_opts.add_to(fig, false);
  fig->add_flag("--svg", fig_svg, "Also write SVG line plots");
  fig->add_option("--toy-seed", fig_toy_seed, "Seed of the toy network for block profiles");

  CLI11_PARSE(app, argc, argv);
  try {
    if (gen->parsed()) return cmd_generate(gen_opts, gen_out, gen_decisions, gen_trace);
    if (bench->parsed()) return cmd_bench(bench_opts, bench_out);
    if (sweep->parsed())
      return cmd_sweep(sweep_opts, sweep_alphas, sweep_factors, sweep_rates, sweep_out);
    if (at->parsed())
      return cmd_analyze_trace(at_trace, at_alphas, at_warmup, at_downsample, at_out, at_points);
    if (fig->parsed()) return cmd_figures(fig_opts, fig_svg, fig_toy_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "freqcache: %s\n", e.what());
    return 1;
  }
  return 1;
}
