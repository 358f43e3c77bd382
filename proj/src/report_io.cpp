// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "freqcache/error.hpp"
#include "freqcache/spectral.hpp"

namespace freqcache {

const std::vector<std::string> kDecisionLogColumns = {
    "step",        "t",          "decision",   "trial",          "trial_lfd",
    "error_before", "error_after", "cost_units", "partial_blocks", "pivotal_blocks",
    "total_blocks"};

std::string format_number(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

nlohmann::json report_to_json(const RunReport& r) {
  using nlohmann::json;
  const CostSummary cost = cost_accounting(r);
  json rows = json::array();
  for (const auto& s : r.rows) {
    rows.push_back({{"step", s.step},
                    {"t", s.t},
                    {"decision", to_string(s.decision)},
                    {"trial", s.trial},
                    {"trial_lfd", s.trial_lfd},
                    {"error_before", s.error_before},
                    {"error_after", s.error_after},
                    {"cost_units", s.cost_units},
                    {"partial_blocks", s.partial_blocks},
                    {"pivotal_blocks", s.pivotal_blocks},
                    {"total_blocks", s.total_blocks}});
  }
  json j = {
      {"schema_version", kReportSchemaVersion},
      {"mode", r.mode},
      {"predictor", r.predictor},
      {"latent", {r.latent.t, r.latent.h, r.latent.w, r.latent.c}},
      {"steps_total", r.steps_total},
      {"open_loop", r.open_loop},
      {"counts",
       {{"full", r.full_eval_count},
        {"warmup", r.warmup_count},
        {"skip", r.skip_count},
        {"trial", r.trial_eval_count},
        {"partial_block", r.partial_block_count}}},
      {"cost",
       {{"units", r.cost_units},
        {"baseline_units", r.baseline_cost_units},
        {"full_eval_units", r.cost_model.full_units},
        {"trial_eval_units", r.cost_model.trial_units},
        {"speedup_units", cost.speedup_units},
        {"skip_fraction", cost.skip_fraction},
        {"trial_overhead_fraction", cost.trial_overhead_fraction},
        {"break_even_skip_fraction", cost.break_even_skip_fraction}}},
      {"threshold",
       {{"set", r.threshold_set},
        {"delta", r.threshold},
        {"warmup_max_lfd", r.warmup_max_lfd}}},
      {"spectral",
       {{"fft_normalization", kFftNormalization},
        {"parseval_constant", kParsevalConstant},
        {"mask", "centered disc over signed frequency bins, radius = fraction * min(H, W)"}}},
      {"rows", rows},
  };
  if (r.quality) {
    j["quality"] = {{"mse", r.quality->mse},
                    {"psnr_db", r.quality->psnr},
                    {"psnr_cap_db", kPsnrCap},
                    {"reference", r.quality->reference}};
  }
  return j;
}

void validate_report_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("report is not a JSON object");
  if (!j.contains("schema_version") || j["schema_version"] != kReportSchemaVersion)
    throw ConfigError("report schema_version must be " +
                      std::to_string(kReportSchemaVersion));
  for (const char* key : {"mode", "predictor", "latent", "steps_total", "open_loop",
                          "counts", "cost", "threshold", "spectral", "rows"}) {
    if (!j.contains(key)) throw ConfigError(std::string("report lacks field '") + key + "'");
  }
  if (!j["rows"].is_array()) throw ConfigError("report rows must be an array");
  if (j["rows"].size() != j["steps_total"].get<std::size_t>())
    throw ConfigError("report has one row per step");
  for (const auto& row : j["rows"])
    for (const auto& col : kDecisionLogColumns)
      if (!row.contains(col)) throw ConfigError("report row lacks '" + col + "'");
}

void write_report_json(const std::filesystem::path& path, nlohmann::json j,
                       double wall_time_seconds) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  j["timing"] = {{"timestamp", ts.str()}, {"wall_time_seconds", wall_time_seconds}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void write_csv(const std::filesystem::path& path, const CsvRow& header,
               const std::vector<CsvRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  // Fields holding a separator, quote or newline are quoted, quotes doubled.
  auto field = [&](const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out << f;
      return;
    }
    out << '"';
    for (char ch : f) out << (ch == '"' ? "\"\"" : std::string(1, ch));
    out << '"';
  };
  auto line = [&](const CsvRow& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ",";
      field(r[i]);
    }
    out << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

void write_decision_log(const std::filesystem::path& path, const RunReport& report) {
  std::vector<CsvRow> rows;
  for (const auto& s : report.rows) {
    rows.push_back({std::to_string(s.step), format_number(s.t), to_string(s.decision),
                    s.trial ? "1" : "0", format_number(s.trial_lfd),
                    format_number(s.error_before), format_number(s.error_after),
                    format_number(s.cost_units), s.partial_blocks ? "1" : "0",
                    std::to_string(s.pivotal_blocks), std::to_string(s.total_blocks)});
  }
  write_csv(path, kDecisionLogColumns, rows);
}

void write_svg_lines(const std::filesystem::path& path, const std::string& title,
                     const std::string& x_label, const std::vector<double>& x,
                     const std::vector<SvgSeries>& series) {
  double ymin = 0.0, ymax = 0.0;
  bool any = false;
  for (const auto& s : series)
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      ymin = any ? std::min(ymin, v) : v;
      ymax = any ? std::max(ymax, v) : v;
      any = true;
    }
  if (!any || x.empty()) return;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double xmin = *std::min_element(x.begin(), x.end());
  double xmax = *std::max_element(x.begin(), x.end());
  if (xmax == xmin) xmax = xmin + 1.0;

  constexpr double W = 640, H = 400, L = 60, R = 150, T = 40, B = 50;
  auto px = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf"};

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
      << H - B << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n"
      << "<text x=\"" << L - 5 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\">"
      << format_number(ymax) << "</text>\n"
      << "<text x=\"" << L - 5 << "\" y=\"" << H - B << "\" text-anchor=\"end\">"
      << format_number(ymin) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % std::size(colors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    const std::size_t n = std::min(x.size(), series[s].values.size());
    for (std::size_t i = 0; i < n; ++i)
      if (std::isfinite(series[s].values[i]))
        out << px(x[i]) << "," << py(series[s].values[i]) << " ";
    out << "\"/>\n<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (s + 1)
        << "\" fill=\"" << color << "\">" << series[s].name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace freqcache
