// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Report serialization. JSON reports carry everything except wall-clock
// data outside the "timing" object, so two runs of the same configuration
// produce identical files once "timing" is removed.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "freqcache/harness.hpp"
#include "freqcache/report.hpp"
#include "json.hpp"

namespace freqcache {

inline constexpr int kReportSchemaVersion = 1;

/// Column order of decision-log CSV files.
extern const std::vector<std::string> kDecisionLogColumns;

nlohmann::json report_to_json(const RunReport& report);
/// Throws ConfigError when required fields are missing or the schema
/// version differs.
void validate_report_json(const nlohmann::json& j);
/// Adds the "timing" object (timestamp and wall time) and writes `j`.
void write_report_json(const std::filesystem::path& path, nlohmann::json j,
                       double wall_time_seconds);

using CsvRow = std::vector<std::string>;
void write_csv(const std::filesystem::path& path, const CsvRow& header,
               const std::vector<CsvRow>& rows);
void write_decision_log(const std::filesystem::path& path, const RunReport& report);

/// Shortest round-trip decimal form.
std::string format_number(double v);

struct SvgSeries {
  std::string name;
  std::vector<double> values;
};

/// Line chart sharing one x axis. Nothing is written when every series is
/// empty.
void write_svg_lines(const std::filesystem::path& path, const std::string& title,
                     const std::string& x_label, const std::vector<double>& x,
                     const std::vector<SvgSeries>& series);

}  // namespace freqcache
