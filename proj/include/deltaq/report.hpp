#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deltaq/codel.hpp"
#include "deltaq/queue_model.hpp"

namespace deltaq {

inline constexpr std::string_view kReportHeader =
    "scenario_id,aqm,utilization,target_quantile,target_delay,m,served_on_time,delayed,dropped,"
    "failed_ratio,delayed_ratio,dropped_ratio,seed,wall_time";

struct ReportRow {
  std::string scenario_id;
  std::string aqm;
  double utilization = 0.0;
  std::optional<double> target_quantile;
  double target_delay = 0.0;
  RunMetrics metrics;
  std::uint64_t seed = 0;
  double wall_time = 0.0;

  // Non-empty when the scenario could not run; ratio columns then read ERROR.
  std::string error;
  // Not serialised: details kept for in-process consumers.
  std::optional<CodelConfig> codel;
  std::optional<std::uint64_t> model_fingerprint;

  bool ok() const noexcept { return error.empty(); }
};

struct BenchReport {
  std::vector<ReportRow> rows;

  // Sort by (scenario_id, seed).
  void sort();
};

// Floats carry 10 significant digits; missing values read NA.
std::string format_row(const ReportRow& row);
void write_report(const BenchReport& report, std::ostream& out);
void write_report(const BenchReport& report, const std::filesystem::path& path);

// Parses a report; rows with ERROR ratios come back with a non-empty error.
BenchReport read_report(std::istream& in);
BenchReport read_report(const std::filesystem::path& path);

struct SummaryRow {
  std::string scenario_id;
  std::string aqm;
  double utilization = 0.0;
  std::optional<double> target_quantile;
  std::size_t runs = 0;
  double failed_mean = 0.0;
  double failed_min = 0.0;
  double failed_max = 0.0;
  double delayed_mean = 0.0;
  double dropped_mean = 0.0;
};

// Aggregates successful rows across seeds, per scenario_id.
std::vector<SummaryRow> summarize(const BenchReport& report);
void write_summary(const std::vector<SummaryRow>& summary, std::ostream& out);

}  // namespace deltaq
