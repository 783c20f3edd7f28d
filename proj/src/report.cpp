#include "deltaq/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace deltaq {

namespace {

std::string g10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string g10(const std::optional<double>& v) { return v ? g10(*v) : std::string("NA"); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> opt_number(const std::string& s, std::size_t line, const char* column) {
  if (s == "NA" || s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("report line " + std::to_string(line) + ": bad " + column + " '" + s + "'");
}

std::uint64_t count(const std::string& s, std::size_t line, const char* column) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("report line " + std::to_string(line) + ": bad " + column + " '" + s + "'");
}

}  // namespace

void BenchReport::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.scenario_id != b.scenario_id) return a.scenario_id < b.scenario_id;
    return a.seed < b.seed;
  });
}

std::string format_row(const ReportRow& r) {
  std::string s;
  s += r.scenario_id + ',' + r.aqm + ',' + g10(r.utilization) + ',' + g10(r.target_quantile) + ',' +
       g10(r.target_delay) + ',';
  s += std::to_string(r.metrics.completed) + ',' + std::to_string(r.metrics.served_on_time) + ',' +
       std::to_string(r.metrics.served_late) + ',' + std::to_string(r.metrics.dropped) + ',';
  if (r.ok()) {
    s += g10(r.metrics.failed_ratio()) + ',' + g10(r.metrics.delayed_ratio()) + ',' +
         g10(r.metrics.dropped_ratio()) + ',';
  } else {
    s += "ERROR,ERROR,ERROR,";
  }
  s += std::to_string(r.seed) + ',' + g10(r.wall_time);
  return s;
}

void write_report(const BenchReport& report, std::ostream& out) {
  out << kReportHeader << '\n';
  for (const ReportRow& r : report.rows) out << format_row(r) << '\n';
}

void write_report(const BenchReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_report(report, out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

BenchReport read_report(std::istream& in) {
  BenchReport report;
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw std::runtime_error("report: missing or unexpected header");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 14) {
      throw std::runtime_error("report line " + std::to_string(lineno) + ": expected 14 columns, got " +
                               std::to_string(cells.size()));
    }
    ReportRow r;
    r.scenario_id = cells[0];
    r.aqm = cells[1];
    r.utilization = opt_number(cells[2], lineno, "utilization").value_or(0.0);
    r.target_quantile = opt_number(cells[3], lineno, "target_quantile");
    r.target_delay = opt_number(cells[4], lineno, "target_delay").value_or(0.0);
    r.metrics.completed = count(cells[5], lineno, "m");
    r.metrics.served_on_time = count(cells[6], lineno, "served_on_time");
    r.metrics.served_late = count(cells[7], lineno, "delayed");
    r.metrics.dropped = count(cells[8], lineno, "dropped");
    if (cells[9] == "ERROR") r.error = "scenario failed";
    r.seed = count(cells[12], lineno, "seed");
    r.wall_time = opt_number(cells[13], lineno, "wall_time").value_or(0.0);
    if (r.ok() && r.metrics.served_on_time + r.metrics.served_late + r.metrics.dropped != r.metrics.completed) {
      throw std::runtime_error("report line " + std::to_string(lineno) + ": counts do not add up to m");
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

BenchReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_report(in);
}

std::vector<SummaryRow> summarize(const BenchReport& report) {
  std::map<std::string, SummaryRow> groups;
  std::vector<std::string> order;
  for (const ReportRow& r : report.rows) {
    if (!r.ok() || r.metrics.empty()) continue;
    auto [it, inserted] = groups.try_emplace(r.scenario_id);
    SummaryRow& s = it->second;
    const double f = *r.metrics.failed_ratio();
    if (inserted) {
      order.push_back(r.scenario_id);
      s.scenario_id = r.scenario_id;
      s.aqm = r.aqm;
      s.utilization = r.utilization;
      s.target_quantile = r.target_quantile;
      s.failed_min = f;
      s.failed_max = f;
    }
    ++s.runs;
    s.failed_mean += f;
    s.failed_min = std::min(s.failed_min, f);
    s.failed_max = std::max(s.failed_max, f);
    s.delayed_mean += *r.metrics.delayed_ratio();
    s.dropped_mean += *r.metrics.dropped_ratio();
  }
  std::vector<SummaryRow> out;
  std::sort(order.begin(), order.end());
  for (const std::string& id : order) {
    SummaryRow s = groups.at(id);
    const auto n = static_cast<double>(s.runs);
    s.failed_mean /= n;
    s.delayed_mean /= n;
    s.dropped_mean /= n;
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary(const std::vector<SummaryRow>& summary, std::ostream& out) {
  out << "scenario_id,aqm,utilization,target_quantile,runs,failed_mean,failed_min,failed_max,"
         "delayed_mean,dropped_mean\n";
  for (const SummaryRow& s : summary) {
    out << s.scenario_id << ',' << s.aqm << ',' << g10(s.utilization) << ',' << g10(s.target_quantile) << ','
        << s.runs << ',' << g10(s.failed_mean) << ',' << g10(s.failed_min) << ',' << g10(s.failed_max) << ','
        << g10(s.delayed_mean) << ',' << g10(s.dropped_mean) << '\n';
  }
}

}  // namespace deltaq
