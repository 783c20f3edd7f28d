#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "deltaq/calibration.hpp"
#include "deltaq/codel.hpp"
#include "deltaq/latency_model.hpp"
#include "deltaq/report.hpp"
#include "deltaq/scenario.hpp"

namespace deltaq {

// Environment variable naming the number of concurrent scenarios.
inline constexpr const char* kJobsEnvVar = "DELTAQ_JOBS";

struct CodelCandidateScore {
  CodelConfig config;
  double failed_ratio = 0.0;
};

struct CodelTuning {
  CodelConfig best;
  std::vector<CodelCandidateScore> scores;
};

// target in target_factors x target_delay, interval in interval_factors x mean service.
std::vector<CodelConfig> codel_grid(double target_delay, double mean_service,
                                    const std::vector<double>& target_factors,
                                    const std::vector<double>& interval_factors);

// Runs one pilot of `pilot_packets` per candidate and keeps the lowest failed
// ratio; ties go to the smaller target, then the smaller interval.
CodelTuning tune_codel(const ScenarioConfig& base, double target_delay, const std::vector<CodelConfig>& grid,
                       std::uint64_t pilot_packets);

struct LoadedModel {
  std::shared_ptr<const ConditionalLatencyModel> model;
  std::uint64_t fingerprint = 0;
};

/// Thread-safe model-file cache; each path is loaded once per suite.
class ModelCache {
 public:
  LoadedModel get(const std::string& path);

 private:
  std::mutex mutex_;
  std::map<std::string, LoadedModel> models_;
};

struct RunContext {
  CalibrationCache calibration;
  ModelCache models;
};

double resolve_target_delay(const ScenarioConfig& config, RunContext& ctx);

// Runs one scenario; failures are reported in row.error rather than thrown.
ReportRow run_scenario(const ScenarioConfig& config, RunContext& ctx);

struct BenchOptions {
  // 0: take DELTAQ_JOBS, else 1.
  int jobs = 0;
  // Called under a lock as each row finishes (completion order).
  std::function<void(const ReportRow&)> on_row;
};

int resolve_jobs(int requested);

// Scenarios run concurrently, each single-threaded; rows come back sorted
// by (scenario_id, seed) regardless of completion order.
BenchReport run_benchmark(const std::vector<ScenarioConfig>& suite, const BenchOptions& options = {});
BenchReport run_benchmark(const std::vector<ScenarioConfig>& suite, const BenchOptions& options,
                          RunContext& ctx);

}  // namespace deltaq
