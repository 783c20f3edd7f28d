#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "deltaq/scenario.hpp"

namespace deltaq {

/// Raised when the run is too short to resolve a requested quantile.
class CalibrationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Smallest m that resolves quantile q: 10 / (1 - q).
std::uint64_t required_packets(double q);

// Nearest-rank quantile of ascending-sorted values: element ceil(q * m) - 1.
double nearest_rank_quantile(std::span<const double> sorted, double q);

/// Thread-safe cache of sorted no-AQM sojourns keyed by (config hash, seed).
class CalibrationCache {
 public:
  std::shared_ptr<const std::vector<double>> sojourns(const ScenarioConfig& base);

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const std::vector<double>>> entries_;
};

// Sorted sojourns of every packet completed in a no-AQM run of `base`.
std::vector<double> no_aqm_sojourns(const ScenarioConfig& base);

// Target delays for each quantile, from a no-AQM run of `base` using its
// calibration seed and packet count.
std::vector<double> calibrate_targets(const ScenarioConfig& base, std::span<const double> quantiles,
                                      CalibrationCache* cache = nullptr);

}  // namespace deltaq
