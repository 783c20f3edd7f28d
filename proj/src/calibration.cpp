#include "deltaq/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "deltaq/simulation.hpp"

namespace deltaq {

namespace {

std::string hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

ScenarioConfig calibration_run(const ScenarioConfig& base) {
  ScenarioConfig c = base;
  c.aqm = AqmKind::None;
  c.seed = base.calibration_seed.value_or(base.seed);
  c.num_packets = base.calibration_packets.value_or(base.num_packets);
  return c;
}

std::string cache_key(const ScenarioConfig& c) {
  return hex(c.gamma.concentration) + "|" + hex(c.gamma.rate) + "|" + hex(c.effective_interarrival()) +
         "|" + std::to_string(c.num_packets) + "|" + std::to_string(c.seed);
}

void check_quantile(double q, std::uint64_t m) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile must lie in (0, 1)");
  const std::uint64_t need = required_packets(q);
  if (m < need) {
    throw CalibrationError("quantile " + std::to_string(q) + " needs at least " + std::to_string(need) +
                           " packets (m >= 10/(1-q)), got " + std::to_string(m));
  }
}

}  // namespace

std::uint64_t required_packets(double q) {
  return static_cast<std::uint64_t>(std::ceil(10.0 / (1.0 - q) - 1e-9));
}

double nearest_rank_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank_quantile: no values");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("nearest_rank_quantile: q must lie in (0, 1]");
  const auto m = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * m - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<double> no_aqm_sojourns(const ScenarioConfig& base) {
  const ScenarioConfig c = calibration_run(base);
  std::vector<double> sojourns;
  sojourns.reserve(c.num_packets);
  QueueSimulation sim(c.simulation(std::numeric_limits<double>::max()), std::make_unique<NoAqm>(),
                      [&](const Packet& p) { sojourns.push_back(p.sojourn()); });
  sim.run_until(c.num_packets);
  std::sort(sojourns.begin(), sojourns.end());
  return sojourns;
}

std::shared_ptr<const std::vector<double>> CalibrationCache::sojourns(const ScenarioConfig& base) {
  const std::string key = cache_key(calibration_run(base));
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  auto values = std::make_shared<const std::vector<double>>(no_aqm_sojourns(base));
  std::lock_guard lock(mutex_);
  return entries_.emplace(key, std::move(values)).first->second;
}

std::vector<double> calibrate_targets(const ScenarioConfig& base, std::span<const double> quantiles,
                                      CalibrationCache* cache) {
  const std::uint64_t m = base.calibration_packets.value_or(base.num_packets);
  for (double q : quantiles) check_quantile(q, m);
  std::shared_ptr<const std::vector<double>> sorted;
  if (cache) {
    sorted = cache->sojourns(base);
  } else {
    sorted = std::make_shared<const std::vector<double>>(no_aqm_sojourns(base));
  }
  std::vector<double> targets;
  targets.reserve(quantiles.size());
  for (double q : quantiles) targets.push_back(nearest_rank_quantile(*sorted, q));
  return targets;
}

}  // namespace deltaq
