#include "deltaq/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "deltaq/simulation.hpp"

namespace deltaq {

std::vector<TrainingSample> collect_dataset(const TrainingScenario& scenario, std::size_t num_samples) {
  scenario.service.validate();
  std::vector<TrainingSample> samples;
  samples.reserve(num_samples);
  SimulationConfig cfg;
  cfg.service = scenario.service;
  cfg.interarrival = interarrival_for_utilization(scenario.service.mean(), scenario.utilization);
  cfg.target_delay = std::numeric_limits<double>::max();
  cfg.seed = scenario.seed;
  QueueSimulation sim(cfg, std::make_unique<NoAqm>(), [&](const Packet& p) {
    samples.push_back({p.predecessors_at_entry, p.sojourn()});
  });
  sim.run_until(num_samples);
  return samples;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("dataset line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# gamma_concentration=" << fmt17(dataset.scenario.service.concentration) << "\n";
  out << "# gamma_rate=" << fmt17(dataset.scenario.service.rate) << "\n";
  out << "# utilization=" << fmt17(dataset.scenario.utilization) << "\n";
  out << "# seed=" << dataset.scenario.seed << "\n";
  out << "predecessors,sojourn\n";
  for (const TrainingSample& s : dataset.samples) out << s.predecessors << ',' << fmt17(s.sojourn) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Dataset d;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      if (key == "gamma_concentration") d.scenario.service.concentration = parse_double(value, lineno);
      else if (key == "gamma_rate") d.scenario.service.rate = parse_double(value, lineno);
      else if (key == "utilization") d.scenario.utilization = parse_double(value, lineno);
      else if (key == "seed") d.scenario.seed = std::stoull(value);
      continue;
    }
    if (!header) {
      if (line != "predecessors,sojourn") {
        throw std::runtime_error("dataset line " + std::to_string(lineno) +
                                 ": expected header 'predecessors,sojourn'");
      }
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("dataset line " + std::to_string(lineno) + ": expected two columns");
    }
    TrainingSample s;
    const std::string xs = line.substr(0, comma);
    auto [ptr, ec] = std::from_chars(xs.data(), xs.data() + xs.size(), s.predecessors);
    if (ec != std::errc{} || ptr != xs.data() + xs.size()) {
      throw std::runtime_error("dataset line " + std::to_string(lineno) + ": bad predecessor count");
    }
    s.sojourn = parse_double(line.substr(comma + 1), lineno);
    d.samples.push_back(s);
  }
  if (!header) throw std::runtime_error(path.string() + ": missing dataset header");
  return d;
}

ConditionalLatencyModel train_model(const TrainingScenario& scenario, std::size_t num_samples,
                                    const FitOptions& options) {
  const auto samples = collect_dataset(scenario, num_samples);
  ModelMetadata md;
  md.gamma_concentration = scenario.service.concentration;
  md.gamma_rate = scenario.service.rate;
  md.utilization = scenario.utilization;
  return fit_latency_model(samples, options, md);
}

}  // namespace deltaq
