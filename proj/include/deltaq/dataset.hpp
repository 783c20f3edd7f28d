#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "deltaq/latency_model.hpp"
#include "deltaq/queue_model.hpp"

namespace deltaq {

/// Load point at which training data is recorded. Training always runs
/// without AQM so the sojourns describe the undisturbed link.
struct TrainingScenario {
  GammaService service;
  double utilization = 0.916;
  std::uint64_t seed = 1;
};

// One sample per completed packet: (predecessors at entry, realised sojourn).
std::vector<TrainingSample> collect_dataset(const TrainingScenario& scenario, std::size_t num_samples);

struct Dataset {
  TrainingScenario scenario;
  std::vector<TrainingSample> samples;
};

// CSV with '#' metadata lines followed by "predecessors,sojourn" rows.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

// Convenience: collect and fit in one step with metadata filled in.
ConditionalLatencyModel train_model(const TrainingScenario& scenario, std::size_t num_samples,
                                    const FitOptions& options);

}  // namespace deltaq
