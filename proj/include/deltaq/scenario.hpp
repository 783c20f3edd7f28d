#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deltaq/codel.hpp"
#include "deltaq/delta_aqm.hpp"
#include "deltaq/queue_model.hpp"
#include "deltaq/simulation.hpp"

namespace deltaq {

inline constexpr std::uint64_t kDeskScalePackets = 200000;

enum class AqmKind : std::uint8_t { None, OfflineOptimum, Codel, Delta };

std::string_view to_string(AqmKind kind) noexcept;
AqmKind parse_aqm_kind(std::string_view name);

/// Either an explicit delay or a quantile of the no-AQM sojourn distribution.
struct TargetSpec {
  std::optional<double> delay;
  std::optional<double> quantile;
};

struct CodelSpec {
  // Unset: tune on a pilot grid before the run.
  std::optional<CodelConfig> fixed;
  std::vector<double> target_factors = {0.25, 0.5, 0.75, 1.0};
  std::vector<double> interval_factors = {1.0, 2.0, 4.0};
  // Pilot length as a fraction of num_packets.
  double pilot_fraction = 0.05;
};

struct DeltaSpec {
  std::string model_path;
  DeltaSearch mode = DeltaSearch::DynamicProgram;
  bool include_self_in_condition = false;
};

struct ScenarioConfig {
  std::string id = "scenario";
  std::uint64_t seed = 1;
  std::uint64_t num_packets = kDeskScalePackets;
  GammaService gamma;
  // Exactly one of the two; utilization wins the inter-arrival derivation.
  std::optional<double> utilization;
  std::optional<double> interarrival;
  TargetSpec target;
  AqmKind aqm = AqmKind::None;
  CodelSpec codel;
  DeltaSpec delta;
  std::size_t aqm_window = kDefaultAqmWindow;
  // No-AQM run used for quantile targets; default to seed / num_packets.
  std::optional<std::uint64_t> calibration_seed;
  std::optional<std::uint64_t> calibration_packets;

  double effective_interarrival() const;
  double effective_utilization() const;
  // Throws std::invalid_argument with the offending field name.
  void validate() const;
  SimulationConfig simulation(double target_delay) const;
};

// Structured text (JSON object) mirroring ScenarioConfig:
//   {"id", "seed", "num_packets", "gamma": {"concentration", "rate"},
//    "utilization" | "interarrival", "target": {"delay"} | {"quantile"},
//    "aqm": {"type": "none" | "offline_optimum" | "codel" | "delta", ...},
//    "aqm_window", "calibration_seed", "calibration_packets"}
// A "seeds" array expands one entry into one scenario per seed.
std::vector<ScenarioConfig> parse_scenarios(std::string_view text);
std::string scenario_to_json(const ScenarioConfig& config);

// Suite document: {"scenarios": [ ... ]} or a bare array or a single object.
std::vector<ScenarioConfig> load_suite(const std::filesystem::path& path);
void save_suite(const std::vector<ScenarioConfig>& suite, const std::filesystem::path& path);

}  // namespace deltaq
