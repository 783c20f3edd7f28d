#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "deltaq/latency_model.hpp"

namespace deltaq {

inline constexpr int kModelFormatVersion = 1;

/// Raised for malformed model files; field() names the offending entry,
/// e.g. "conditions[3].weights".
class ModelFormatError : public std::runtime_error {
 public:
  ModelFormatError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// JSON document:
//   {"version": 1,
//    "metadata": {"samples", "gamma_concentration", "gamma_rate", "utilization", ...},
//    "conditions": [{"x", "weights": [], "means": [], "stddevs": []}, ...]}
// Doubles are written in shortest round-trip form, so load(save(m)) is exact.
std::string model_to_json(const ConditionalLatencyModel& model);
ConditionalLatencyModel model_from_json(std::string_view text);

void save_model(const ConditionalLatencyModel& model, const std::filesystem::path& path);
ConditionalLatencyModel load_model(const std::filesystem::path& path);

// FNV-1a of the file bytes; used to show that one model served many runs.
std::uint64_t file_fingerprint(const std::filesystem::path& path);

}  // namespace deltaq
