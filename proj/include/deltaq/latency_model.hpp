#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deltaq/gaussian_mixture.hpp"

namespace deltaq {

/// Success-probability oracle consumed by the Delta policy:
/// P(latency <= budget | predecessors).
class LatencyPredictor {
 public:
  virtual ~LatencyPredictor() = default;
  virtual double success_prob(double budget, std::size_t predecessors) const = 0;
};

struct TrainingSample {
  std::uint32_t predecessors = 0;
  double sojourn = 0.0;
};

struct ConditionFit {
  std::size_t x = 0;
  std::size_t samples = 0;
  int iterations = 0;
  bool converged = false;
  bool moment_matched = false;
  double log_likelihood = 0.0;
  // Condition had no samples and copies the mixture of `filled_from`.
  bool filled = false;
  std::size_t filled_from = 0;
};

struct ModelMetadata {
  std::uint64_t samples = 0;
  double gamma_concentration = 0.0;
  double gamma_rate = 0.0;
  double utilization = 0.0;
  std::string estimator = "per-condition-gmm-em";
  std::size_t components = 0;
  std::vector<ConditionFit> fit;
};

/// Per-predecessor-count Gaussian mixture over end-to-end latency.
/// Conditions above max_condition() are answered by the last mixture.
class ConditionalLatencyModel final : public LatencyPredictor {
 public:
  ConditionalLatencyModel(std::vector<GaussianMixture> per_condition, ModelMetadata metadata);

  double success_prob(double budget, std::size_t predecessors) const override;

  double cdf(double z, std::size_t predecessors) const { return mixture(predecessors).cdf(z); }
  double ccdf(double z, std::size_t predecessors) const { return mixture(predecessors).ccdf(z); }

  const GaussianMixture& mixture(std::size_t predecessors) const;
  std::size_t max_condition() const noexcept { return per_condition_.size() - 1; }
  const std::vector<GaussianMixture>& conditions() const noexcept { return per_condition_; }
  const ModelMetadata& metadata() const noexcept { return metadata_; }

 private:
  std::vector<GaussianMixture> per_condition_;
  ModelMetadata metadata_;
};

struct FitOptions {
  EmOptions em;
  std::uint64_t seed = 1;
};

// Groups samples by predecessor count and fits one mixture per group.
// Conditions without samples copy the nearest populated condition (lower on ties).
ConditionalLatencyModel fit_latency_model(std::span<const TrainingSample> dataset,
                                          const FitOptions& options, ModelMetadata metadata = {});

}  // namespace deltaq
