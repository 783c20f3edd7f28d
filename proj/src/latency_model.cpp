#include "deltaq/latency_model.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

namespace deltaq {

ConditionalLatencyModel::ConditionalLatencyModel(std::vector<GaussianMixture> per_condition,
                                                 ModelMetadata metadata)
    : per_condition_(std::move(per_condition)), metadata_(std::move(metadata)) {
  if (per_condition_.empty()) throw std::invalid_argument("latency model needs at least one condition");
  for (std::size_t x = 0; x < per_condition_.size(); ++x) {
    try {
      per_condition_[x].validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("condition " + std::to_string(x) + ": " + e.what());
    }
  }
}

const GaussianMixture& ConditionalLatencyModel::mixture(std::size_t predecessors) const {
  return per_condition_[std::min(predecessors, max_condition())];
}

double ConditionalLatencyModel::success_prob(double budget, std::size_t predecessors) const {
  return std::clamp(mixture(predecessors).cdf(budget), 0.0, 1.0);
}

ConditionalLatencyModel fit_latency_model(std::span<const TrainingSample> dataset,
                                          const FitOptions& options, ModelMetadata metadata) {
  if (dataset.empty()) throw std::invalid_argument("fit_latency_model: empty dataset");
  if (options.em.components == 0) throw std::invalid_argument("fit_latency_model: K must be >= 1");

  std::size_t max_x = 0;
  for (const TrainingSample& s : dataset) {
    if (!(s.sojourn > 0.0)) throw std::invalid_argument("training sojourns must be positive");
    max_x = std::max<std::size_t>(max_x, s.predecessors);
  }
  std::vector<std::vector<double>> groups(max_x + 1);
  for (const TrainingSample& s : dataset) groups[s.predecessors].push_back(s.sojourn);

  std::vector<std::optional<GaussianMixture>> fitted(max_x + 1);
  std::vector<ConditionFit> diag(max_x + 1);
  const auto conditions = static_cast<long>(max_x + 1);

  // Groups are independent; each one seeds its own stream, so the result
  // does not depend on scheduling.
#pragma omp parallel for schedule(dynamic, 1)
  for (long xi = 0; xi < conditions; ++xi) {
    const auto x = static_cast<std::size_t>(xi);
    diag[x].x = x;
    diag[x].samples = groups[x].size();
    if (groups[x].empty()) continue;
    RngStream rng(options.seed, "em-init/" + std::to_string(x));
    EmResult r = fit_mixture_em(groups[x], options.em, rng);
    diag[x].iterations = r.iterations;
    diag[x].converged = r.converged;
    diag[x].moment_matched = r.moment_matched;
    diag[x].log_likelihood = r.log_likelihood.back();
    fitted[x] = std::move(r.mixture);
  }

  std::vector<GaussianMixture> per_condition(max_x + 1);
  for (std::size_t x = 0; x <= max_x; ++x) {
    if (fitted[x]) {
      per_condition[x] = *fitted[x];
      continue;
    }
    std::size_t best = 0;
    std::size_t best_dist = std::numeric_limits<std::size_t>::max();
    for (std::size_t y = 0; y <= max_x; ++y) {
      if (!fitted[y]) continue;
      const std::size_t d = y > x ? y - x : x - y;
      if (d < best_dist) {
        best_dist = d;
        best = y;
      }
    }
    per_condition[x] = *fitted[best];
    diag[x].filled = true;
    diag[x].filled_from = best;
  }

  metadata.samples = dataset.size();
  metadata.components = options.em.components;
  metadata.fit = std::move(diag);
  return ConditionalLatencyModel(std::move(per_condition), std::move(metadata));
}

}  // namespace deltaq
