#pragma once

#include <span>
#include <vector>

#include "deltaq/rng.hpp"

namespace deltaq {

/// One-dimensional Gaussian mixture.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stddevs;

  std::size_t components() const noexcept { return weights.size(); }

  double pdf(double z) const;
  double log_pdf(double z) const;
  double cdf(double z) const;
  // Defined as 1 - cdf(z) so the two always sum to one.
  double ccdf(double z) const { return 1.0 - cdf(z); }
  double mean() const;

  // Throws std::invalid_argument naming the violated invariant.
  void validate() const;

  bool operator==(const GaussianMixture&) const = default;
};

double normal_cdf(double z) noexcept;

struct EmOptions {
  std::size_t components = 4;
  double relative_tolerance = 1e-7;
  int max_iterations = 300;
  // Groups smaller than components * min_samples_per_component are moment-matched.
  std::size_t min_samples_per_component = 8;
};

struct EmResult {
  GaussianMixture mixture;
  // Log-likelihood after initialisation and after every EM iteration.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
  // Set when the group was fitted with a single moment-matched Gaussian.
  bool moment_matched = false;
};

// Floor for component standard deviations: 1e-3 of the sample stddev, with an
// absolute floor so that constant samples still give a positive width.
double stddev_floor(std::span<const double> samples);

// Single Gaussian with the sample mean and (population) stddev, floored.
GaussianMixture moment_match(std::span<const double> samples);

// k-means++ seeding followed by EM to a local optimum of the log-likelihood.
EmResult fit_mixture_em(std::span<const double> samples, const EmOptions& options, RngStream& rng);

double log_likelihood(const GaussianMixture& mixture, std::span<const double> samples);

}  // namespace deltaq
