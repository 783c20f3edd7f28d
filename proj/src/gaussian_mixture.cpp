#include "deltaq/gaussian_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace deltaq {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double sample_mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double population_stddev(std::span<const double> xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

double component_log_density(double z, double mean, double sd) {
  const double u = (z - mean) / sd;
  return -0.5 * u * u - std::log(sd) - kLogSqrt2Pi;
}

// Canonical order: ascending mean, then stddev.
void sort_components(GaussianMixture& g) {
  std::vector<std::size_t> order(g.components());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (g.means[a] != g.means[b]) return g.means[a] < g.means[b];
    return g.stddevs[a] < g.stddevs[b];
  });
  GaussianMixture out;
  for (std::size_t i : order) {
    out.weights.push_back(g.weights[i]);
    out.means.push_back(g.means[i]);
    out.stddevs.push_back(g.stddevs[i]);
  }
  g = std::move(out);
}

void normalize_weights(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
}

std::vector<double> kmeanspp_centers(std::span<const double> xs, std::size_t k, RngStream& rng) {
  std::vector<double> centers;
  centers.reserve(k);
  const std::size_t n = xs.size();
  auto pick_index = [&](double u) {
    return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
  };
  centers.push_back(xs[pick_index(rng.uniform())]);

  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (xs[i] - c) * (xs[i] - c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      // Fewer distinct values than components.
      centers.push_back(xs[pick_index(rng.uniform())]);
      continue;
    }
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc > target) {
        chosen = i;
        break;
      }
    }
    centers.push_back(xs[chosen]);
  }
  return centers;
}

GaussianMixture initial_mixture(std::span<const double> xs, const std::vector<double>& centers,
                                double global_sd, double floor) {
  const std::size_t k = centers.size();
  std::vector<double> count(k, 0.0), sum(k, 0.0), sumsq(k, 0.0);
  for (double x : xs) {
    std::size_t best = 0;
    double best_d = std::abs(x - centers[0]);
    for (std::size_t c = 1; c < k; ++c) {
      const double d = std::abs(x - centers[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    count[best] += 1.0;
    sum[best] += x;
    sumsq[best] += x * x;
  }
  GaussianMixture g;
  for (std::size_t c = 0; c < k; ++c) {
    if (count[c] == 0.0) {
      g.weights.push_back(1.0 / static_cast<double>(xs.size()));
      g.means.push_back(centers[c]);
      g.stddevs.push_back(std::max(global_sd, floor));
      continue;
    }
    const double mean = sum[c] / count[c];
    const double var = std::max(sumsq[c] / count[c] - mean * mean, 0.0);
    g.weights.push_back(count[c] / static_cast<double>(xs.size()));
    g.means.push_back(mean);
    g.stddevs.push_back(count[c] > 1.0 ? std::max(std::sqrt(var), floor) : std::max(global_sd, floor));
  }
  normalize_weights(g.weights);
  return g;
}

}  // namespace

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z * kInvSqrt2); }

double GaussianMixture::pdf(double z) const { return std::exp(log_pdf(z)); }

double GaussianMixture::log_pdf(double z) const {
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(components());
  for (std::size_t k = 0; k < components(); ++k) {
    terms[k] = weights[k] > 0.0 ? std::log(weights[k]) + component_log_density(z, means[k], stddevs[k])
                                : -std::numeric_limits<double>::infinity();
    m = std::max(m, terms[k]);
  }
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

double GaussianMixture::cdf(double z) const {
  double c = 0.0;
  for (std::size_t k = 0; k < components(); ++k) {
    c += weights[k] * normal_cdf((z - means[k]) / stddevs[k]);
  }
  return std::clamp(c, 0.0, 1.0);
}

double GaussianMixture::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < components(); ++k) m += weights[k] * means[k];
  return m;
}

void GaussianMixture::validate() const {
  if (weights.empty()) throw std::invalid_argument("mixture has no components");
  if (means.size() != weights.size() || stddevs.size() != weights.size()) {
    throw std::invalid_argument("weights, means and stddevs must have equal lengths");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("weights must sum to 1, got " + std::to_string(total));
  }
  for (double m : means) {
    if (!std::isfinite(m)) throw std::invalid_argument("means must be finite");
  }
  for (double s : stddevs) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("stddevs must be positive");
  }
}

double stddev_floor(std::span<const double> samples) {
  if (samples.empty()) return 1e-9;
  const double mean = sample_mean(samples);
  const double sd = population_stddev(samples, mean);
  return std::max(1e-3 * sd, 1e-9 * std::max(1.0, std::abs(mean)));
}

GaussianMixture moment_match(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("moment_match: no samples");
  const double mean = sample_mean(samples);
  const double sd = population_stddev(samples, mean);
  return GaussianMixture{{1.0}, {mean}, {std::max(sd, stddev_floor(samples))}};
}

double log_likelihood(const GaussianMixture& mixture, std::span<const double> samples) {
  double ll = 0.0;
  for (double x : samples) ll += mixture.log_pdf(x);
  return ll;
}

EmResult fit_mixture_em(std::span<const double> xs, const EmOptions& options, RngStream& rng) {
  if (xs.empty()) throw std::invalid_argument("fit_mixture_em: no samples");
  if (options.components == 0) throw std::invalid_argument("fit_mixture_em: need at least one component");

  EmResult result;
  const std::size_t k = options.components;
  const std::size_t n = xs.size();
  const double floor = stddev_floor(xs);
  const double global_mean = sample_mean(xs);
  const double global_sd = population_stddev(xs, global_mean);

  if (k == 1 || n < k * options.min_samples_per_component || global_sd <= floor) {
    result.mixture = moment_match(xs);
    result.moment_matched = true;
    result.converged = true;
    result.log_likelihood.push_back(log_likelihood(result.mixture, xs));
    return result;
  }

  GaussianMixture g = initial_mixture(xs, kmeanspp_centers(xs, k, rng), global_sd, floor);

  std::vector<double> resp(n * k);
  std::vector<double> logw(k);
  auto e_step = [&]() {
    for (std::size_t c = 0; c < k; ++c) {
      logw[c] = g.weights[c] > 0.0 ? std::log(g.weights[c]) : -std::numeric_limits<double>::infinity();
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double* r = &resp[i * k];
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        r[c] = logw[c] + component_log_density(xs[i], g.means[c], g.stddevs[c]);
        m = std::max(m, r[c]);
      }
      double s = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        r[c] = std::exp(r[c] - m);
        s += r[c];
      }
      for (std::size_t c = 0; c < k; ++c) r[c] /= s;
      ll += m + std::log(s);
    }
    return ll;
  };

  double ll = e_step();
  result.log_likelihood.push_back(ll);

  for (int it = 0; it < options.max_iterations; ++it) {
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0, sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * k + c];
        sx += resp[i * k + c] * xs[i];
      }
      if (nk <= 0.0) {
        g.weights[c] = 0.0;
        continue;
      }
      const double mean = sx / nk;
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - mean;
        ss += resp[i * k + c] * d * d;
      }
      g.weights[c] = nk / static_cast<double>(n);
      g.means[c] = mean;
      g.stddevs[c] = std::max(std::sqrt(ss / nk), floor);
    }
    normalize_weights(g.weights);

    const double next = e_step();
    result.log_likelihood.push_back(next);
    result.iterations = it + 1;
    const double gain = next - ll;
    ll = next;
    if (gain < options.relative_tolerance * std::abs(ll)) {
      result.converged = true;
      break;
    }
  }

  sort_components(g);
  result.mixture = std::move(g);
  return result;
}

}  // namespace deltaq
