#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <unistd.h>

#include "doctest.h"

#include "deltaq/dataset.hpp"
#include "deltaq/gaussian_mixture.hpp"
#include "deltaq/latency_model.hpp"
#include "deltaq/model_io.hpp"
#include "json.hpp"

using namespace deltaq;
namespace fs = std::filesystem;

namespace {

std::vector<double> two_bump_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution pick(0.5);
  std::normal_distribution<double> a(5.0, 1.0), b(15.0, 2.0);
  std::vector<double> out(n);
  for (double& v : out) v = pick(gen) ? a(gen) : b(gen);
  return out;
}

// Generating CDF of 0.5 N(5,1) + 0.5 N(15,2).
double two_bump_cdf(double z) {
  auto phi = [](double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); };
  return 0.5 * phi((z - 5.0) / 1.0) + 0.5 * phi((z - 15.0) / 2.0);
}

std::vector<TrainingSample> at_condition(const std::vector<double>& values, std::uint32_t x) {
  std::vector<TrainingSample> out;
  for (double v : values) out.push_back({x, v});
  return out;
}

ConditionalLatencyModel single(GaussianMixture g) {
  return ConditionalLatencyModel({std::move(g)}, ModelMetadata{});
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("deltaq_test_" + name + "_" + std::to_string(::getpid()));
}

}  // namespace

TEST_CASE("EM recovers a two-component mixture") {
  const auto samples = two_bump_samples(5000, 17);
  EmOptions opts;
  opts.components = 2;
  RngStream rng(3, "em-init/0");
  const EmResult r = fit_mixture_em(samples, opts, rng);
  REQUIRE(r.mixture.components() == 2);
  // Components come back sorted by mean.
  CHECK(std::abs(r.mixture.weights[0] - 0.5) <= 0.05);
  CHECK(std::abs(r.mixture.weights[1] - 0.5) <= 0.05);
  CHECK(std::abs(r.mixture.means[0] - 5.0) <= 0.3);
  CHECK(std::abs(r.mixture.means[1] - 15.0) <= 0.3);
  CHECK_FALSE(r.moment_matched);
}

TEST_CASE("EM log-likelihood never decreases") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto samples = two_bump_samples(3000, seed);
    EmOptions opts;
    opts.components = 4;
    RngStream rng(seed, "em-init/0");
    const EmResult r = fit_mixture_em(samples, opts, rng);
    REQUIRE(r.log_likelihood.size() >= 2);
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i) {
      // Allow rounding noise only.
      CHECK(r.log_likelihood[i] >= r.log_likelihood[i - 1] - 1e-9 * std::abs(r.log_likelihood[i - 1]));
    }
    CHECK(r.log_likelihood.back() == doctest::Approx(log_likelihood(r.mixture, samples)));
  }
}

TEST_CASE("fitted CDF is close to the generating CDF") {
  const auto samples = two_bump_samples(10'000, 5);
  EmOptions opts;
  opts.components = 2;
  RngStream rng(11, "em-init/0");
  const GaussianMixture g = fit_mixture_em(samples, opts, rng).mixture;
  double ks = 0.0;
  for (double z = -5.0; z <= 30.0; z += 0.01) ks = std::max(ks, std::abs(g.cdf(z) - two_bump_cdf(z)));
  CHECK(ks < 0.03);
}

TEST_CASE("K=1 is moment matching") {
  std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  const GaussianMixture g = moment_match(v);
  REQUIRE(g.components() == 1);
  CHECK(g.weights[0] == 1.0);
  CHECK(g.means[0] == doctest::Approx(5.0));
  CHECK(g.stddevs[0] == doctest::Approx(2.0));

  std::vector<double> many = two_bump_samples(2000, 1);
  EmOptions opts;
  opts.components = 1;
  RngStream rng(1, "em-init/0");
  const EmResult r = fit_mixture_em(many, opts, rng);
  CHECK(r.moment_matched);
  double mean = 0.0;
  for (double x : many) mean += x;
  mean /= static_cast<double>(many.size());
  CHECK(r.mixture.means[0] == doctest::Approx(mean));
}

TEST_CASE("identical values give one component at the floor width") {
  std::vector<double> v(100, 12.5);
  EmOptions opts;
  RngStream rng(1, "em-init/0");
  const EmResult r = fit_mixture_em(v, opts, rng);
  REQUIRE(r.mixture.components() == 1);
  CHECK(r.mixture.means[0] == 12.5);
  CHECK(r.mixture.stddevs[0] == stddev_floor(v));
  CHECK(r.mixture.stddevs[0] > 0.0);
}

TEST_CASE("small groups fall back to one Gaussian") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
  EmOptions opts;  // K=4 needs 32 samples
  RngStream rng(1, "em-init/0");
  CHECK(fit_mixture_em(v, opts, rng).moment_matched);
}

TEST_CASE("mixture CDF is monotone and normalised") {
  GaussianMixture g{{0.3, 0.7}, {10.0, 40.0}, {3.0, 12.0}};
  double prev = -1.0;
  bool monotone = true, normalised = true;
  for (double z = -50.0; z <= 150.0; z += 0.25) {
    const double c = g.cdf(z);
    monotone = monotone && c >= prev;
    normalised = normalised && (c + g.ccdf(z) == 1.0) && c >= 0.0 && c <= 1.0;
    prev = c;
  }
  CHECK(monotone);
  CHECK(normalised);
}

TEST_CASE("success probability examples") {
  const auto m = single(GaussianMixture{{1.0}, {10.0}, {2.0}});
  CHECK(m.success_prob(10.0, 0) == doctest::Approx(0.5));
  CHECK(m.success_prob(0.0, 0) < 1e-6);

  const auto wide = single(GaussianMixture{{1.0}, {30.0}, {6.0}});
  CHECK(wide.success_prob(0.0, 3) < 1e-6);
  CHECK(wide.success_prob(1e9, 3) == 1.0);
}

TEST_CASE("all-zero conditions give max_condition 0 and clamp") {
  const auto samples = at_condition(two_bump_samples(500, 2), 0);
  const auto m = fit_latency_model(samples, FitOptions{});
  CHECK(m.max_condition() == 0);
  CHECK(m.success_prob(12.0, 7) == m.success_prob(12.0, 0));
  CHECK(&m.mixture(99) == &m.mixture(0));
}

TEST_CASE("missing conditions copy the nearest populated one") {
  std::vector<TrainingSample> d;
  for (int i = 0; i < 50; ++i) {
    d.push_back({0, 5.0 + 0.01 * i});
    d.push_back({3, 30.0 + 0.01 * i});
    d.push_back({4, 40.0 + 0.01 * i});
  }
  const auto m = fit_latency_model(d, FitOptions{});
  REQUIRE(m.max_condition() == 4);
  CHECK(m.mixture(1) == m.mixture(0));
  CHECK(m.mixture(2) == m.mixture(3));
  CHECK(m.metadata().fit[1].filled);
  CHECK(m.metadata().fit[1].filled_from == 0);
  CHECK(m.metadata().fit[2].filled_from == 3);
}

TEST_CASE("fit rejects bad input") {
  CHECK_THROWS_AS(fit_latency_model({}, FitOptions{}), std::invalid_argument);
  FitOptions zero_k;
  zero_k.em.components = 0;
  const std::vector<TrainingSample> one{{0, 1.0}};
  CHECK_THROWS_AS(fit_latency_model(one, zero_k), std::invalid_argument);
}

TEST_CASE("collect_dataset returns the requested number of samples") {
  TrainingScenario sc;
  sc.seed = 4;
  CHECK(collect_dataset(sc, 512).size() == 512);
  const auto big = collect_dataset(sc, 4096);
  CHECK(big.size() == 4096);
  CHECK(big.front().predecessors == 0);
  for (const auto& s : big) CHECK(s.sojourn > 0.0);
}

TEST_CASE("fit is deterministic for a seed") {
  TrainingScenario sc;
  sc.seed = 8;
  const auto data = collect_dataset(sc, 4096);
  FitOptions o;
  o.seed = 3;
  const auto a = fit_latency_model(data, o);
  const auto b = fit_latency_model(data, o);
  CHECK(a.conditions() == b.conditions());
}

TEST_CASE("more predecessors mean lower success probability") {
  TrainingScenario sc;
  sc.seed = 21;
  const auto data = collect_dataset(sc, 8192);
  const auto m = fit_latency_model(data, FitOptions{});
  for (std::size_t x = 0; x < m.max_condition(); ++x) {
    if (m.metadata().fit[x].filled || m.metadata().fit[x + 1].filled) continue;
    std::vector<double> diff;
    for (double d = 0.0; d <= 300.0; d += 1.0) diff.push_back(m.success_prob(d, x) - m.success_prob(d, x + 1));
    std::nth_element(diff.begin(), diff.begin() + diff.size() / 2, diff.end());
    INFO("x = " << x);
    // Saturated budgets give psi == 1 on both sides up to rounding (1e-12).
    CHECK(diff[diff.size() / 2] >= -1e-12);
  }
}

TEST_CASE("model save and load are exact") {
  TrainingScenario sc;
  sc.seed = 2;
  ModelMetadata md;
  md.samples = 4096;
  md.gamma_concentration = 5.0;
  md.gamma_rate = 0.5;
  md.utilization = 0.916;
  const auto m = fit_latency_model(collect_dataset(sc, 4096), FitOptions{}, md);
  const fs::path p = temp_file("model.json");
  save_model(m, p);
  const auto back = load_model(p);
  CHECK(back.conditions() == m.conditions());
  CHECK(back.metadata().samples == 4096);
  CHECK(back.metadata().utilization == 0.916);
  // Bitwise, not just ==.
  bool bitwise = true;
  for (std::size_t x = 0; x <= m.max_condition(); ++x) {
    for (std::size_t k = 0; k < m.mixture(x).components(); ++k) {
      bitwise = bitwise && std::memcmp(&m.mixture(x).means[k], &back.mixture(x).means[k], sizeof(double)) == 0;
      bitwise = bitwise && std::memcmp(&m.mixture(x).stddevs[k], &back.mixture(x).stddevs[k], sizeof(double)) == 0;
      bitwise = bitwise && std::memcmp(&m.mixture(x).weights[k], &back.mixture(x).weights[k], sizeof(double)) == 0;
    }
  }
  CHECK(bitwise);
  CHECK(file_fingerprint(p) == file_fingerprint(p));
  fs::remove(p);
}

TEST_CASE("malformed model files are rejected with the field named") {
  const auto base = single(GaussianMixture{{0.5, 0.5}, {10.0, 20.0}, {1.0, 2.0}});
  const nlohmann::json doc = nlohmann::json::parse(model_to_json(base));

  SUBCASE("weights summing to 0.8") {
    auto bad = doc;
    bad["conditions"][0]["weights"] = {0.4, 0.4};
    try {
      model_from_json(bad.dump());
      FAIL("accepted");
    } catch (const ModelFormatError& e) {
      CHECK(e.field() == "conditions[0].weights");
    }
  }
  SUBCASE("negative stddev") {
    auto bad = doc;
    bad["conditions"][0]["stddevs"] = {1.0, -2.0};
    try {
      model_from_json(bad.dump());
      FAIL("accepted");
    } catch (const ModelFormatError& e) {
      CHECK(e.field() == "conditions[0].stddevs");
    }
  }
  SUBCASE("wrong version") {
    auto bad = doc;
    bad["version"] = 99;
    CHECK_THROWS_AS(model_from_json(bad.dump()), ModelFormatError);
  }
  SUBCASE("not json") { CHECK_THROWS_AS(model_from_json("{nope"), ModelFormatError); }
}

TEST_CASE("dataset csv round-trips") {
  Dataset d;
  d.scenario.seed = 9;
  d.scenario.utilization = 0.8;
  d.samples = {{0, 10.123456789012345}, {3, 0.1}, {1, 55.5}};
  const fs::path p = temp_file("data.csv");
  write_dataset(d, p);
  const Dataset back = read_dataset(p);
  CHECK(back.scenario.seed == 9);
  CHECK(back.scenario.utilization == 0.8);
  REQUIRE(back.samples.size() == 3);
  CHECK(back.samples[0].sojourn == d.samples[0].sojourn);
  CHECK(back.samples[1].predecessors == 3);
  fs::remove(p);
}

TEST_CASE("concurrent queries agree with serial ones") {
  TrainingScenario sc;
  const auto m = fit_latency_model(collect_dataset(sc, 4096), FitOptions{});
  std::vector<double> serial;
  for (int i = 0; i < 2000; ++i) serial.push_back(m.success_prob(0.1 * i, static_cast<std::size_t>(i % 12)));
  std::vector<std::vector<double>> per(4);
  std::vector<std::thread> threads;
  for (auto& out : per) {
    threads.emplace_back([&m, &out] {
      for (int i = 0; i < 2000; ++i) out.push_back(m.success_prob(0.1 * i, static_cast<std::size_t>(i % 12)));
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& out : per) CHECK(out == serial);
}
