#include "deltaq/delta_search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace deltaq {

void SuccessTable::fill(std::span<const double> budgets, const LatencyPredictor& predictor,
                        std::size_t offset) {
  resize(budgets.size());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k <= i; ++k) at(i, k) = predictor.success_prob(budgets[i], k + offset);
  }
}

double score_mask(const SuccessTable& table, std::uint64_t mask) {
  const std::size_t n = table.size();
  double score = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if ((mask >> (n - 1 - i)) & 1U) {
      score += table.at(i, kept);
      ++kept;
    }
  }
  return score;
}

bool better_candidate(double score_a, std::uint64_t mask_a, double score_b,
                      std::uint64_t mask_b) noexcept {
  if (score_a != score_b) return score_a > score_b;
  const int kept_a = std::popcount(mask_a);
  const int kept_b = std::popcount(mask_b);
  if (kept_a != kept_b) return kept_a > kept_b;
  return mask_a > mask_b;
}

DroppingVector mask_to_vector(std::uint64_t mask, std::size_t n) {
  DroppingVector x;
  x.bits.resize(n);
  for (std::size_t i = 0; i < n; ++i) x.bits[i] = static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1U);
  return x;
}

namespace {

void check_enumerable(std::size_t n) {
  if (n > kMaxEnumerationSize) {
    throw std::invalid_argument("exhaustive Delta search is capped at " +
                                std::to_string(kMaxEnumerationSize) + " packets, got " +
                                std::to_string(n));
  }
}

}  // namespace

SearchResult search_enumerate(const SuccessTable& table) {
  const std::size_t n = table.size();
  check_enumerable(n);
  const std::uint64_t count = std::uint64_t{1} << n;
  double best_score = 0.0;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    const double s = score_mask(table, mask);
    if (better_candidate(s, mask, best_score, best_mask)) {
      best_score = s;
      best_mask = mask;
    }
  }
  return {mask_to_vector(best_mask, n), best_score};
}

SearchResult search_enumerate_parallel(const SuccessTable& table) {
  const std::size_t n = table.size();
  check_enumerable(n);
  const auto count = static_cast<std::int64_t>(std::uint64_t{1} << n);
  double best_score = 0.0;
  std::uint64_t best_mask = 0;

#pragma omp parallel
  {
    double local_score = 0.0;
    std::uint64_t local_mask = 0;
#pragma omp for schedule(static) nowait
    for (std::int64_t m = 1; m < count; ++m) {
      const auto mask = static_cast<std::uint64_t>(m);
      const double s = score_mask(table, mask);
      if (better_candidate(s, mask, local_score, local_mask)) {
        local_score = s;
        local_mask = mask;
      }
    }
#pragma omp critical(deltaq_enumerate_merge)
    {
      if (better_candidate(local_score, local_mask, best_score, best_mask)) {
        best_score = local_score;
        best_mask = local_mask;
      }
    }
  }
  return {mask_to_vector(best_mask, n), best_score};
}

namespace {

// Sums stay below 64 and each addition narrows the gap between two prefixes
// by at most one ulp there, so prefixes further apart than this can never
// end up tied.
double tie_slack(std::size_t n) { return static_cast<double>(n + 1) * std::ldexp(1.0, -46); }

// Keeps every prefix per state that might still tie the best one after
// rounding; used only when the single-best pass saw such a near tie.
SearchResult search_dynamic_lists(const SuccessTable& table) {
  const std::size_t n = table.size();
  struct Cand {
    double score;
    std::uint64_t mask;
  };
  const double slack = tie_slack(n);
  std::vector<std::vector<Cand>> cur(n + 1), next(n + 1);
  cur[0].push_back({0.0, 0});

  auto prune = [slack](std::vector<Cand>& v) {
    std::sort(v.begin(), v.end(), [](const Cand& a, const Cand& b) {
      return a.score != b.score ? a.score > b.score : a.mask > b.mask;
    });
    if (v.empty()) return;
    const double floor = v.front().score - slack;
    std::size_t out = 1;
    for (std::size_t j = 1; j < v.size(); ++j) {
      if (v[j].score < floor) break;
      // Same score, same state: identical continuation, larger mask wins.
      if (v[j].score == v[out - 1].score) continue;
      v[out++] = v[j];
    }
    v.resize(out);
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : next) v.clear();
    for (std::size_t k = 0; k <= i; ++k) {
      for (const Cand& c : cur[k]) {
        next[k].push_back({c.score, c.mask << 1});
        next[k + 1].push_back({c.score + table.at(i, k), (c.mask << 1) | 1U});
      }
    }
    for (auto& v : next) prune(v);
    std::swap(cur, next);
  }

  double best_score = 0.0;
  std::uint64_t best_mask = 0;
  for (const auto& v : cur) {
    for (const Cand& c : v) {
      if (better_candidate(c.score, c.mask, best_score, best_mask)) {
        best_score = c.score;
        best_mask = c.mask;
      }
    }
  }
  return {mask_to_vector(best_mask, n), best_score};
}

}  // namespace

SearchResult search_dynamic(const SuccessTable& table) {
  const std::size_t n = table.size();
  if (n > kMaxDynamicProgramSize) {
    throw std::invalid_argument("Delta dynamic program supports at most " +
                                std::to_string(kMaxDynamicProgramSize) + " packets");
  }
  if (n == 0) return {};

  // Forward pass: best prefix score per number of kept packets. Prefix scores
  // are built with the same additions, in the same order, as score_mask, and
  // rounding is monotone, so a worse prefix never overtakes a better one with
  // the same continuation. It can still end up tied with it, which matters
  // for the tie-break; if two prefixes ever come that close, redo the pass
  // keeping all of them.
  struct State {
    double score;
    std::uint64_t mask;
    bool reached;
  };
  const double slack = tie_slack(n);
  bool near_tie = false;
  std::vector<State> cur(n + 1, State{0.0, 0, false});
  std::vector<State> next(n + 1);
  cur[0] = {0.0, 0, true};

  auto offer = [&](State& slot, double score, std::uint64_t mask) {
    if (!slot.reached) {
      slot = {score, mask, true};
      return;
    }
    if (score != slot.score && std::abs(score - slot.score) <= slack) near_tie = true;
    if (score > slot.score || (score == slot.score && mask > slot.mask)) slot = {score, mask, true};
  };

  for (std::size_t i = 0; i < n; ++i) {
    std::fill(next.begin(), next.end(), State{0.0, 0, false});
    for (std::size_t k = 0; k <= i; ++k) {
      const State& s = cur[k];
      if (!s.reached) continue;
      offer(next[k], s.score, s.mask << 1);
      offer(next[k + 1], s.score + table.at(i, k), (s.mask << 1) | 1U);
    }
    std::swap(cur, next);
  }
  if (near_tie) return search_dynamic_lists(table);

  double best_score = 0.0;
  std::uint64_t best_mask = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (cur[k].reached && better_candidate(cur[k].score, cur[k].mask, best_score, best_mask)) {
      best_score = cur[k].score;
      best_mask = cur[k].mask;
    }
  }
  return {mask_to_vector(best_mask, n), best_score};
}

}  // namespace deltaq
