#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "deltaq/aqm.hpp"
#include "deltaq/latency_model.hpp"

namespace deltaq {

// Largest queue the exhaustive search accepts (2^n candidates).
inline constexpr std::size_t kMaxEnumerationSize = 24;
// Bit-mask bookkeeping in the dynamic program limits n to 63.
inline constexpr std::size_t kMaxDynamicProgramSize = 63;

/// Success probabilities psi[i][k] for packet i (head = 0) when k packets
/// ahead of it among the window are kept, k = 0..i.
///
/// Both search kernels read the same table, so they add identical values
/// in identical (head-to-tail) order.
class SuccessTable {
 public:
  SuccessTable() = default;

  // offset is added to k before querying the predictor (1 when the packet
  // counts itself as a predecessor).
  void fill(std::span<const double> budgets, const LatencyPredictor& predictor, std::size_t offset);

  std::size_t size() const noexcept { return n_; }
  double at(std::size_t i, std::size_t k) const noexcept { return psi_[i * n_ + k]; }
  double& at(std::size_t i, std::size_t k) noexcept { return psi_[i * n_ + k]; }
  void resize(std::size_t n) {
    n_ = n;
    psi_.assign(n * n, 0.0);
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> psi_;
};

struct SearchResult {
  DroppingVector x;
  // Sum of psi over kept packets, accumulated head to tail.
  double score = 0.0;
};

// Objective of a single candidate; bit (n-1-i) of mask is packet i.
double score_mask(const SuccessTable& table, std::uint64_t mask);

// Candidate order: higher score, then more kept, then lexicographically
// larger vector (head first).
bool better_candidate(double score_a, std::uint64_t mask_a, double score_b, std::uint64_t mask_b) noexcept;

DroppingVector mask_to_vector(std::uint64_t mask, std::size_t n);

// Serial exhaustive search over all 2^n dropping vectors. Reference kernel.
SearchResult search_enumerate(const SuccessTable& table);

// Same search, candidates split across OpenMP threads. Deterministic: the
// per-thread winners are merged with the same total order.
SearchResult search_enumerate_parallel(const SuccessTable& table);

// Exact O(n^2) dynamic program over (position, kept-so-far). Returns the
// same vector and the same score as search_enumerate.
SearchResult search_dynamic(const SuccessTable& table);

}  // namespace deltaq
