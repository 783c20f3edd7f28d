#pragma once

#include <memory>

#include "deltaq/aqm.hpp"
#include "deltaq/delta_search.hpp"
#include "deltaq/latency_model.hpp"

namespace deltaq {

enum class DeltaSearch : std::uint8_t { Enumerate, DynamicProgram };

struct DeltaOptions {
  DeltaSearch search = DeltaSearch::DynamicProgram;
  // Condition packet i on sum_{j<=i} x_j instead of sum_{j<i} x_j.
  bool include_self_in_condition = false;
  // Use the OpenMP enumeration kernel when search == Enumerate.
  bool parallel_enumeration = false;
};

/// Delta: at each decision round keep the subset of waiting packets that
/// maximises the summed predicted probability of meeting their deadlines.
class DeltaAqm final : public OnlineAqm {
 public:
  DeltaAqm(std::shared_ptr<const LatencyPredictor> predictor, DeltaOptions options = {});

  std::string name() const override { return "delta"; }
  DroppingVector decide(const QueueState& state) override;

  // Search result of the most recent round (score included).
  const SearchResult& last_result() const noexcept { return last_; }
  const DeltaOptions& options() const noexcept { return options_; }

 private:
  std::shared_ptr<const LatencyPredictor> predictor_;
  DeltaOptions options_;
  SuccessTable table_;
  SearchResult last_;
};

// One-shot helpers matching the two search routes.
SearchResult delta_decide_enum(const QueueState& state, const LatencyPredictor& predictor,
                               bool include_self_in_condition = false);
SearchResult delta_decide_dp(const QueueState& state, const LatencyPredictor& predictor,
                             bool include_self_in_condition = false);

}  // namespace deltaq
