#include "deltaq/delta_aqm.hpp"

#include <stdexcept>

namespace deltaq {

DeltaAqm::DeltaAqm(std::shared_ptr<const LatencyPredictor> predictor, DeltaOptions options)
    : predictor_(std::move(predictor)), options_(options) {
  if (!predictor_) throw std::invalid_argument("DeltaAqm needs a latency predictor");
}

DroppingVector DeltaAqm::decide(const QueueState& state) {
  if (state.empty()) {
    last_ = {};
    return {};
  }
  table_.fill(state.budgets, *predictor_, options_.include_self_in_condition ? 1 : 0);
  switch (options_.search) {
    case DeltaSearch::Enumerate:
      last_ = options_.parallel_enumeration ? search_enumerate_parallel(table_) : search_enumerate(table_);
      break;
    case DeltaSearch::DynamicProgram:
      last_ = search_dynamic(table_);
      break;
  }
  return last_.x;
}

SearchResult delta_decide_enum(const QueueState& state, const LatencyPredictor& predictor,
                               bool include_self_in_condition) {
  SuccessTable table;
  table.fill(state.budgets, predictor, include_self_in_condition ? 1 : 0);
  return search_enumerate(table);
}

SearchResult delta_decide_dp(const QueueState& state, const LatencyPredictor& predictor,
                             bool include_self_in_condition) {
  SuccessTable table;
  table.fill(state.budgets, predictor, include_self_in_condition ? 1 : 0);
  return search_dynamic(table);
}

}  // namespace deltaq
