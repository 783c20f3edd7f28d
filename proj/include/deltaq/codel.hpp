#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "deltaq/aqm.hpp"

namespace deltaq {

struct CodelConfig {
  double target = 5.0;
  double interval = 100.0;

  void validate() const;
  bool operator==(const CodelConfig&) const = default;
};

// Packets left behind the dequeued one at or below which CoDel never drops
// (the packet-count analogue of "bytes <= MTU").
inline constexpr std::size_t kCodelMinBacklog = 1;

struct CodelState {
  std::optional<SimTime> first_above_time;
  SimTime drop_next = 0.0;
  std::uint32_t count = 0;
  std::uint32_t last_count = 0;
  bool dropping = false;
};

/// CoDel control loop evaluated once per candidate head packet at dequeue.
///
/// Enters the dropping state once the sojourn has stayed at or above target
/// for a full interval; while dropping, the next drop is scheduled at
/// drop_next + interval / sqrt(count). Leaves the dropping state as soon as
/// a dequeued packet's sojourn falls below target.
DequeueVerdict codel_dequeue_hook(const CodelConfig& config, double sojourn, SimTime now,
                                  std::size_t backlog_after, CodelState& state);

class CodelAqm final : public OnlineAqm {
 public:
  explicit CodelAqm(CodelConfig config);

  std::string name() const override { return "codel"; }
  DroppingVector decide(const QueueState& state) override { return DroppingVector::keep_all(state.size()); }
  DequeueVerdict on_dequeue(double sojourn, SimTime now, std::size_t backlog_after) override;
  bool uses_decision_rounds() const override { return false; }

  const CodelConfig& config() const noexcept { return config_; }
  const CodelState& state() const noexcept { return state_; }
  std::uint64_t drops() const noexcept { return drops_; }

 private:
  CodelConfig config_;
  CodelState state_;
  std::uint64_t drops_ = 0;
};

}  // namespace deltaq
