#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace deltaq {

// Simulation time is a unitless continuous scalar shared by arrivals,
// service draws, delay targets and budgets.
using SimTime = double;

enum class EventKind : std::uint8_t { Arrival, ServiceCompletion, DecisionRound };

struct Event {
  SimTime time = 0.0;
  EventKind kind = EventKind::Arrival;
  std::uint64_t sequence = 0;
};

/// Time-ordered event queue with a monotone virtual clock.
///
/// Events dispatch in nondecreasing time; equal-time events dispatch in
/// insertion order. Popping an event advances the clock to its time.
class EventQueue {
 public:
  // Throws std::logic_error when time < now().
  Event schedule(SimTime time, EventKind kind);

  Event pop();

  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }
  SimTime now() const noexcept { return clock_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime clock_ = 0.0;
  std::uint64_t next_sequence_ = 0;
};

}  // namespace deltaq
