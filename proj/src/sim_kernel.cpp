#include "deltaq/sim_kernel.hpp"

#include <stdexcept>
#include <string>

namespace deltaq {

Event EventQueue::schedule(SimTime time, EventKind kind) {
  if (!(time >= clock_)) {
    throw std::logic_error("EventQueue::schedule: event at t=" + std::to_string(time) +
                           " is before the clock t=" + std::to_string(clock_));
  }
  Event e{time, kind, next_sequence_++};
  heap_.push(e);
  return e;
}

Event EventQueue::pop() {
  if (heap_.empty()) throw std::logic_error("EventQueue::pop: queue is empty");
  Event e = heap_.top();
  heap_.pop();
  clock_ = e.time;
  return e;
}

}  // namespace deltaq
