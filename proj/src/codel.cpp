#include "deltaq/codel.hpp"

#include <cmath>
#include <stdexcept>

namespace deltaq {

void CodelConfig::validate() const {
  if (!(target > 0.0) || !std::isfinite(target)) throw std::invalid_argument("codel target must be positive");
  if (!(interval > 0.0) || !std::isfinite(interval)) {
    throw std::invalid_argument("codel interval must be positive");
  }
}

namespace {

SimTime control_law(const CodelConfig& config, SimTime t, std::uint32_t count) {
  return t + config.interval / std::sqrt(static_cast<double>(count));
}

// Tracks how long the sojourn has been above target; true once it has been
// for a whole interval.
bool ok_to_drop(const CodelConfig& config, double sojourn, SimTime now, std::size_t backlog_after,
                CodelState& s) {
  if (sojourn < config.target || backlog_after <= kCodelMinBacklog) {
    s.first_above_time.reset();
    return false;
  }
  if (!s.first_above_time) {
    s.first_above_time = now + config.interval;
    return false;
  }
  return now >= *s.first_above_time;
}

}  // namespace

DequeueVerdict codel_dequeue_hook(const CodelConfig& config, double sojourn, SimTime now,
                                  std::size_t backlog_after, CodelState& s) {
  const bool ok = ok_to_drop(config, sojourn, now, backlog_after, s);
  if (s.dropping) {
    if (!ok) {
      s.dropping = false;
      return DequeueVerdict::Deliver;
    }
    if (now >= s.drop_next) {
      ++s.count;
      s.drop_next = control_law(config, s.drop_next, s.count);
      return DequeueVerdict::Drop;
    }
    return DequeueVerdict::Deliver;
  }
  if (!ok) return DequeueVerdict::Deliver;

  // Re-entering shortly after leaving: resume near the previous drop rate.
  const std::uint32_t delta = s.count - s.last_count;
  s.count = 1;
  if (delta > 1 && now - s.drop_next < 16.0 * config.interval) s.count = delta;
  s.dropping = true;
  s.drop_next = control_law(config, now, s.count);
  s.last_count = s.count;
  return DequeueVerdict::Drop;
}

CodelAqm::CodelAqm(CodelConfig config) : config_(config) { config_.validate(); }

DequeueVerdict CodelAqm::on_dequeue(double sojourn, SimTime now, std::size_t backlog_after) {
  const DequeueVerdict v = codel_dequeue_hook(config_, sojourn, now, backlog_after, state_);
  if (v == DequeueVerdict::Drop) ++drops_;
  return v;
}

}  // namespace deltaq
