#include "deltaq/aqm.hpp"

#include <algorithm>

namespace deltaq {

std::size_t DroppingVector::kept() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::string policy_name(const AqmPolicy& policy) {
  return std::visit([](const auto& p) { return p ? p->name() : std::string("unset"); }, policy);
}

DroppingVector OfflineOptimum::decide(const ClairvoyantState& state) {
  DroppingVector x = DroppingVector::keep_all(state.waiting.size());
  const SimTime start = std::max(state.time, state.server_free_at);
  for (std::size_t i = 0; i < state.waiting.size(); ++i) {
    const ClairvoyantPacket& head = state.waiting[i];
    if (start + head.service_draw <= head.arrival_time + head.target_delay) break;
    x.bits[i] = 0;
  }
  return x;
}

}  // namespace deltaq
