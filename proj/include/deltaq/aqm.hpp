#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "deltaq/queue_model.hpp"

namespace deltaq {

/// Keep/drop decision per waiting packet, head first. 1 = keep, 0 = drop.
struct DroppingVector {
  std::vector<std::uint8_t> bits;

  static DroppingVector keep_all(std::size_t n) { return DroppingVector{std::vector<std::uint8_t>(n, 1)}; }

  std::size_t size() const noexcept { return bits.size(); }
  bool keeps(std::size_t i) const noexcept { return bits[i] != 0; }
  std::size_t kept() const noexcept;

  bool operator==(const DroppingVector&) const = default;
};

enum class DequeueVerdict : std::uint8_t { Deliver, Drop };

/// Policy that sees only what an online queue manager can observe:
/// the remaining delay budgets of the waiting packets.
class OnlineAqm {
 public:
  virtual ~OnlineAqm() = default;

  virtual std::string name() const = 0;

  // Called at every decision round with a snapshot of the first
  // min(n_waiting, window) waiting packets.
  virtual DroppingVector decide(const QueueState& state) = 0;

  // Called each time the server is about to take the head packet.
  virtual DequeueVerdict on_dequeue(double sojourn, SimTime now, std::size_t backlog_after) {
    (void)sojourn;
    (void)now;
    (void)backlog_after;
    return DequeueVerdict::Deliver;
  }

  // Policies that never drop at decision rounds may skip snapshot construction.
  virtual bool uses_decision_rounds() const { return true; }
};

struct ClairvoyantPacket {
  SimTime arrival_time = 0.0;
  double target_delay = 0.0;
  double service_draw = 0.0;
};

struct ClairvoyantState {
  SimTime time = 0.0;
  SimTime server_free_at = 0.0;
  std::vector<ClairvoyantPacket> waiting;
};

/// Policy granted the true service draws of the waiting packets.
class ClairvoyantAqm {
 public:
  virtual ~ClairvoyantAqm() = default;
  virtual std::string name() const = 0;
  virtual DroppingVector decide(const ClairvoyantState& state) = 0;
};

// The simulator only builds a ClairvoyantState for the second alternative,
// so online policies have no path to the service draws.
using AqmPolicy = std::variant<std::unique_ptr<OnlineAqm>, std::unique_ptr<ClairvoyantAqm>>;

std::string policy_name(const AqmPolicy& policy);

class NoAqm final : public OnlineAqm {
 public:
  std::string name() const override { return "none"; }
  DroppingVector decide(const QueueState& state) override {
    return DroppingVector::keep_all(state.size());
  }
  bool uses_decision_rounds() const override { return false; }
};

/// Drops the head while its true completion time would miss its deadline.
/// Non-head packets are always kept.
class OfflineOptimum final : public ClairvoyantAqm {
 public:
  std::string name() const override { return "offline_optimum"; }
  DroppingVector decide(const ClairvoyantState& state) override;
};

}  // namespace deltaq
