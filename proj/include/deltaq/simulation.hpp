#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>

#include "deltaq/aqm.hpp"
#include "deltaq/queue_model.hpp"
#include "deltaq/sim_kernel.hpp"

namespace deltaq {

inline constexpr std::size_t kDefaultAqmWindow = 15;

struct SimulationConfig {
  ServiceDistribution service = GammaService{};
  double interarrival = 10.0;
  double target_delay = 0.0;
  std::size_t aqm_window = kDefaultAqmWindow;
  std::uint64_t seed = 1;
};

// Invoked once per counted completion (served or dropped).
using CompletionObserver = std::function<void(const Packet&)>;

/// Single FIFO queue with one server, deterministic arrivals starting at
/// t = 0, pre-sampled service draws and an AQM policy.
///
/// A decision round runs after every arrival and after every service
/// completion, before the server picks its next packet. Dropped packets are
/// removed immediately; the packet in service is never offered to the policy.
class QueueSimulation {
 public:
  QueueSimulation(SimulationConfig config, AqmPolicy policy, CompletionObserver observer = {});

  // Dispatches events until `packet_budget` packets have completed. Completions
  // past the budget within the final event are not counted.
  void run_until(std::uint64_t packet_budget);

  void step(const Event& event);

  const RunMetrics& metrics() const noexcept { return metrics_; }
  SimTime now() const noexcept { return events_.now(); }
  std::size_t waiting() const noexcept { return waiting_.size(); }
  bool server_busy() const noexcept { return in_service_.has_value(); }
  std::uint64_t decision_rounds() const noexcept { return decision_rounds_; }
  const AqmPolicy& policy() const noexcept { return policy_; }
  const SimulationConfig& config() const noexcept { return config_; }

 private:
  void on_arrival();
  void on_service_completion();
  void decision_round();
  void online_round(OnlineAqm& aqm);
  void clairvoyant_round(ClairvoyantAqm& aqm);
  void apply_drops(const DroppingVector& x, std::size_t window);
  void start_service_if_idle();
  void complete(Packet& packet);

  SimulationConfig config_;
  AqmPolicy policy_;
  CompletionObserver observer_;
  EventQueue events_;
  ServiceSampler service_;
  std::deque<Packet> waiting_;
  std::optional<Packet> in_service_;
  SimTime in_service_end_ = 0.0;
  RunMetrics metrics_;
  std::uint64_t budget_ = 0;
  std::uint64_t next_id_ = 0;
  std::uint64_t decision_rounds_ = 0;
  bool started_ = false;
  QueueState snapshot_;
};

}  // namespace deltaq
