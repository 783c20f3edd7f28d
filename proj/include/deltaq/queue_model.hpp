#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "deltaq/rng.hpp"
#include "deltaq/sim_kernel.hpp"

namespace deltaq {

/// Gamma-distributed service time, parameterised by shape and rate.
struct GammaService {
  double concentration = 5.0;
  double rate = 0.5;

  double mean() const noexcept { return concentration / rate; }
  double variance() const noexcept { return concentration / (rate * rate); }
  // Throws std::invalid_argument unless both parameters are positive and finite.
  void validate() const;
};

// Fixed service time; used by hand-traced tests.
struct ConstantService {
  double value = 1.0;

  double mean() const noexcept { return value; }
  void validate() const;
};

using ServiceDistribution = std::variant<GammaService, ConstantService>;

double mean_service(const ServiceDistribution& dist);
void validate_service(const ServiceDistribution& dist);

// One i.i.d. Gamma draw.
double sample_service(const GammaService& dist, RngStream& rng);

/// Stateful service-time source bound to a single RNG stream.
class ServiceSampler {
 public:
  ServiceSampler(const ServiceDistribution& dist, RngStream rng);

  double operator()();

 private:
  ServiceDistribution dist_;
  RngStream rng_;
  std::gamma_distribution<double> gamma_;
};

// Deterministic inter-arrival giving utilization rho = arrival rate / service rate.
double interarrival_for_utilization(double mean_service_time, double utilization);

enum class PacketStatus : std::uint8_t { Waiting, InService, Served, Dropped };

struct Packet {
  std::uint64_t id = 0;
  SimTime arrival_time = 0.0;
  double target_delay = 0.0;
  // Pre-sampled at arrival. Only the clairvoyant policy and the metrics sink read it.
  double service_draw = 0.0;
  std::uint32_t predecessors_at_entry = 0;
  PacketStatus status = PacketStatus::Waiting;
  std::optional<SimTime> service_start;
  std::optional<SimTime> completion_time;

  SimTime deadline() const noexcept { return arrival_time + target_delay; }
  // Y = completion - arrival; only meaningful once Served.
  double sojourn() const;
  double waiting_time() const;
};

// max(target - (t - arrival), 0). Throws std::logic_error when t < arrival.
double remaining_budget(const Packet& packet, SimTime t);

/// Immutable snapshot handed to online policies at a decision round:
/// remaining budgets of the first n waiting packets, head first.
struct QueueState {
  SimTime time = 0.0;
  std::vector<double> budgets;

  std::size_t size() const noexcept { return budgets.size(); }
  bool empty() const noexcept { return budgets.empty(); }
};

enum class Outcome : std::uint8_t { OnTime, Late, Dropped };

struct RunMetrics {
  std::uint64_t completed = 0;
  std::uint64_t served_on_time = 0;
  std::uint64_t served_late = 0;
  std::uint64_t dropped = 0;

  void record(Outcome outcome) noexcept;

  bool empty() const noexcept { return completed == 0; }
  // Ratios are nullopt for an empty run.
  std::optional<double> failed_ratio() const noexcept;
  std::optional<double> dropped_ratio() const noexcept;
  std::optional<double> delayed_ratio() const noexcept;
  // R_M = served_on_time / m.
  std::optional<double> success_ratio() const noexcept;

  bool operator==(const RunMetrics&) const = default;
};

RunMetrics finalize_metrics(std::span<const Outcome> outcomes);

Outcome classify(const Packet& completed);

}  // namespace deltaq
