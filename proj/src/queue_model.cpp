#include "deltaq/queue_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace deltaq {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void GammaService::validate() const {
  if (!positive_finite(concentration)) {
    throw std::invalid_argument("gamma concentration must be positive, got " +
                                std::to_string(concentration));
  }
  if (!positive_finite(rate)) {
    throw std::invalid_argument("gamma rate must be positive, got " + std::to_string(rate));
  }
}

void ConstantService::validate() const {
  if (!positive_finite(value)) {
    throw std::invalid_argument("constant service time must be positive, got " +
                                std::to_string(value));
  }
}

double mean_service(const ServiceDistribution& dist) {
  return std::visit([](const auto& d) { return d.mean(); }, dist);
}

void validate_service(const ServiceDistribution& dist) {
  std::visit([](const auto& d) { d.validate(); }, dist);
}

double sample_service(const GammaService& dist, RngStream& rng) {
  std::gamma_distribution<double> gamma(dist.concentration, 1.0 / dist.rate);
  return gamma(rng.engine());
}

ServiceSampler::ServiceSampler(const ServiceDistribution& dist, RngStream rng)
    : dist_(dist), rng_(std::move(rng)) {
  validate_service(dist_);
  if (const auto* g = std::get_if<GammaService>(&dist_)) {
    gamma_ = std::gamma_distribution<double>(g->concentration, 1.0 / g->rate);
  }
}

double ServiceSampler::operator()() {
  if (const auto* c = std::get_if<ConstantService>(&dist_)) return c->value;
  // Gamma draws can underflow to exactly 0 for tiny shapes; keep them strictly positive.
  double s = gamma_(rng_.engine());
  return s > 0.0 ? s : std::numeric_limits<double>::min();
}

double interarrival_for_utilization(double mean_service_time, double utilization) {
  if (!(utilization > 0.0 && utilization < 1.0)) {
    throw std::invalid_argument("utilization must lie in (0, 1), got " +
                                std::to_string(utilization));
  }
  if (!positive_finite(mean_service_time)) {
    throw std::invalid_argument("mean service time must be positive");
  }
  return mean_service_time / utilization;
}

double Packet::sojourn() const {
  if (!completion_time) throw std::logic_error("sojourn of a packet that was never served");
  return *completion_time - arrival_time;
}

double Packet::waiting_time() const {
  if (!service_start) throw std::logic_error("waiting time of a packet that never started service");
  return *service_start - arrival_time;
}

double remaining_budget(const Packet& packet, SimTime t) {
  if (t < packet.arrival_time) {
    throw std::logic_error("remaining_budget: t precedes the packet's arrival");
  }
  return std::max(packet.target_delay - (t - packet.arrival_time), 0.0);
}

void RunMetrics::record(Outcome outcome) noexcept {
  ++completed;
  switch (outcome) {
    case Outcome::OnTime: ++served_on_time; break;
    case Outcome::Late: ++served_late; break;
    case Outcome::Dropped: ++dropped; break;
  }
}

std::optional<double> RunMetrics::failed_ratio() const noexcept {
  if (empty()) return std::nullopt;
  return static_cast<double>(served_late + dropped) / static_cast<double>(completed);
}

std::optional<double> RunMetrics::dropped_ratio() const noexcept {
  if (empty()) return std::nullopt;
  return static_cast<double>(dropped) / static_cast<double>(completed);
}

std::optional<double> RunMetrics::delayed_ratio() const noexcept {
  if (empty()) return std::nullopt;
  return static_cast<double>(served_late) / static_cast<double>(completed);
}

std::optional<double> RunMetrics::success_ratio() const noexcept {
  if (empty()) return std::nullopt;
  return static_cast<double>(served_on_time) / static_cast<double>(completed);
}

RunMetrics finalize_metrics(std::span<const Outcome> outcomes) {
  RunMetrics m;
  for (Outcome o : outcomes) m.record(o);
  return m;
}

Outcome classify(const Packet& completed) {
  switch (completed.status) {
    case PacketStatus::Dropped: return Outcome::Dropped;
    case PacketStatus::Served:
      return completed.sojourn() <= completed.target_delay ? Outcome::OnTime : Outcome::Late;
    default: throw std::logic_error("classify: packet has not completed");
  }
}

}  // namespace deltaq
