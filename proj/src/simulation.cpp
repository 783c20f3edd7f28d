#include "deltaq/simulation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace deltaq {

QueueSimulation::QueueSimulation(SimulationConfig config, AqmPolicy policy,
                                 CompletionObserver observer)
    : config_(std::move(config)),
      policy_(std::move(policy)),
      observer_(std::move(observer)),
      service_(config_.service, RngStream(config_.seed, "service")) {
  if (!(config_.interarrival > 0.0)) throw std::invalid_argument("interarrival must be positive");
  if (!(config_.target_delay >= 0.0)) throw std::invalid_argument("target delay must be >= 0");
  if (config_.aqm_window == 0) throw std::invalid_argument("aqm_window must be >= 1");
  const bool set = std::visit([](const auto& p) { return p != nullptr; }, policy_);
  if (!set) throw std::invalid_argument("QueueSimulation: no AQM policy given");
}

void QueueSimulation::run_until(std::uint64_t packet_budget) {
  budget_ = packet_budget;
  if (metrics_.completed >= budget_) return;
  if (!started_) {
    events_.schedule(0.0, EventKind::Arrival);
    started_ = true;
  }
  while (metrics_.completed < budget_) {
    if (events_.empty()) {
      throw std::logic_error("run_until: event queue drained after " +
                             std::to_string(metrics_.completed) + " of " +
                             std::to_string(budget_) + " completions");
    }
    step(events_.pop());
  }
}

void QueueSimulation::step(const Event& event) {
  switch (event.kind) {
    case EventKind::Arrival: on_arrival(); break;
    case EventKind::ServiceCompletion: on_service_completion(); break;
    case EventKind::DecisionRound:
      decision_round();
      start_service_if_idle();
      break;
  }
}

void QueueSimulation::on_arrival() {
  const SimTime now = events_.now();
  Packet p;
  p.id = next_id_++;
  p.arrival_time = now;
  p.target_delay = config_.target_delay;
  p.service_draw = service_();
  p.predecessors_at_entry = static_cast<std::uint32_t>(waiting_.size() + (in_service_ ? 1 : 0));
  waiting_.push_back(p);
  events_.schedule(now + config_.interarrival, EventKind::Arrival);

  decision_round();
  start_service_if_idle();
}

void QueueSimulation::on_service_completion() {
  if (!in_service_) throw std::logic_error("service completion with an idle server");
  Packet done = *in_service_;
  in_service_.reset();
  done.status = PacketStatus::Served;
  done.completion_time = events_.now();
  complete(done);

  decision_round();
  start_service_if_idle();
}

void QueueSimulation::decision_round() {
  if (waiting_.empty()) return;
  std::visit(
      [this](auto& p) {
        using T = std::decay_t<decltype(*p)>;
        if constexpr (std::is_same_v<T, OnlineAqm>) {
          if (p->uses_decision_rounds()) online_round(*p);
        } else {
          clairvoyant_round(*p);
        }
      },
      policy_);
}

void QueueSimulation::online_round(OnlineAqm& aqm) {
  ++decision_rounds_;
  const SimTime now = events_.now();
  const std::size_t n = std::min(waiting_.size(), config_.aqm_window);
  snapshot_.time = now;
  snapshot_.budgets.resize(n);
  for (std::size_t i = 0; i < n; ++i) snapshot_.budgets[i] = remaining_budget(waiting_[i], now);
  apply_drops(aqm.decide(snapshot_), n);
}

void QueueSimulation::clairvoyant_round(ClairvoyantAqm& aqm) {
  ++decision_rounds_;
  const std::size_t n = std::min(waiting_.size(), config_.aqm_window);
  ClairvoyantState state;
  state.time = events_.now();
  state.server_free_at = in_service_ ? in_service_end_ : state.time;
  state.waiting.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Packet& p = waiting_[i];
    state.waiting.push_back({p.arrival_time, p.target_delay, p.service_draw});
  }
  apply_drops(aqm.decide(state), n);
}

void QueueSimulation::apply_drops(const DroppingVector& x, std::size_t window) {
  if (x.size() != window) {
    throw std::logic_error("policy returned a dropping vector of length " +
                           std::to_string(x.size()) + " for a window of " +
                           std::to_string(window));
  }
  if (x.kept() == window) return;
  std::size_t write = 0;
  for (std::size_t i = 0; i < window; ++i) {
    if (x.keeps(i)) {
      if (write != i) waiting_[write] = std::move(waiting_[i]);
      ++write;
    } else {
      Packet& p = waiting_[i];
      p.status = PacketStatus::Dropped;
      complete(p);
    }
  }
  waiting_.erase(waiting_.begin() + static_cast<std::ptrdiff_t>(write),
                 waiting_.begin() + static_cast<std::ptrdiff_t>(window));
}

void QueueSimulation::start_service_if_idle() {
  const SimTime now = events_.now();
  OnlineAqm* online = nullptr;
  if (auto* p = std::get_if<std::unique_ptr<OnlineAqm>>(&policy_)) online = p->get();

  while (!in_service_ && !waiting_.empty()) {
    Packet head = std::move(waiting_.front());
    waiting_.pop_front();
    if (online != nullptr &&
        online->on_dequeue(now - head.arrival_time, now, waiting_.size()) == DequeueVerdict::Drop) {
      head.status = PacketStatus::Dropped;
      complete(head);
      continue;
    }
    head.status = PacketStatus::InService;
    head.service_start = now;
    in_service_end_ = now + head.service_draw;
    in_service_ = std::move(head);
    events_.schedule(in_service_end_, EventKind::ServiceCompletion);
  }
}

void QueueSimulation::complete(Packet& packet) {
  if (metrics_.completed >= budget_) return;
  metrics_.record(classify(packet));
  if (observer_) observer_(packet);
}

}  // namespace deltaq
