#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"

#include "deltaq/aqm.hpp"
#include "deltaq/codel.hpp"
#include "deltaq/simulation.hpp"

using namespace deltaq;

namespace {

SimulationConfig loaded(double utilization, double target, std::uint64_t seed) {
  SimulationConfig c;
  c.interarrival = interarrival_for_utilization(10.0, utilization);
  c.target_delay = target;
  c.seed = seed;
  return c;
}

// Feeds CoDel a packet every `step` time units with a fixed sojourn and a
// deep backlog; returns the drop times.
std::vector<double> drive_codel(const CodelConfig& cfg, double sojourn, double until, double step,
                                std::size_t backlog = 50) {
  CodelState st;
  std::vector<double> drops;
  for (int i = 0;; ++i) {
    const double now = step * i;
    if (now > until) break;
    if (codel_dequeue_hook(cfg, sojourn, now, backlog, st) == DequeueVerdict::Drop) drops.push_back(now);
  }
  return drops;
}

}  // namespace

TEST_CASE("no-AQM keeps everything") {
  NoAqm aqm;
  QueueState s{3.0, {1.0, 2.0, 0.0, 9.0}};
  CHECK(aqm.decide(s) == DroppingVector::keep_all(4));

  QueueSimulation sim(loaded(0.95, 20.0, 3), std::make_unique<NoAqm>());
  sim.run_until(20'000);
  CHECK(sim.metrics().dropped == 0);
  CHECK(sim.metrics().served_late > 0);
}

TEST_CASE("offline optimum drops a head that would miss its deadline") {
  OfflineOptimum oo;
  ClairvoyantState s;
  s.time = 0.0;
  s.server_free_at = 95.0;
  s.waiting = {{0.0, 100.0, 10.0}, {0.0, 100.0, 4.0}};
  // Head would finish at 105 > 100; the next one then finishes at 99.
  CHECK(oo.decide(s).bits == std::vector<std::uint8_t>{0, 1});

  s.waiting[0].service_draw = 5.0;
  CHECK(oo.decide(s) == DroppingVector::keep_all(2));

  ClairvoyantState idle;
  idle.time = 50.0;
  idle.waiting = {{40.0, 5.0, 1.0}};
  CHECK(oo.decide(idle).bits == std::vector<std::uint8_t>{0});
}

TEST_CASE("offline optimum never serves a late packet and beats no-AQM") {
  for (std::uint64_t seed : {1u, 2u}) {
    QueueSimulation oo(loaded(0.916, 30.0, seed), std::make_unique<OfflineOptimum>());
    QueueSimulation none(loaded(0.916, 30.0, seed), std::make_unique<NoAqm>());
    oo.run_until(30'000);
    none.run_until(30'000);
    CHECK(oo.metrics().served_late == 0);
    CHECK(*oo.metrics().failed_ratio() <= *none.metrics().failed_ratio());
    CHECK(policy_name(oo.policy()) == "offline_optimum");
  }
}

TEST_CASE("CoDel never drops while sojourn stays below target") {
  const CodelConfig cfg{5.0, 100.0};
  CHECK(drive_codel(cfg, 4.99, 10'000.0, 1.0).empty());
}

TEST_CASE("CoDel never drops a near-empty queue") {
  const CodelConfig cfg{5.0, 100.0};
  CHECK(drive_codel(cfg, 50.0, 10'000.0, 1.0, kCodelMinBacklog).empty());
}

TEST_CASE("CoDel control law spaces drops by I/sqrt(count)") {
  const CodelConfig cfg{5.0, 100.0};
  const double step = 0.01;
  const auto drops = drive_codel(cfg, 50.0, 400.0, step);
  REQUIRE(drops.size() >= 4);
  // First drop only after a full interval above target.
  CHECK(drops[0] >= 100.0);
  CHECK(drops[0] == doctest::Approx(100.0).epsilon(step / 100.0));
  const double I = cfg.interval;
  CHECK(std::abs((drops[1] - drops[0]) - I) <= 2 * step);
  CHECK(std::abs((drops[2] - drops[1]) - I / std::sqrt(2.0)) <= 2 * step);
  CHECK(std::abs((drops[3] - drops[2]) - I / std::sqrt(3.0)) <= 2 * step);
}

TEST_CASE("CoDel leaves the dropping state when sojourn falls below target") {
  const CodelConfig cfg{5.0, 100.0};
  CodelState st;
  for (int t = 0; t <= 150; ++t) codel_dequeue_hook(cfg, 50.0, t, 10, st);
  CHECK(st.dropping);
  codel_dequeue_hook(cfg, 1.0, 151.0, 10, st);
  CHECK_FALSE(st.dropping);
  CHECK_FALSE(st.first_above_time.has_value());
}

TEST_CASE("CoDel configuration is validated") {
  CHECK_THROWS_AS((CodelConfig{0.0, 100.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CodelConfig{5.0, -1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS(CodelAqm(CodelConfig{5.0, 0.0}), std::invalid_argument);
}

TEST_CASE("CoDel in the simulator drops under overload only") {
  auto light = std::make_unique<CodelAqm>(CodelConfig{40.0, 100.0});
  CodelAqm* light_ptr = light.get();
  QueueSimulation a(loaded(0.3, 100.0, 1), std::move(light));
  a.run_until(20'000);
  CHECK(light_ptr->drops() == 0);
  CHECK(a.metrics().dropped == 0);

  auto heavy = std::make_unique<CodelAqm>(CodelConfig{5.0, 20.0});
  CodelAqm* heavy_ptr = heavy.get();
  QueueSimulation b(loaded(0.95, 100.0, 1), std::move(heavy));
  b.run_until(20'000);
  CHECK(heavy_ptr->drops() > 0);
  CHECK(b.metrics().dropped == heavy_ptr->drops());
}
