#include "deltaq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <stdexcept>

#include <omp.h>

#include "deltaq/aqm.hpp"
#include "deltaq/delta_aqm.hpp"
#include "deltaq/model_io.hpp"
#include "deltaq/simulation.hpp"

namespace deltaq {

std::vector<CodelConfig> codel_grid(double target_delay, double mean_service,
                                    const std::vector<double>& target_factors,
                                    const std::vector<double>& interval_factors) {
  std::vector<CodelConfig> grid;
  for (double tf : target_factors) {
    for (double inf : interval_factors) grid.push_back({tf * target_delay, inf * mean_service});
  }
  return grid;
}

CodelTuning tune_codel(const ScenarioConfig& base, double target_delay, const std::vector<CodelConfig>& grid,
                       std::uint64_t pilot_packets) {
  if (grid.empty()) throw std::invalid_argument("tune_codel: empty grid");
  if (pilot_packets == 0) throw std::invalid_argument("tune_codel: pilot needs at least one packet");

  std::vector<CodelConfig> ordered = grid;
  std::stable_sort(ordered.begin(), ordered.end(), [](const CodelConfig& a, const CodelConfig& b) {
    if (a.target != b.target) return a.target < b.target;
    return a.interval < b.interval;
  });

  // Pilots use their own seed so tuning never sees the evaluation sample path.
  SimulationConfig sim = base.simulation(target_delay);
  sim.seed = derive_seed(base.seed, "codel-pilot");

  CodelTuning out;
  double best = 2.0;
  for (const CodelConfig& c : ordered) {
    QueueSimulation run(sim, std::make_unique<CodelAqm>(c));
    run.run_until(pilot_packets);
    const double f = *run.metrics().failed_ratio();
    out.scores.push_back({c, f});
    if (f < best) {
      best = f;
      out.best = c;
    }
  }
  return out;
}

LoadedModel ModelCache::get(const std::string& path) {
  std::lock_guard lock(mutex_);
  if (auto it = models_.find(path); it != models_.end()) return it->second;
  LoadedModel m;
  m.fingerprint = file_fingerprint(path);
  m.model = std::make_shared<const ConditionalLatencyModel>(load_model(path));
  return models_.emplace(path, std::move(m)).first->second;
}

double resolve_target_delay(const ScenarioConfig& config, RunContext& ctx) {
  if (config.target.delay) return *config.target.delay;
  const double q = config.target.quantile.value();
  return calibrate_targets(config, std::span<const double>(&q, 1), &ctx.calibration).front();
}

ReportRow run_scenario(const ScenarioConfig& config, RunContext& ctx) {
  ReportRow row;
  row.scenario_id = config.id;
  row.aqm = std::string(to_string(config.aqm));
  row.seed = config.seed;
  row.target_quantile = config.target.quantile;
  const auto start = std::chrono::steady_clock::now();
  try {
    config.validate();
    row.utilization = config.effective_utilization();
    const double target = resolve_target_delay(config, ctx);
    row.target_delay = target;

    AqmPolicy policy;
    switch (config.aqm) {
      case AqmKind::None: policy = std::make_unique<NoAqm>(); break;
      case AqmKind::OfflineOptimum: policy = std::make_unique<OfflineOptimum>(); break;
      case AqmKind::Codel: {
        CodelConfig cc;
        if (config.codel.fixed) {
          cc = *config.codel.fixed;
        } else {
          const auto grid = codel_grid(target, config.gamma.mean(), config.codel.target_factors,
                                       config.codel.interval_factors);
          const auto pilot = std::max<std::uint64_t>(
              1, static_cast<std::uint64_t>(config.codel.pilot_fraction * static_cast<double>(config.num_packets)));
          cc = tune_codel(config, target, grid, pilot).best;
        }
        row.codel = cc;
        policy = std::make_unique<CodelAqm>(cc);
        break;
      }
      case AqmKind::Delta: {
        const LoadedModel lm = ctx.models.get(config.delta.model_path);
        row.model_fingerprint = lm.fingerprint;
        DeltaOptions opts;
        opts.search = config.delta.mode;
        opts.include_self_in_condition = config.delta.include_self_in_condition;
        policy = std::make_unique<DeltaAqm>(lm.model, opts);
        break;
      }
    }

    QueueSimulation sim(config.simulation(target), std::move(policy));
    sim.run_until(config.num_packets);
    row.metrics = sim.metrics();
  } catch (const std::exception& e) {
    row.error = e.what();
    row.metrics = {};
  }
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kJobsEnvVar)) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

BenchReport run_benchmark(const std::vector<ScenarioConfig>& suite, const BenchOptions& options) {
  RunContext ctx;
  return run_benchmark(suite, options, ctx);
}

BenchReport run_benchmark(const std::vector<ScenarioConfig>& suite, const BenchOptions& options,
                          RunContext& ctx) {
  BenchReport report;
  report.rows.resize(suite.size());
  const int jobs = resolve_jobs(options.jobs);
  const auto n = static_cast<long>(suite.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (long i = 0; i < n; ++i) {
    ReportRow row = run_scenario(suite[static_cast<std::size_t>(i)], ctx);
#pragma omp critical(deltaq_bench_rows)
    {
      if (options.on_row) options.on_row(row);
      report.rows[static_cast<std::size_t>(i)] = std::move(row);
    }
  }
  report.sort();
  return report;
}

}  // namespace deltaq
