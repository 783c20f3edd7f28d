// deltaq: command-line entry point for the queueing lab.
//
//   deltaq calibrate --utilization 0.916 --quantiles 0.8,0.9,0.99
//   deltaq collect   --samples 4096 --out data.csv
//   deltaq train     --data data.csv --out model.json
//   deltaq simulate  --scenario one.json
//   deltaq bench     --suite suite.json --out report.csv [--jobs N]
//   deltaq report    --in report.csv
//
// Failures print a single "error: <kind>: <message>" line on stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "deltaq/bench.hpp"
#include "deltaq/calibration.hpp"
#include "deltaq/dataset.hpp"
#include "deltaq/model_io.hpp"
#include "deltaq/report.hpp"
#include "deltaq/scenario.hpp"

namespace fs = std::filesystem;
using namespace deltaq;

namespace {

struct CliError : std::runtime_error {
  CliError(std::string kind, const std::string& what) : std::runtime_error(what), kind(std::move(kind)) {}
  std::string kind;
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << "error: " << kind << ": " << one_line(message) << '\n';
  return 1;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw CliError("io", "cannot write " + path.string());
  return out;
}

struct GammaArgs {
  double concentration = GammaService{}.concentration;
  double rate = GammaService{}.rate;

  void add(CLI::App* app) {
    app->add_option("--concentration", concentration, "Gamma service shape")->capture_default_str();
    app->add_option("--rate", rate, "Gamma service rate")->capture_default_str();
  }
  GammaService get() const { return GammaService{concentration, rate}; }
};

// calibrate ---------------------------------------------------------------

struct CalibrateArgs {
  GammaArgs gamma;
  double utilization = 0.916;
  std::uint64_t packets = kDeskScalePackets;
  std::uint64_t seed = 1;
  std::vector<double> quantiles{0.8, 0.9, 0.99};
  std::string out;
};

void run_calibrate(const CalibrateArgs& a) {
  ScenarioConfig base;
  base.id = "calibration";
  base.gamma = a.gamma.get();
  base.utilization = a.utilization;
  base.num_packets = a.packets;
  base.seed = a.seed;
  base.target.delay = 0.0;
  base.validate();
  const auto targets = calibrate_targets(base, a.quantiles);

  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << "quantile,target_delay\n";
  char buf[64];
  for (std::size_t i = 0; i < targets.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", a.quantiles[i], targets[i]);
    out << buf;
  }
}

// collect / train ---------------------------------------------------------

struct CollectArgs {
  GammaArgs gamma;
  double utilization = 0.916;
  std::uint64_t seed = 1;
  std::size_t samples = 4096;
  std::string out;
};

void run_collect(const CollectArgs& a) {
  Dataset d;
  d.scenario.service = a.gamma.get();
  d.scenario.utilization = a.utilization;
  d.scenario.seed = a.seed;
  d.scenario.service.validate();
  if (!(a.utilization > 0.0 && a.utilization < 1.0)) throw std::invalid_argument("utilization: must lie in (0, 1)");
  d.samples = collect_dataset(d.scenario, a.samples);
  write_dataset(d, a.out);
  std::cout << "wrote " << d.samples.size() << " samples to " << a.out << '\n';
}

struct TrainArgs {
  std::string data;
  std::size_t components = EmOptions{}.components;
  std::uint64_t seed = 1;
  std::string out;
};

void run_train(const TrainArgs& a) {
  const Dataset d = read_dataset(a.data);
  FitOptions opts;
  opts.em.components = a.components;
  opts.seed = a.seed;
  ModelMetadata md;
  md.samples = d.samples.size();
  md.gamma_concentration = d.scenario.service.concentration;
  md.gamma_rate = d.scenario.service.rate;
  md.utilization = d.scenario.utilization;
  md.components = a.components;
  const auto model = fit_latency_model(d.samples, opts, md);
  save_model(model, a.out);
  // Re-read so a written file is known to pass load validation.
  (void)load_model(a.out);
  std::cout << "wrote model with " << model.max_condition() + 1 << " conditions to " << a.out << '\n';
}

// simulate / bench / report -----------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::string id;
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  auto suite = load_suite(a.scenario);
  if (!a.id.empty()) {
    std::erase_if(suite, [&](const ScenarioConfig& c) { return c.id != a.id; });
  }
  if (suite.size() != 1) {
    throw CliError("config", "simulate needs exactly one scenario, found " + std::to_string(suite.size()) +
                                 " (use --id or a single-seed file)");
  }
  RunContext ctx;
  BenchReport r;
  r.rows.push_back(run_scenario(suite.front(), ctx));
  if (a.out.empty()) write_report(r, std::cout);
  else write_report(r, fs::path(a.out));
  if (!r.rows.front().ok()) throw CliError("scenario", r.rows.front().error);
}

struct BenchArgs {
  std::string suite;
  std::string out;
  int jobs = 0;
};

int run_bench(const BenchArgs& a) {
  const auto suite = load_suite(a.suite);

  // Rows land in <out>.partial as they finish so an interrupted suite
  // keeps its completed rows; the sorted report replaces it at the end.
  const fs::path final_path(a.out);
  const fs::path partial = final_path.string() + ".partial";
  std::ofstream progress = open_out(partial);
  progress << kReportHeader << '\n' << std::flush;

  BenchOptions opts;
  opts.jobs = a.jobs;
  opts.on_row = [&](const ReportRow& row) {
    progress << format_row(row) << '\n' << std::flush;
    if (!row.ok()) std::cerr << "warning: scenario " << row.scenario_id << " seed " << row.seed << ": " << one_line(row.error) << '\n';
  };
  const BenchReport report = run_benchmark(suite, opts);
  progress.close();
  write_report(report, final_path);
  fs::remove(partial);

  std::size_t errors = 0;
  for (const auto& row : report.rows) errors += row.ok() ? 0 : 1;
  std::cout << "wrote " << report.rows.size() << " rows to " << a.out;
  if (errors) std::cout << " (" << errors << " with errors)";
  std::cout << '\n';
  return 0;
}

struct ReportArgs {
  std::string in;
  std::string out;
};

void run_report(const ReportArgs& a) {
  const BenchReport r = read_report(fs::path(a.in));
  const auto summary = summarize(r);
  if (a.out.empty()) {
    write_summary(summary, std::cout);
  } else {
    auto f = open_out(a.out);
    write_summary(summary, f);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delta AQM discrete-event queueing lab"};
  app.require_subcommand(1);

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Target delays from no-AQM sojourn quantiles");
  cal.gamma.add(c);
  c->add_option("--utilization", cal.utilization)->capture_default_str();
  c->add_option("--packets", cal.packets)->capture_default_str();
  c->add_option("--seed", cal.seed)->capture_default_str();
  c->add_option("--quantiles", cal.quantiles)->delimiter(',')->capture_default_str();
  c->add_option("--out", cal.out, "CSV output (default stdout)");

  CollectArgs col;
  auto* co = app.add_subcommand("collect", "Record a no-AQM training dataset");
  col.gamma.add(co);
  co->add_option("--utilization", col.utilization)->capture_default_str();
  co->add_option("--seed", col.seed)->capture_default_str();
  co->add_option("--samples", col.samples)->capture_default_str();
  co->add_option("--out", col.out)->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Fit the latency model and write a model file");
  t->add_option("--data", tr.data)->required()->check(CLI::ExistingFile);
  t->add_option("--components", tr.components)->capture_default_str();
  t->add_option("--seed", tr.seed)->capture_default_str();
  t->add_option("--out", tr.out)->required();

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run one scenario and print its report row");
  s->add_option("--scenario", sim.scenario)->required()->check(CLI::ExistingFile);
  s->add_option("--id", sim.id, "Pick one scenario out of a suite file");
  s->add_option("--out", sim.out, "CSV output (default stdout)");

  BenchArgs be;
  auto* b = app.add_subcommand("bench", "Run a suite file and write a report");
  b->add_option("--suite", be.suite)->required()->check(CLI::ExistingFile);
  b->add_option("--out", be.out)->required();
  b->add_option("--jobs", be.jobs, std::string("Concurrent scenarios (overrides ") + kJobsEnvVar + ")")
      ->check(CLI::PositiveNumber);

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Summarise a report across seeds");
  r->add_option("--in", rep.in)->required()->check(CLI::ExistingFile);
  r->add_option("--out", rep.out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << '\n';
    fail("usage", e.what());
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  try {
    if (*c) run_calibrate(cal);
    else if (*co) run_collect(col);
    else if (*t) run_train(tr);
    else if (*s) run_simulate(sim);
    else if (*b) return run_bench(be);
    else if (*r) run_report(rep);
  } catch (const CliError& e) {
    return fail(e.kind, e.what());
  } catch (const CalibrationError& e) {
    return fail("calibration", e.what());
  } catch (const ModelFormatError& e) {
    return fail("model", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
