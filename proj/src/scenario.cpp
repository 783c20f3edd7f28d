#include "deltaq/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace deltaq {

using nlohmann::json;

std::string_view to_string(AqmKind kind) noexcept {
  switch (kind) {
    case AqmKind::None: return "none";
    case AqmKind::OfflineOptimum: return "offline_optimum";
    case AqmKind::Codel: return "codel";
    case AqmKind::Delta: return "delta";
  }
  return "none";
}

AqmKind parse_aqm_kind(std::string_view name) {
  if (name == "none") return AqmKind::None;
  if (name == "offline_optimum") return AqmKind::OfflineOptimum;
  if (name == "codel") return AqmKind::Codel;
  if (name == "delta") return AqmKind::Delta;
  throw std::invalid_argument("aqm.type: unknown policy '" + std::string(name) + "'");
}

double ScenarioConfig::effective_interarrival() const {
  if (utilization) return interarrival_for_utilization(gamma.mean(), *utilization);
  if (interarrival) return *interarrival;
  throw std::invalid_argument("utilization: either utilization or interarrival is required");
}

double ScenarioConfig::effective_utilization() const {
  if (utilization) return *utilization;
  return gamma.mean() / effective_interarrival();
}

void ScenarioConfig::validate() const {
  if (id.empty()) throw std::invalid_argument("id: must not be empty");
  if (num_packets < 1) throw std::invalid_argument("num_packets: must be >= 1");
  try {
    gamma.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("gamma: ") + e.what());
  }
  if (utilization && interarrival) {
    throw std::invalid_argument("utilization: give either utilization or interarrival, not both");
  }
  if (utilization && !(*utilization > 0.0 && *utilization < 1.0)) {
    throw std::invalid_argument("utilization: must lie in (0, 1)");
  }
  if (interarrival && !(*interarrival > 0.0)) throw std::invalid_argument("interarrival: must be positive");
  if (!utilization && !interarrival) throw std::invalid_argument("utilization: missing");
  if (target.delay.has_value() == target.quantile.has_value()) {
    throw std::invalid_argument("target: give exactly one of delay or quantile");
  }
  if (target.delay && !(*target.delay >= 0.0)) throw std::invalid_argument("target.delay: must be >= 0");
  if (target.quantile && !(*target.quantile > 0.0 && *target.quantile < 1.0)) {
    throw std::invalid_argument("target.quantile: must lie in (0, 1)");
  }
  if (aqm_window < 1) throw std::invalid_argument("aqm_window: must be >= 1");
  if (aqm == AqmKind::Delta) {
    if (delta.model_path.empty()) throw std::invalid_argument("aqm.model: required for delta");
    if (delta.mode == DeltaSearch::Enumerate && aqm_window > kMaxEnumerationSize) {
      throw std::invalid_argument("aqm_window: too large for enumeration mode");
    }
    if (aqm_window > kMaxDynamicProgramSize) throw std::invalid_argument("aqm_window: too large");
  }
  if (aqm == AqmKind::Codel) {
    if (codel.fixed) {
      codel.fixed->validate();
    } else {
      if (codel.target_factors.empty() || codel.interval_factors.empty()) {
        throw std::invalid_argument("aqm: empty CoDel tuning grid");
      }
      if (!(codel.pilot_fraction > 0.0 && codel.pilot_fraction <= 1.0)) {
        throw std::invalid_argument("aqm.pilot_fraction: must lie in (0, 1]");
      }
    }
  }
}

SimulationConfig ScenarioConfig::simulation(double target_delay) const {
  SimulationConfig s;
  s.service = gamma;
  s.interarrival = effective_interarrival();
  s.target_delay = target_delay;
  s.aqm_window = aqm_window;
  s.seed = seed;
  return s;
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw std::invalid_argument(where + key + ": unknown field");
  }
}

template <class T>
T get_field(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(where + key + ": missing or wrong type");
  }
}

std::vector<double> get_doubles(const json& obj, const char* key, const std::string& where) {
  return get_field<std::vector<double>>(obj, key, where);
}

ScenarioConfig parse_one(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario: expected an object");
  reject_unknown(j,
                 {"id", "seed", "seeds", "num_packets", "gamma", "utilization", "interarrival",
                  "target", "aqm", "aqm_window", "calibration_seed", "calibration_packets"},
                 "");
  ScenarioConfig c;
  if (j.contains("id")) c.id = get_field<std::string>(j, "id", "");
  if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed", "");
  if (j.contains("num_packets")) c.num_packets = get_field<std::uint64_t>(j, "num_packets", "");
  if (j.contains("gamma")) {
    const json& g = j.at("gamma");
    if (!g.is_object()) throw std::invalid_argument("gamma: expected an object");
    reject_unknown(g, {"concentration", "rate"}, "gamma.");
    c.gamma.concentration = get_field<double>(g, "concentration", "gamma.");
    c.gamma.rate = get_field<double>(g, "rate", "gamma.");
  }
  if (j.contains("utilization")) c.utilization = get_field<double>(j, "utilization", "");
  if (j.contains("interarrival")) c.interarrival = get_field<double>(j, "interarrival", "");
  if (j.contains("target")) {
    const json& t = j.at("target");
    if (!t.is_object()) throw std::invalid_argument("target: expected an object");
    reject_unknown(t, {"delay", "quantile"}, "target.");
    if (t.contains("delay")) c.target.delay = get_field<double>(t, "delay", "target.");
    if (t.contains("quantile")) c.target.quantile = get_field<double>(t, "quantile", "target.");
  }
  if (j.contains("aqm")) {
    const json& a = j.at("aqm");
    if (!a.is_object()) throw std::invalid_argument("aqm: expected an object");
    c.aqm = parse_aqm_kind(get_field<std::string>(a, "type", "aqm."));
    switch (c.aqm) {
      case AqmKind::None:
      case AqmKind::OfflineOptimum:
        reject_unknown(a, {"type"}, "aqm.");
        break;
      case AqmKind::Codel:
        reject_unknown(a, {"type", "target", "interval", "target_factors", "interval_factors", "pilot_fraction"},
                       "aqm.");
        if (a.contains("target") || a.contains("interval")) {
          c.codel.fixed = CodelConfig{get_field<double>(a, "target", "aqm."),
                                      get_field<double>(a, "interval", "aqm.")};
        }
        if (a.contains("target_factors")) c.codel.target_factors = get_doubles(a, "target_factors", "aqm.");
        if (a.contains("interval_factors")) c.codel.interval_factors = get_doubles(a, "interval_factors", "aqm.");
        if (a.contains("pilot_fraction")) c.codel.pilot_fraction = get_field<double>(a, "pilot_fraction", "aqm.");
        break;
      case AqmKind::Delta: {
        reject_unknown(a, {"type", "model", "mode", "include_self_in_condition"}, "aqm.");
        c.delta.model_path = get_field<std::string>(a, "model", "aqm.");
        if (a.contains("mode")) {
          const auto mode = get_field<std::string>(a, "mode", "aqm.");
          if (mode == "dp") c.delta.mode = DeltaSearch::DynamicProgram;
          else if (mode == "enum") c.delta.mode = DeltaSearch::Enumerate;
          else throw std::invalid_argument("aqm.mode: expected 'dp' or 'enum'");
        }
        if (a.contains("include_self_in_condition")) {
          c.delta.include_self_in_condition = get_field<bool>(a, "include_self_in_condition", "aqm.");
        }
        break;
      }
    }
  }
  if (j.contains("aqm_window")) c.aqm_window = get_field<std::size_t>(j, "aqm_window", "");
  if (j.contains("calibration_seed")) c.calibration_seed = get_field<std::uint64_t>(j, "calibration_seed", "");
  if (j.contains("calibration_packets")) {
    c.calibration_packets = get_field<std::uint64_t>(j, "calibration_packets", "");
  }
  return c;
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["id"] = c.id;
  j["seed"] = c.seed;
  j["num_packets"] = c.num_packets;
  j["gamma"] = {{"concentration", c.gamma.concentration}, {"rate", c.gamma.rate}};
  if (c.utilization) j["utilization"] = *c.utilization;
  if (c.interarrival) j["interarrival"] = *c.interarrival;
  json t = json::object();
  if (c.target.delay) t["delay"] = *c.target.delay;
  if (c.target.quantile) t["quantile"] = *c.target.quantile;
  j["target"] = t;
  json a = {{"type", std::string(to_string(c.aqm))}};
  if (c.aqm == AqmKind::Codel) {
    if (c.codel.fixed) {
      a["target"] = c.codel.fixed->target;
      a["interval"] = c.codel.fixed->interval;
    } else {
      a["target_factors"] = c.codel.target_factors;
      a["interval_factors"] = c.codel.interval_factors;
      a["pilot_fraction"] = c.codel.pilot_fraction;
    }
  }
  if (c.aqm == AqmKind::Delta) {
    a["model"] = c.delta.model_path;
    a["mode"] = c.delta.mode == DeltaSearch::Enumerate ? "enum" : "dp";
    a["include_self_in_condition"] = c.delta.include_self_in_condition;
  }
  j["aqm"] = a;
  j["aqm_window"] = c.aqm_window;
  if (c.calibration_seed) j["calibration_seed"] = *c.calibration_seed;
  if (c.calibration_packets) j["calibration_packets"] = *c.calibration_packets;
  return j;
}

std::vector<ScenarioConfig> expand(const json& j) {
  ScenarioConfig base = parse_one(j);
  std::vector<ScenarioConfig> out;
  if (j.contains("seeds")) {
    const auto seeds = get_field<std::vector<std::uint64_t>>(j, "seeds", "");
    if (j.contains("seed")) throw std::invalid_argument("seeds: give either seed or seeds");
    for (std::uint64_t s : seeds) {
      ScenarioConfig c = base;
      c.seed = s;
      c.validate();
      out.push_back(std::move(c));
    }
  } else {
    base.validate();
    out.push_back(std::move(base));
  }
  return out;
}

}  // namespace

std::vector<ScenarioConfig> parse_scenarios(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("suite: ") + e.what());
  }
  const json* list = &doc;
  if (doc.is_object() && doc.contains("scenarios")) {
    reject_unknown(doc, {"scenarios"}, "");
    list = &doc.at("scenarios");
  }
  std::vector<ScenarioConfig> out;
  if (list->is_array()) {
    for (const json& item : *list) {
      auto more = expand(item);
      out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
  } else if (list->is_object()) {
    out = expand(*list);
  } else {
    throw std::invalid_argument("suite: expected an object or array");
  }
  return out;
}

std::string scenario_to_json(const ScenarioConfig& config) { return to_json(config).dump(2); }

std::vector<ScenarioConfig> load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenarios(ss.str());
}

void save_suite(const std::vector<ScenarioConfig>& suite, const std::filesystem::path& path) {
  json list = json::array();
  for (const ScenarioConfig& c : suite) list.push_back(to_json(c));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << json{{"scenarios", list}}.dump(2) << "\n";
}

}  // namespace deltaq
