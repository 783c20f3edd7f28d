#include "deltaq/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace deltaq {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ModelFormatError(where + key, "missing field");
  return obj.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ModelFormatError(field, "expected a number");
  return v.get<double>();
}

std::vector<double> number_array(const json& v, const std::string& field) {
  if (!v.is_array()) throw ModelFormatError(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string model_to_json(const ConditionalLatencyModel& model) {
  const ModelMetadata& md = model.metadata();
  json meta = {
      {"samples", md.samples},
      {"gamma_concentration", md.gamma_concentration},
      {"gamma_rate", md.gamma_rate},
      {"utilization", md.utilization},
      {"estimator", md.estimator},
      {"components", md.components},
  };
  json fit = json::array();
  for (const ConditionFit& f : md.fit) {
    json row = {{"x", f.x},
                {"samples", f.samples},
                {"iterations", f.iterations},
                {"converged", f.converged},
                {"moment_matched", f.moment_matched},
                {"log_likelihood", f.log_likelihood}};
    if (f.filled) row["filled_from"] = f.filled_from;
    fit.push_back(std::move(row));
  }
  meta["fit"] = std::move(fit);

  json conditions = json::array();
  for (std::size_t x = 0; x < model.conditions().size(); ++x) {
    const GaussianMixture& g = model.conditions()[x];
    conditions.push_back(
        {{"x", x}, {"weights", g.weights}, {"means", g.means}, {"stddevs", g.stddevs}});
  }
  json doc = {{"version", kModelFormatVersion}, {"metadata", std::move(meta)},
              {"conditions", std::move(conditions)}};
  return doc.dump(2) + "\n";
}

ConditionalLatencyModel model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelFormatError("<document>", e.what());
  }
  if (!doc.is_object()) throw ModelFormatError("<document>", "expected a JSON object");

  const json& version = require(doc, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw ModelFormatError("version", "unsupported model format version");
  }

  ModelMetadata md;
  const json& meta = require(doc, "metadata", "");
  md.samples = static_cast<std::uint64_t>(number(require(meta, "samples", "metadata."), "metadata.samples"));
  md.gamma_concentration = number(require(meta, "gamma_concentration", "metadata."), "metadata.gamma_concentration");
  md.gamma_rate = number(require(meta, "gamma_rate", "metadata."), "metadata.gamma_rate");
  md.utilization = number(require(meta, "utilization", "metadata."), "metadata.utilization");
  if (meta.contains("estimator") && meta["estimator"].is_string()) md.estimator = meta["estimator"].get<std::string>();
  if (meta.contains("components") && meta["components"].is_number_unsigned()) {
    md.components = meta["components"].get<std::size_t>();
  }
  if (meta.contains("fit") && meta["fit"].is_array()) {
    for (const json& row : meta["fit"]) {
      ConditionFit f;
      f.x = row.value("x", std::size_t{0});
      f.samples = row.value("samples", std::size_t{0});
      f.iterations = row.value("iterations", 0);
      f.converged = row.value("converged", false);
      f.moment_matched = row.value("moment_matched", false);
      f.log_likelihood = row.value("log_likelihood", 0.0);
      if (row.contains("filled_from")) {
        f.filled = true;
        f.filled_from = row["filled_from"].get<std::size_t>();
      }
      md.fit.push_back(f);
    }
  }

  const json& conds = require(doc, "conditions", "");
  if (!conds.is_array() || conds.empty()) {
    throw ModelFormatError("conditions", "expected a non-empty array");
  }
  std::vector<GaussianMixture> per_condition(conds.size());
  std::vector<bool> seen(conds.size(), false);
  for (std::size_t i = 0; i < conds.size(); ++i) {
    const std::string where = "conditions[" + std::to_string(i) + "]";
    const json& c = conds[i];
    const json& xv = require(c, "x", where + ".");
    if (!xv.is_number_unsigned()) throw ModelFormatError(where + ".x", "expected a non-negative integer");
    const auto x = xv.get<std::size_t>();
    if (x >= conds.size() || seen[x]) {
      throw ModelFormatError(where + ".x", "conditions must cover 0..max exactly once");
    }
    seen[x] = true;

    GaussianMixture g;
    g.weights = number_array(require(c, "weights", where + "."), where + ".weights");
    g.means = number_array(require(c, "means", where + "."), where + ".means");
    g.stddevs = number_array(require(c, "stddevs", where + "."), where + ".stddevs");
    if (g.weights.empty()) throw ModelFormatError(where + ".weights", "no components");
    if (g.means.size() != g.weights.size()) throw ModelFormatError(where + ".means", "length differs from weights");
    if (g.stddevs.size() != g.weights.size()) throw ModelFormatError(where + ".stddevs", "length differs from weights");
    double total = 0.0;
    for (double w : g.weights) {
      if (!(w >= 0.0)) throw ModelFormatError(where + ".weights", "negative weight");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ModelFormatError(where + ".weights", "weights sum to " + std::to_string(total) + ", expected 1");
    }
    for (double s : g.stddevs) {
      if (!(s > 0.0) || !std::isfinite(s)) throw ModelFormatError(where + ".stddevs", "stddevs must be positive");
    }
    for (double m : g.means) {
      if (!std::isfinite(m)) throw ModelFormatError(where + ".means", "means must be finite");
    }
    per_condition[x] = std::move(g);
  }
  return ConditionalLatencyModel(std::move(per_condition), std::move(md));
}

void save_model(const ConditionalLatencyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << model_to_json(model);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ConditionalLatencyModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_file(path));
}

std::uint64_t file_fingerprint(const std::filesystem::path& path) {
  return hash_label(read_file(path));
}

}  // namespace deltaq
