#include "phasekit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phasekit {

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out =
      "phi,var_inv,var_bayes,post_var_mean,crb_classical,crb_quantum,"
      "replications\n";
  for (const SweepRow& row : result.rows) {
    out += format_number(row.phi_true);
    out += ',';
    out += format_number(row.var_inversion);
    out += ',';
    out += format_number(row.var_bayes);
    out += ',';
    out += format_number(row.posterior_var_mean);
    out += ',';
    out += format_number(row.crb_classical);
    out += ',';
    out += format_number(row.crb_quantum);
    out += ',';
    out += std::to_string(row.replications);
    out += '\n';
  }
  return out;
}

nlohmann::json config_json(const ExperimentConfig& config) {
  return nlohmann::json{{"M", config.acquisitions},
                        {"n_bar", config.mean_photons},
                        {"delta_sq", config.delta_sq},
                        {"theta", config.theta},
                        {"alpha", config.alpha},
                        {"window", {config.window.lo, config.window.hi}},
                        {"seed", config.seed},
                        {"grid_size", config.grid_size}};
}

nlohmann::json sweep_json(const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& row : result.rows) {
    rows.push_back({{"phi", row.phi_true},
                    {"var_inv", row.var_inversion},
                    {"var_bayes", row.var_bayes},
                    {"post_var_mean", row.posterior_var_mean},
                    {"crb_classical", row.crb_classical},
                    {"crb_quantum", row.crb_quantum},
                    {"replications", row.replications}});
  }
  return nlohmann::json{{"config", config_json(result.config)},
                        {"seed", result.config.seed},
                        {"rows", rows}};
}

std::string adaptive_csv(const AdaptiveTrace& trace) {
  std::string out = "step,alpha,estimate,variance\n";
  for (const AdaptiveStep& step : trace.steps) {
    out += std::to_string(step.step_index);
    out += ',';
    out += format_number(step.alpha_used);
    out += ',';
    out += format_number(step.estimate);
    out += ',';
    out += format_number(step.variance);
    out += '\n';
  }
  return out;
}

nlohmann::json adaptive_json(const AdaptiveTrace& trace,
                             const ExperimentConfig& config, double phi_true,
                             int steps) {
  nlohmann::json rows = nlohmann::json::array();
  for (const AdaptiveStep& step : trace.steps) {
    rows.push_back({{"step", step.step_index},
                    {"alpha", step.alpha_used},
                    {"estimate", step.estimate},
                    {"variance", step.variance}});
  }
  return nlohmann::json{{"config", config_json(config)},
                        {"seed", config.seed},
                        {"phi_true", phi_true},
                        {"steps", steps},
                        {"trace", rows}};
}

CountsFile parse_counts_json(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& error) {
    throw std::invalid_argument(std::string("counts file: invalid JSON: ") +
                                error.what());
  }
  if (!parsed.is_object())
    throw std::invalid_argument("counts file: top level must be an object");
  for (const char* key : {"acquisitions", "alpha", "delta_sq", "theta"})
    if (!parsed.contains(key))
      throw std::invalid_argument(std::string("counts file: missing key '") +
                                  key + "'");
  if (!parsed["acquisitions"].is_array() || parsed["acquisitions"].empty())
    throw std::invalid_argument(
        "counts file: 'acquisitions' must be a nonempty array");

  std::vector<std::pair<long long, long long>> acquisitions;
  for (const auto& entry : parsed["acquisitions"]) {
    if (!entry.is_array() || entry.size() != 2 ||
        !entry[0].is_number_integer() || !entry[1].is_number_integer())
      throw std::invalid_argument(
          "counts file: each acquisition must be a pair of integers");
    const long long np = entry[0].get<long long>();
    const long long nm = entry[1].get<long long>();
    if (np < 0 || nm < 0)
      throw std::invalid_argument("counts file: counts must be nonnegative");
    acquisitions.emplace_back(np, nm);
  }

  for (const char* key : {"alpha", "delta_sq", "theta"})
    if (!parsed[key].is_number())
      throw std::invalid_argument(std::string("counts file: '") + key +
                                  "' must be a number");

  CountsFile file;
  file.counts = CountRecord::from_acquisitions(std::move(acquisitions));
  file.alpha = parsed["alpha"].get<double>();
  file.delta_sq = parsed["delta_sq"].get<double>();
  file.theta = parsed["theta"].get<double>();
  if (file.delta_sq < 0.0)
    throw std::invalid_argument("counts file: delta_sq must be nonnegative");
  return file;
}

CountsFile load_counts_file(const std::string& path) {
  std::ifstream stream(path);
  if (!stream)
    throw std::invalid_argument("counts file: cannot open '" + path + "'");
  std::ostringstream text;
  text << stream.rdbuf();
  return parse_counts_json(text.str());
}

}  // namespace phasekit
