#pragma once

#include <string>

#include <json.hpp>

#include "phasekit/estimation.hpp"
#include "phasekit/experiment.hpp"

namespace phasekit {

/// Decimal rendering with 9 significant digits ("%.9g").
std::string format_number(double value);

/// CSV with header
/// phi,var_inv,var_bayes,post_var_mean,crb_classical,crb_quantum,replications
std::string sweep_csv(const SweepResult& result);

/// JSON mirror of the sweep with the resolved config and seed echoed.
nlohmann::json sweep_json(const SweepResult& result);

/// CSV with header step,alpha,estimate,variance
std::string adaptive_csv(const AdaptiveTrace& trace);

nlohmann::json adaptive_json(const AdaptiveTrace& trace,
                             const ExperimentConfig& config, double phi_true,
                             int steps);

nlohmann::json config_json(const ExperimentConfig& config);

/// Count data plus the measurement model it was taken under.
struct CountsFile {
  CountRecord counts;
  double alpha = 0.0;
  double delta_sq = 0.0;
  double theta = pi / 4;
};

/// Parses {"acquisitions": [[n_plus, n_minus], ...], "alpha": <rad>,
/// "delta_sq": <val>, "theta": <rad>}; throws std::invalid_argument on
/// schema violations.
CountsFile parse_counts_json(const std::string& text);

CountsFile load_counts_file(const std::string& path);

}  // namespace phasekit
