#include "phasekit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "phasekit/metrology.hpp"

namespace phasekit {

CountRecord CountRecord::from_totals(long long n_plus, long long n_minus) {
  if (n_plus < 0 || n_minus < 0)
    throw std::invalid_argument("CountRecord: counts must be nonnegative");
  CountRecord record;
  record.n_plus = n_plus;
  record.n_minus = n_minus;
  return record;
}

CountRecord CountRecord::from_acquisitions(
    std::vector<std::pair<long long, long long>> acquisitions) {
  CountRecord record;
  for (const auto& [np, nm] : acquisitions) {
    if (np < 0 || nm < 0)
      throw std::invalid_argument("CountRecord: counts must be nonnegative");
    record.n_plus += np;
    record.n_minus += nm;
  }
  record.acquisitions = std::move(acquisitions);
  return record;
}

bool CountRecord::consistent() const {
  if (acquisitions.empty()) return n_plus >= 0 && n_minus >= 0;
  long long np = 0;
  long long nm = 0;
  for (const auto& [a, b] : acquisitions) {
    np += a;
    nm += b;
  }
  return np == n_plus && nm == n_minus;
}

double trapezoid(const Eigen::VectorXd& grid, const Eigen::VectorXd& values) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw std::invalid_argument("trapezoid: need two matching grid points");
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
    acc += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
  return acc;
}

PhaseEstimate invert_counts(const CountRecord& counts,
                            const NoiseSpec<double>& noise, double theta,
                            const MeasurementSetting<double>& setting,
                            const PhaseWindow& window) {
  validate(window);
  if (counts.total() < 1)
    throw std::invalid_argument("invert_counts: no counts recorded");
  if (!(theta >= 0.0 && theta <= pi / 2))
    throw std::invalid_argument("invert_counts: theta must lie in [0, pi/2]");
  const double s2 = std::sin(2 * theta);
  if (s2 <= 0.0)
    throw std::invalid_argument(
        "invert_counts: probe carries no phase information at the poles");

  const double n = static_cast<double>(counts.total());
  const double raw = std::exp(noise.delta_sq) *
                     static_cast<double>(counts.n_plus - counts.n_minus) /
                     (n * s2);

  PhaseEstimate estimate;
  estimate.method = EstimatorMethod::inversion;
  estimate.clamped = std::abs(raw) > 1.0;
  const double contrast = std::clamp(raw, -1.0, 1.0);
  const double arc = std::acos(contrast);  // |alpha - phi| up to reflection

  // the measurement fixes cos(alpha - phi); pick the branch on the window
  // side of alpha, the other branch as fallback, then clamp into the window
  const double alpha =
      window.center() + wrap_angle(setting.alpha - window.center());
  const bool upper = window.center() >= alpha;
  const double primary = upper ? alpha + arc : alpha - arc;
  const double secondary = upper ? alpha - arc : alpha + arc;
  if (window.contains(primary))
    estimate.value = primary;
  else if (window.contains(secondary))
    estimate.value = secondary;
  else
    estimate.value = std::clamp(primary, window.lo, window.hi);

  if (estimate.clamped || std::abs(contrast) >= 1.0) {
    estimate.infinite_variance = true;
    estimate.variance = std::numeric_limits<double>::infinity();
    return estimate;
  }

  // first-order propagation with sigma^2(n_pm) = n_pm
  const double root = std::sqrt(1.0 - contrast * contrast);
  const double scale = std::exp(noise.delta_sq) / (s2 * root);
  const double d_plus =
      -2.0 * static_cast<double>(counts.n_minus) / (n * n) * scale;
  const double d_minus =
      2.0 * static_cast<double>(counts.n_plus) / (n * n) * scale;
  estimate.variance = d_plus * d_plus * static_cast<double>(counts.n_plus) +
                      d_minus * d_minus * static_cast<double>(counts.n_minus);
  return estimate;
}

double log_likelihood(double phi, const CountRecord& counts,
                      const NoiseSpec<double>& noise, double theta,
                      const MeasurementSetting<double>& setting) {
  const auto p = outcome_probabilities(theta, phi, noise, setting);
  double ll = 0.0;
  if (counts.n_plus > 0) {
    if (p.p_plus <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += static_cast<double>(counts.n_plus) * std::log(p.p_plus);
  }
  if (counts.n_minus > 0) {
    if (p.p_minus <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += static_cast<double>(counts.n_minus) * std::log(p.p_minus);
  }
  return ll;
}

Posterior bayes_posterior(const CountRecord& counts,
                          const NoiseSpec<double>& noise, double theta,
                          const MeasurementSetting<double>& setting,
                          int grid_size, const PhaseWindow& window) {
  if (grid_size < 64)
    throw std::invalid_argument("bayes_posterior: grid_size must be >= 64");
  validate(window);

  Eigen::VectorXd grid =
      Eigen::VectorXd::LinSpaced(grid_size, window.lo, window.hi);
  Eigen::VectorXd logl(grid_size);
  for (int i = 0; i < grid_size; ++i)
    logl[i] = log_likelihood(grid[i], counts, noise, theta, setting);
  return posterior_from_log_density(grid, logl, window);
}

Posterior posterior_from_log_density(const Eigen::VectorXd& grid,
                                     const Eigen::VectorXd& log_density,
                                     const PhaseWindow& window) {
  if (grid.size() != log_density.size() || grid.size() < 2)
    throw std::invalid_argument(
        "posterior_from_log_density: grid/log-density size mismatch");

  const double peak = log_density.maxCoeff();
  if (!std::isfinite(peak))
    throw std::runtime_error(
        "posterior_from_log_density: log density has no finite maximum");

  Posterior posterior;
  posterior.grid = grid;
  posterior.window = window;
  posterior.density = (log_density.array() - peak).exp().matrix();
  const double norm = trapezoid(grid, posterior.density);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::runtime_error(
        "posterior_from_log_density: density mass underflowed");
  posterior.density /= norm;
  return posterior;
}

PhaseEstimate bayes_estimate(const Posterior& posterior) {
  const Eigen::VectorXd& grid = posterior.grid;
  const Eigen::VectorXd& density = posterior.density;
  const double mean =
      trapezoid(grid, (grid.array() * density.array()).matrix());
  const Eigen::ArrayXd centered = grid.array() - mean;
  double variance =
      trapezoid(grid, (centered.square() * density.array()).matrix());
  variance = std::max(variance, 0.0);

  PhaseEstimate estimate;
  estimate.value = mean;
  estimate.variance = variance;
  estimate.method = EstimatorMethod::bayes;
  return estimate;
}

}  // namespace phasekit
