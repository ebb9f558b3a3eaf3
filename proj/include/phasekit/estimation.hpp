#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "phasekit/types.hpp"

namespace phasekit {

/// Photon-count totals in the +/- analyzer ports, with an optional
/// per-acquisition breakdown whose sums must match the totals.
struct CountRecord {
  long long n_plus = 0;
  long long n_minus = 0;
  std::vector<std::pair<long long, long long>> acquisitions;

  long long total() const { return n_plus + n_minus; }

  static CountRecord from_totals(long long n_plus, long long n_minus);
  static CountRecord from_acquisitions(
      std::vector<std::pair<long long, long long>> acquisitions);

  /// Totals equal the breakdown sums (vacuously true without breakdown).
  bool consistent() const;
};

enum class EstimatorMethod { inversion, bayes };

struct PhaseEstimate {
  double value = 0.0;
  double variance = 0.0;
  EstimatorMethod method = EstimatorMethod::inversion;
  bool clamped = false;            // contrast fell outside [-1, 1]
  bool infinite_variance = false;  // |contrast| reached 1
};

/// Gridded posterior density over the phase window; trapezoid-normalized.
struct Posterior {
  Eigen::VectorXd grid;
  Eigen::VectorXd density;
  PhaseWindow window;
};

/// Trapezoid rule on a strictly increasing grid.
double trapezoid(const Eigen::VectorXd& grid, const Eigen::VectorXd& values);

/// Inversion estimator phi = alpha -/+ arccos(e^{Delta^2} (n+ - n-) /
/// ((n+ + n-) sin 2theta)), branch chosen toward the window, with
/// first-order error propagation assuming sigma^2(n_pm) = n_pm.
PhaseEstimate invert_counts(const CountRecord& counts,
                            const NoiseSpec<double>& noise, double theta,
                            const MeasurementSetting<double>& setting,
                            const PhaseWindow& window = {});

/// n+ ln p+(phi) + n- ln p-(phi), with 0 ln 0 = 0; -infinity when a count
/// is positive and its probability vanishes.
double log_likelihood(double phi, const CountRecord& counts,
                      const NoiseSpec<double>& noise, double theta,
                      const MeasurementSetting<double>& setting);

/// Posterior under a flat prior on the window, accumulated in log space
/// with max subtraction and trapezoid-normalized.
Posterior bayes_posterior(const CountRecord& counts,
                          const NoiseSpec<double>& noise, double theta,
                          const MeasurementSetting<double>& setting,
                          int grid_size, const PhaseWindow& window = {});

/// Normalize exp(log_density) on the grid; invariant under constant offsets
/// of the log density.
Posterior posterior_from_log_density(const Eigen::VectorXd& grid,
                                     const Eigen::VectorXd& log_density,
                                     const PhaseWindow& window);

/// Posterior mean and variance by trapezoid quadrature.
PhaseEstimate bayes_estimate(const Posterior& posterior);

}  // namespace phasekit
