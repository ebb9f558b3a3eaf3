#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "phasekit/estimation.hpp"
#include "phasekit/random.hpp"
#include "phasekit/types.hpp"

namespace phasekit {

/// Configuration of one simulated photon-counting estimate:
/// `acquisitions` probe copies (M), each carrying a Poisson(mean_photons)
/// photon packet, measured at analyzer angle alpha. The effective
/// measurement count is N = M * mean_photons.
struct ExperimentConfig {
  int acquisitions = 60;       // M
  double mean_photons = 10.0;  // n_bar
  double delta_sq = 0.0;
  double theta = pi / 4;
  double alpha = 0.0;
  PhaseWindow window{};
  std::uint64_t seed = 1;
  int grid_size = 2048;

  double effective_measurements() const {
    return acquisitions * mean_photons;
  }
};

void validate(const ExperimentConfig& config);

/// One acquisition: a Gaussian phase kick kappa ~ N(0, 2 Delta^2) shared by
/// a Poisson(n_bar) photon packet, split binomially by the noiseless
/// response evaluated at phi_true + kappa. Returns (n_plus, n_minus).
std::pair<long long, long long> simulate_acquisition(
    double phi_true, const ExperimentConfig& config, RandomStream& rng);

struct EstimatePair {
  PhaseEstimate inversion;
  PhaseEstimate bayes;
};

/// Simulates M acquisitions, aggregates the counts and runs both
/// estimators with the dephasing-damped marginal likelihood.
EstimatePair run_estimate(double phi_true, const ExperimentConfig& config,
                          RandomStream& rng);

struct SweepRow {
  double phi_true = 0.0;
  double var_inversion = 0.0;     // across replications of the point estimate
  double var_bayes = 0.0;         // across replications of the point estimate
  double posterior_var_mean = 0.0;  // replication-averaged Bayesian variance
  double crb_classical = 0.0;     // 1/(F M n_bar)
  double crb_quantum = 0.0;       // 1/(H M n_bar)
  int replications = 0;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<SweepRow> rows;
};

/// Replicated estimates over a phase grid. Rows and replications use
/// independent substreams keyed by (row, replication), so results are
/// bit-identical for a given (config, seed) at any thread count.
/// `threads` = 0 picks PHASEKIT_THREADS or the hardware concurrency.
SweepResult sweep(const std::vector<double>& phi_grid, int replications,
                  const ExperimentConfig& config, int threads = 0);

struct AdaptiveStep {
  int step_index = 0;  // 1-based
  double alpha_used = 0.0;
  double estimate = 0.0;
  double variance = 0.0;
};

struct AdaptiveTrace {
  std::vector<AdaptiveStep> steps;
};

/// Adaptive protocol: step 1 measures at config.alpha on config.window;
/// every later step re-orients the analyzer to alpha = pi/2 + previous
/// Bayes estimate and estimates on the pi-window (alpha - pi, alpha), where
/// the rotated response is injective and centered on the running estimate.
/// Each step uses fresh M acquisitions.
AdaptiveTrace adaptive_run(double phi_true, int steps,
                           const ExperimentConfig& config, RandomStream& rng);

/// Detector rates for the gated coincidence counting scheme.
struct DetectorSpec {
  double direct_rate_1 = 0.0;       // N_1, counts/s
  double direct_rate_2 = 0.0;       // N_2, counts/s
  double gate_rate = 0.0;           // N_g, counts/s
  double dark_rate_1 = 0.0;         // N_1,dc, counts/s
  double dark_rate_2 = 0.0;         // N_2,dc, counts/s
  double coincidence_window = 0.0;  // Delta t, s
  double acquisition_time = 1.0;    // T, s
};

void validate(const DetectorSpec& spec);

struct CoincidenceChannel {
  double total = 0.0;   // N_ig = (N_i + N_i,dc) N_g Delta t, per second
  double signal = 0.0;  // N_i N_g Delta t
  double dark = 0.0;    // N_i,dc N_g Delta t
};

/// Expected coincidence rates per channel; pure arithmetic, no sampling.
std::array<CoincidenceChannel, 2> coincidence_counts(const DetectorSpec& spec);

/// Worker count used by sweep: PHASEKIT_THREADS when set, else the
/// hardware concurrency, at least 1.
int default_thread_count();

}  // namespace phasekit
