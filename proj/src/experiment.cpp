#include "phasekit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include "phasekit/metrology.hpp"

namespace phasekit {

namespace {

double sample_mean(const std::vector<double>& values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

double sample_variance(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = sample_mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size() - 1);
}

}  // namespace

void validate(const ExperimentConfig& config) {
  if (config.acquisitions < 1)
    throw std::invalid_argument("ExperimentConfig: acquisitions must be >= 1");
  if (!(config.mean_photons > 0.0))
    throw std::invalid_argument("ExperimentConfig: mean_photons must be > 0");
  if (config.delta_sq < 0.0)
    throw std::invalid_argument("ExperimentConfig: delta_sq must be >= 0");
  if (!(config.theta >= 0.0 && config.theta <= pi / 2))
    throw std::invalid_argument("ExperimentConfig: theta must lie in [0, pi/2]");
  if (config.grid_size < 64)
    throw std::invalid_argument("ExperimentConfig: grid_size must be >= 64");
  validate(config.window);
}

std::pair<long long, long long> simulate_acquisition(
    double phi_true, const ExperimentConfig& config, RandomStream& rng) {
  auto& engine = rng.engine();

  double kicked_phi = phi_true;
  if (config.delta_sq > 0.0) {
    std::normal_distribution<double> kick(0.0, std::sqrt(2.0 * config.delta_sq));
    kicked_phi += kick(engine);
  }

  std::poisson_distribution<long long> photons(config.mean_photons);
  const long long total = photons(engine);
  if (total == 0) return {0, 0};

  // noiseless response at the kicked phase; the noise enters only through
  // the kick
  const auto p = outcome_probabilities(config.theta, kicked_phi,
                                       NoiseSpec<double>{0.0},
                                       MeasurementSetting<double>{config.alpha});
  std::binomial_distribution<long long> split(total, p.p_plus);
  const long long n_plus = split(engine);
  return {n_plus, total - n_plus};
}

EstimatePair run_estimate(double phi_true, const ExperimentConfig& config,
                          RandomStream& rng) {
  validate(config);

  CountRecord counts;
  counts.acquisitions.reserve(static_cast<std::size_t>(config.acquisitions));
  for (int m = 0; m < config.acquisitions; ++m) {
    const auto [np, nm] = simulate_acquisition(phi_true, config, rng);
    counts.n_plus += np;
    counts.n_minus += nm;
    counts.acquisitions.emplace_back(np, nm);
  }

  const NoiseSpec<double> noise{config.delta_sq};
  const MeasurementSetting<double> setting{config.alpha};

  EstimatePair pair;
  pair.inversion = invert_counts(counts, noise, config.theta, setting,
                                 config.window);
  const Posterior posterior = bayes_posterior(counts, noise, config.theta,
                                              setting, config.grid_size,
                                              config.window);
  pair.bayes = bayes_estimate(posterior);
  return pair;
}

int default_thread_count() {
  if (const char* env = std::getenv("PHASEKIT_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

SweepResult sweep(const std::vector<double>& phi_grid, int replications,
                  const ExperimentConfig& config, int threads) {
  validate(config);
  if (replications < 1)
    throw std::invalid_argument("sweep: replications must be >= 1");
  if (phi_grid.empty())
    throw std::invalid_argument("sweep: empty phase grid");

  SweepResult result;
  result.config = config;
  result.rows.resize(phi_grid.size());

  const NoiseSpec<double> noise{config.delta_sq};
  const MeasurementSetting<double> setting{config.alpha};
  const double n_eff = config.effective_measurements();

  const auto compute_row = [&](std::size_t row) {
    const double phi = phi_grid[row];
    std::vector<double> inv_values, bayes_values, posterior_vars;
    inv_values.reserve(static_cast<std::size_t>(replications));
    bayes_values.reserve(static_cast<std::size_t>(replications));
    posterior_vars.reserve(static_cast<std::size_t>(replications));

    for (int rep = 0; rep < replications; ++rep) {
      RandomStream rng = RandomStream::substream(
          config.seed, static_cast<std::uint64_t>(row),
          static_cast<std::uint64_t>(rep));
      const EstimatePair pair = run_estimate(phi, config, rng);
      inv_values.push_back(pair.inversion.value);
      bayes_values.push_back(pair.bayes.value);
      posterior_vars.push_back(pair.bayes.variance);
    }

    SweepRow& out = result.rows[row];
    out.phi_true = phi;
    out.var_inversion = sample_variance(inv_values);
    out.var_bayes = sample_variance(bayes_values);
    out.posterior_var_mean = sample_mean(posterior_vars);
    const double fisher = fisher_information(config.theta, phi, noise, setting);
    const double h = qfi(config.theta, noise);
    out.crb_classical = fisher > 0.0
                            ? 1.0 / (n_eff * fisher)
                            : std::numeric_limits<double>::infinity();
    out.crb_quantum = h > 0.0 ? 1.0 / (n_eff * h)
                              : std::numeric_limits<double>::infinity();
    out.replications = replications;
  };

  int workers = threads > 0 ? threads : default_thread_count();
  workers = std::min<int>(workers, static_cast<int>(phi_grid.size()));

  if (workers <= 1) {
    for (std::size_t row = 0; row < phi_grid.size(); ++row) compute_row(row);
    return result;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t row = next.fetch_add(1);
        if (row >= phi_grid.size()) return;
        try {
          compute_row(row);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (failure) std::rethrow_exception(failure);
  return result;
}

AdaptiveTrace adaptive_run(double phi_true, int steps,
                           const ExperimentConfig& config, RandomStream& rng) {
  validate(config);
  if (steps < 1)
    throw std::invalid_argument("adaptive_run: steps must be >= 1");

  const NoiseSpec<double> noise{config.delta_sq};

  AdaptiveTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(steps));

  double alpha = config.alpha;
  PhaseWindow window = config.window;
  for (int step = 1; step <= steps; ++step) {
    ExperimentConfig step_config = config;
    step_config.alpha = alpha;
    step_config.window = window;

    CountRecord counts;
    for (int m = 0; m < config.acquisitions; ++m) {
      const auto [np, nm] = simulate_acquisition(phi_true, step_config, rng);
      counts.n_plus += np;
      counts.n_minus += nm;
    }
    const Posterior posterior =
        bayes_posterior(counts, noise, config.theta,
                        MeasurementSetting<double>{alpha}, config.grid_size,
                        window);
    const PhaseEstimate estimate = bayes_estimate(posterior);
    trace.steps.push_back({step, alpha, estimate.value, estimate.variance});

    // re-orient so the next delta = alpha - phi sits near pi/2, and estimate
    // on the pi-window where cos(alpha - phi) is injective
    alpha = pi / 2 + estimate.value;
    window = PhaseWindow{alpha - pi, alpha};
  }
  return trace;
}

void validate(const DetectorSpec& spec) {
  if (spec.direct_rate_1 < 0.0 || spec.direct_rate_2 < 0.0 ||
      spec.gate_rate < 0.0 || spec.dark_rate_1 < 0.0 || spec.dark_rate_2 < 0.0)
    throw std::invalid_argument("DetectorSpec: rates must be nonnegative");
  if (!(spec.coincidence_window > 0.0))
    throw std::invalid_argument("DetectorSpec: coincidence window must be > 0");
  if (!(spec.acquisition_time > 0.0))
    throw std::invalid_argument("DetectorSpec: acquisition time must be > 0");
}

std::array<CoincidenceChannel, 2> coincidence_counts(const DetectorSpec& spec) {
  validate(spec);
  const double gate_window = spec.gate_rate * spec.coincidence_window;
  std::array<CoincidenceChannel, 2> channels;
  const double direct[2] = {spec.direct_rate_1, spec.direct_rate_2};
  const double dark[2] = {spec.dark_rate_1, spec.dark_rate_2};
  for (int i = 0; i < 2; ++i) {
    channels[i].signal = direct[i] * gate_window;
    channels[i].dark = dark[i] * gate_window;
    channels[i].total = channels[i].signal + channels[i].dark;
  }
  return channels;
}

}  // namespace phasekit
