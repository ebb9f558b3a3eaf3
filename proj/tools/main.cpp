#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "phasekit/estimation.hpp"
#include "phasekit/experiment.hpp"
#include "phasekit/io.hpp"
#include "phasekit/metrology.hpp"
#include "phasekit/qubit.hpp"

namespace {

using phasekit::pi;

// Delta is accepted either as the amplitude (--delta, squared internally) or
// directly as --delta-sq; the two flags are mutually exclusive.
struct NoiseFlags {
  double delta = 0.0;
  double delta_sq = 0.0;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* delta_sq_opt = nullptr;

  void attach(CLI::App* cmd) {
    delta_opt = cmd->add_option("--delta", delta,
                                "Noise amplitude Delta (squared internally)");
    delta_sq_opt =
        cmd->add_option("--delta-sq", delta_sq, "Noise factor Delta^2");
    delta_opt->excludes(delta_sq_opt);
    delta_sq_opt->excludes(delta_opt);
  }

  double resolve() const {
    if (delta_opt->count() > 0) return delta * delta;
    if (delta_sq_opt->count() > 0) return delta_sq;
    return 0.0;
  }
};

std::string fixed9(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9f", value);
  return buffer;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open output file '" + out_path + "'");
  file << content;
  if (!file) throw std::runtime_error("failed writing output file '" + out_path + "'");
}

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw std::invalid_argument("grid needs at least one point");
  if (steps == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  return grid;
}

nlohmann::json estimate_json(const phasekit::PhaseEstimate& estimate) {
  nlohmann::json out{{"value", estimate.value}};
  if (estimate.infinite_variance)
    out["variance"] = nullptr;
  else
    out["variance"] = estimate.variance;
  out["clamped"] = estimate.clamped;
  out["infinite_variance"] = estimate.infinite_variance;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phasekit: phase-shift estimation for qubits under phase diffusion"};
  app.require_subcommand(1);

  // qfi
  auto* qfi_cmd = app.add_subcommand(
      "qfi", "Quantum Fisher information and probe eigensystem");
  double qfi_theta = pi / 4;
  NoiseFlags qfi_noise;
  std::string qfi_format = "text";
  qfi_cmd->add_option("--theta", qfi_theta, "Probe angle (rad)")->required();
  qfi_noise.attach(qfi_cmd);
  qfi_cmd->add_option("--format", qfi_format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));

  // probe
  auto* probe_cmd =
      app.add_subcommand("probe", "Probe state, optionally shifted and dephased");
  double probe_theta = pi / 4;
  double probe_phi = 0.0;
  NoiseFlags probe_noise;
  std::string probe_format = "text";
  probe_cmd->add_option("--theta", probe_theta, "Probe angle (rad)")->required();
  probe_cmd->add_option("--phi", probe_phi, "Phase shift (rad)");
  probe_noise.attach(probe_cmd);
  probe_cmd->add_option("--format", probe_format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));

  // fisher
  auto* fisher_cmd = app.add_subcommand(
      "fisher", "Fisher information profile over a phase grid (CSV)");
  double fisher_theta = pi / 4;
  double fisher_alpha = 0.0;
  double fisher_n = 1.0;
  double fisher_lo = 0.0;
  double fisher_hi = pi;
  int fisher_steps = 101;
  NoiseFlags fisher_noise;
  std::string fisher_out;
  fisher_cmd->add_option("--theta", fisher_theta, "Probe angle (rad)");
  fisher_cmd->add_option("--alpha", fisher_alpha, "Analyzer angle (rad)");
  fisher_noise.attach(fisher_cmd);
  fisher_cmd->add_option("--n-measurements", fisher_n,
                         "Effective measurement count N for the bound column")
      ->check(CLI::PositiveNumber);
  fisher_cmd->add_option("--phi-min", fisher_lo, "Grid start (rad)");
  fisher_cmd->add_option("--phi-max", fisher_hi, "Grid end (rad)");
  fisher_cmd->add_option("--phi-steps", fisher_steps, "Grid points")
      ->check(CLI::PositiveNumber);
  fisher_cmd->add_option("--out", fisher_out, "Output path (default stdout)");

  // estimate
  auto* estimate_cmd = app.add_subcommand(
      "estimate", "Run both estimators on a counts file (JSON)");
  std::string counts_path;
  double est_window_lo = 0.0;
  double est_window_hi = pi;
  int est_grid = 2048;
  double est_alpha = 0.0;
  double est_theta = pi / 4;
  NoiseFlags est_noise;
  std::string est_out;
  estimate_cmd->add_option("--counts", counts_path, "Counts file path")
      ->required();
  auto* est_alpha_opt =
      estimate_cmd->add_option("--alpha", est_alpha, "Override analyzer angle");
  auto* est_theta_opt =
      estimate_cmd->add_option("--theta", est_theta, "Override probe angle");
  est_noise.attach(estimate_cmd);
  estimate_cmd->add_option("--window-lo", est_window_lo, "Window start (rad)");
  estimate_cmd->add_option("--window-hi", est_window_hi, "Window end (rad)");
  estimate_cmd->add_option("--grid-size", est_grid, "Posterior grid points");
  estimate_cmd->add_option("--out", est_out, "Output path (default stdout)");

  // sweep
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Replicated Monte Carlo estimates over a phase grid");
  phasekit::ExperimentConfig sweep_config;
  NoiseFlags sweep_noise;
  double sweep_lo = 0.1;
  double sweep_hi = pi - 0.1;
  int sweep_steps = 30;
  int sweep_reps = 200;
  int sweep_threads = 0;
  std::string sweep_out;
  std::string sweep_format = "csv";
  sweep_cmd->add_option("--M", sweep_config.acquisitions,
                        "Acquisitions per estimate")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--n-bar", sweep_config.mean_photons,
                        "Mean photons per acquisition")
      ->check(CLI::PositiveNumber);
  sweep_noise.attach(sweep_cmd);
  sweep_cmd->add_option("--theta", sweep_config.theta, "Probe angle (rad)");
  sweep_cmd->add_option("--alpha", sweep_config.alpha, "Analyzer angle (rad)");
  sweep_cmd->add_option("--window-lo", sweep_config.window.lo,
                        "Window start (rad)");
  sweep_cmd->add_option("--window-hi", sweep_config.window.hi,
                        "Window end (rad)");
  sweep_cmd->add_option("--grid-size", sweep_config.grid_size,
                        "Posterior grid points");
  sweep_cmd->add_option("--seed", sweep_config.seed, "RNG seed");
  sweep_cmd->add_option("--phi-min", sweep_lo, "Grid start (rad)");
  sweep_cmd->add_option("--phi-max", sweep_hi, "Grid end (rad)");
  sweep_cmd->add_option("--phi-steps", sweep_steps, "Grid points")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--replications", sweep_reps, "Replications per point")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", sweep_threads,
                        "Worker threads (0 = PHASEKIT_THREADS or hardware)");
  sweep_cmd->add_option("--out", sweep_out, "Output path (default stdout)");
  sweep_cmd->add_option("--format", sweep_format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // adaptive
  auto* adaptive_cmd = app.add_subcommand(
      "adaptive", "Adaptive analyzer re-orientation protocol");
  phasekit::ExperimentConfig adaptive_config;
  adaptive_config.acquisitions = 55;
  NoiseFlags adaptive_noise;
  double adaptive_phi = 0.0;
  int adaptive_steps = 4;
  std::string adaptive_out;
  std::string adaptive_format = "csv";
  adaptive_cmd->add_option("--phi", adaptive_phi, "True phase (rad)")
      ->required();
  adaptive_cmd->add_option("--steps", adaptive_steps, "Protocol steps")
      ->check(CLI::PositiveNumber);
  adaptive_cmd->add_option("--M", adaptive_config.acquisitions,
                           "Acquisitions per step")
      ->check(CLI::PositiveNumber);
  adaptive_cmd->add_option("--n-bar", adaptive_config.mean_photons,
                           "Mean photons per acquisition")
      ->check(CLI::PositiveNumber);
  adaptive_noise.attach(adaptive_cmd);
  adaptive_cmd->add_option("--theta", adaptive_config.theta, "Probe angle (rad)");
  adaptive_cmd->add_option("--alpha", adaptive_config.alpha,
                           "First-step analyzer angle (rad)");
  adaptive_cmd->add_option("--window-lo", adaptive_config.window.lo,
                           "First-step window start (rad)");
  adaptive_cmd->add_option("--window-hi", adaptive_config.window.hi,
                           "First-step window end (rad)");
  adaptive_cmd->add_option("--grid-size", adaptive_config.grid_size,
                           "Posterior grid points");
  adaptive_cmd->add_option("--seed", adaptive_config.seed, "RNG seed");
  adaptive_cmd->add_option("--out", adaptive_out, "Output path (default stdout)");
  adaptive_cmd->add_option("--format", adaptive_format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // detector
  auto* detector_cmd = app.add_subcommand(
      "detector", "Expected gated coincidence rates per channel");
  phasekit::DetectorSpec detector_spec;
  std::string detector_format = "text";
  detector_cmd->add_option("--direct-1", detector_spec.direct_rate_1,
                           "Direct counts/s on channel 1")
      ->required();
  detector_cmd->add_option("--direct-2", detector_spec.direct_rate_2,
                           "Direct counts/s on channel 2")
      ->required();
  detector_cmd->add_option("--gate", detector_spec.gate_rate,
                           "Direct counts/s on the gate channel")
      ->required();
  detector_cmd->add_option("--dark-1", detector_spec.dark_rate_1,
                           "Dark counts/s on channel 1");
  detector_cmd->add_option("--dark-2", detector_spec.dark_rate_2,
                           "Dark counts/s on channel 2");
  detector_cmd
      ->add_option("--coincidence-window", detector_spec.coincidence_window,
                   "Coincidence window (s)")
      ->required();
  detector_cmd->add_option("--acquisition-time",
                           detector_spec.acquisition_time,
                           "Acquisition time (s)");
  detector_cmd->add_option("--format", detector_format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 2;
  }

  try {
    if (*qfi_cmd) {
      const phasekit::NoiseSpec<double> noise{qfi_noise.resolve()};
      const double closed = phasekit::qfi(qfi_theta, noise);
      const double spectral = phasekit::qfi_spectral(qfi_theta, noise);
      const auto es = phasekit::eigensystem(qfi_theta, noise);
      if (qfi_format == "json") {
        nlohmann::json out{
            {"H", closed},
            {"H_spectral", spectral},
            {"difference", spectral - closed},
            {"lambda_plus", es.lambda_plus},
            {"lambda_minus", es.lambda_minus},
            {"v_plus", {es.v_plus[0].real(), es.v_plus[1].real()}},
            {"v_minus", {es.v_minus[0].real(), es.v_minus[1].real()}},
            {"theta", qfi_theta},
            {"delta_sq", noise.delta_sq}};
        emit(out.dump(2) + "\n", "");
      } else {
        std::string out;
        out += "H            = " + fixed9(closed) + "\n";
        out += "H_spectral   = " + fixed9(spectral) + "\n";
        out += "difference   = " + phasekit::format_number(spectral - closed) + "\n";
        out += "lambda_plus  = " + fixed9(es.lambda_plus) + "\n";
        out += "lambda_minus = " + fixed9(es.lambda_minus) + "\n";
        out += "v_plus       = [" + phasekit::format_number(es.v_plus[0].real()) +
               ", " + phasekit::format_number(es.v_plus[1].real()) + "]\n";
        out += "v_minus      = [" + phasekit::format_number(es.v_minus[0].real()) +
               ", " + phasekit::format_number(es.v_minus[1].real()) + "]\n";
        emit(out, "");
      }
    } else if (*probe_cmd) {
      const phasekit::NoiseSpec<double> noise{probe_noise.resolve()};
      const auto rho = phasekit::shifted_state(probe_theta, probe_phi, noise);
      const auto bloch = phasekit::bloch_from_density(rho);
      const double purity = (rho * rho).trace().real();
      if (probe_format == "json") {
        nlohmann::json out{
            {"rho",
             {{"00", {rho(0, 0).real(), rho(0, 0).imag()}},
              {"01", {rho(0, 1).real(), rho(0, 1).imag()}},
              {"10", {rho(1, 0).real(), rho(1, 0).imag()}},
              {"11", {rho(1, 1).real(), rho(1, 1).imag()}}}},
            {"bloch", {bloch.x(), bloch.y(), bloch.z()}},
            {"purity", purity},
            {"theta", probe_theta},
            {"phi", probe_phi},
            {"delta_sq", noise.delta_sq}};
        emit(out.dump(2) + "\n", "");
      } else {
        std::string out;
        out += "rho00  = " + fixed9(rho(0, 0).real()) + "\n";
        out += "rho01  = " + fixed9(rho(0, 1).real()) + " " +
               (rho(0, 1).imag() < 0 ? "- " : "+ ") +
               fixed9(std::abs(rho(0, 1).imag())) + "i\n";
        out += "rho11  = " + fixed9(rho(1, 1).real()) + "\n";
        out += "bloch  = [" + phasekit::format_number(bloch.x()) + ", " +
               phasekit::format_number(bloch.y()) + ", " +
               phasekit::format_number(bloch.z()) + "]\n";
        out += "purity = " + fixed9(purity) + "\n";
        emit(out, "");
      }
    } else if (*fisher_cmd) {
      const phasekit::NoiseSpec<double> noise{fisher_noise.resolve()};
      const phasekit::MeasurementSetting<double> setting{fisher_alpha};
      std::string out = "phi,fisher,sensitivity,crb_classical\n";
      for (double phi : linspace(fisher_lo, fisher_hi, fisher_steps)) {
        const double fisher =
            phasekit::fisher_information(fisher_theta, phi, noise, setting);
        const double sens =
            phasekit::sensitivity(fisher_theta, phi, noise, setting);
        const double bound =
            fisher > 0.0 ? 1.0 / (fisher_n * fisher)
                         : std::numeric_limits<double>::infinity();
        out += phasekit::format_number(phi) + "," +
               phasekit::format_number(fisher) + "," +
               phasekit::format_number(sens) + "," +
               phasekit::format_number(bound) + "\n";
      }
      emit(out, fisher_out);
    } else if (*estimate_cmd) {
      phasekit::CountsFile file = phasekit::load_counts_file(counts_path);
      if (est_alpha_opt->count() > 0) file.alpha = est_alpha;
      if (est_theta_opt->count() > 0) file.theta = est_theta;
      if (est_noise.delta_opt->count() > 0 ||
          est_noise.delta_sq_opt->count() > 0)
        file.delta_sq = est_noise.resolve();

      const phasekit::NoiseSpec<double> noise{file.delta_sq};
      const phasekit::MeasurementSetting<double> setting{file.alpha};
      const phasekit::PhaseWindow window{est_window_lo, est_window_hi};
      const auto inversion = phasekit::invert_counts(file.counts, noise,
                                                     file.theta, setting, window);
      const auto posterior = phasekit::bayes_posterior(
          file.counts, noise, file.theta, setting, est_grid, window);
      const auto bayes = phasekit::bayes_estimate(posterior);

      Eigen::Index mode_index = 0;
      posterior.density.maxCoeff(&mode_index);
      nlohmann::json out{
          {"inversion", estimate_json(inversion)},
          {"bayes", estimate_json(bayes)},
          {"posterior",
           {{"mode", posterior.grid[mode_index]},
            {"grid_size", est_grid},
            {"window", {window.lo, window.hi}}}},
          {"model",
           {{"alpha", file.alpha},
            {"delta_sq", file.delta_sq},
            {"theta", file.theta},
            {"n_plus", file.counts.n_plus},
            {"n_minus", file.counts.n_minus}}}};
      emit(out.dump(2) + "\n", est_out);
    } else if (*sweep_cmd) {
      sweep_config.delta_sq = sweep_noise.resolve();
      const auto grid = linspace(sweep_lo, sweep_hi, sweep_steps);
      const auto result =
          phasekit::sweep(grid, sweep_reps, sweep_config, sweep_threads);
      if (sweep_format == "json")
        emit(phasekit::sweep_json(result).dump(2) + "\n", sweep_out);
      else
        emit(phasekit::sweep_csv(result), sweep_out);
    } else if (*adaptive_cmd) {
      adaptive_config.delta_sq = adaptive_noise.resolve();
      phasekit::RandomStream rng(adaptive_config.seed);
      const auto trace = phasekit::adaptive_run(adaptive_phi, adaptive_steps,
                                                adaptive_config, rng);
      if (adaptive_format == "json")
        emit(phasekit::adaptive_json(trace, adaptive_config, adaptive_phi,
                                     adaptive_steps)
                     .dump(2) +
                 "\n",
             adaptive_out);
      else
        emit(phasekit::adaptive_csv(trace), adaptive_out);
    } else if (*detector_cmd) {
      const auto channels = phasekit::coincidence_counts(detector_spec);
      if (detector_format == "json") {
        nlohmann::json out;
        for (int i = 0; i < 2; ++i) {
          const auto& ch = channels[static_cast<std::size_t>(i)];
          out["channels"].push_back(
              {{"channel", i + 1},
               {"rate_total", ch.total},
               {"rate_signal", ch.signal},
               {"rate_dark", ch.dark},
               {"counts_total", ch.total * detector_spec.acquisition_time},
               {"counts_signal", ch.signal * detector_spec.acquisition_time},
               {"counts_dark", ch.dark * detector_spec.acquisition_time}});
        }
        emit(out.dump(2) + "\n", "");
      } else {
        std::string out;
        for (int i = 0; i < 2; ++i) {
          const auto& ch = channels[static_cast<std::size_t>(i)];
          out += "channel " + std::to_string(i + 1) + ": total " +
                 phasekit::format_number(ch.total) + "/s (signal " +
                 phasekit::format_number(ch.signal) + "/s, dark " +
                 phasekit::format_number(ch.dark) + "/s), per acquisition " +
                 phasekit::format_number(ch.total *
                                         detector_spec.acquisition_time) +
                 "\n";
        }
        emit(out, "");
      }
    }
  } catch (const std::invalid_argument& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  }
  return 0;
}
