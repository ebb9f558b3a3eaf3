#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <utility>

namespace phasekit {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Matrix2c = Eigen::Matrix<Complex<Scalar>, 2, 2>;

template <typename Scalar>
using Vector2c = Eigen::Matrix<Complex<Scalar>, 2, 1>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Reduce an angle to the principal interval (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar x) {
  Scalar y = std::remainder(x, Scalar(2) * Scalar(pi));
  if (y <= -Scalar(pi)) y += Scalar(2) * Scalar(pi);
  return y;
}

/// Pure-probe preparation angle theta in [0, pi/2]; the associated Bloch
/// vector is (sin 2theta, 0, cos 2theta), so theta = pi/4 is equatorial.
template <typename Scalar = double>
struct ProbeSpec {
  Scalar theta{};
};

/// Phase-diffusion strength. `delta_sq` is the effective noise factor
/// Delta^2; a (gamma, t) pair maps to Delta^2 = gamma*t/2.
template <typename Scalar = double>
struct NoiseSpec {
  Scalar delta_sq{};
  std::optional<std::pair<Scalar, Scalar>> gamma_time{};

  static NoiseSpec from_delta(Scalar delta) { return {delta * delta, {}}; }

  static NoiseSpec from_gamma_time(Scalar gamma, Scalar t) {
    if (gamma < Scalar(0) || t < Scalar(0))
      throw std::invalid_argument("NoiseSpec: gamma and t must be nonnegative");
    return {gamma * t / Scalar(2), std::make_pair(gamma, t)};
  }

  /// Coherence damping factor e^{-Delta^2}.
  Scalar damping() const { return std::exp(-delta_sq); }
};

/// Analyzer angle alpha of the spin observable
/// Theta_alpha = sigma_x cos(alpha) + sigma_y sin(alpha).
template <typename Scalar = double>
struct MeasurementSetting {
  Scalar alpha{};
};

/// Closed phase interval searched by the estimators.
struct PhaseWindow {
  double lo = 0.0;
  double hi = pi;

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double phi) const { return phi >= lo && phi <= hi; }
};

inline void validate(const PhaseWindow& window) {
  if (!(window.lo < window.hi))
    throw std::invalid_argument("PhaseWindow: lo must be less than hi");
  if (window.width() > 2.0 * pi + 1e-12)
    throw std::invalid_argument("PhaseWindow: width must not exceed 2*pi");
}

}  // namespace phasekit
