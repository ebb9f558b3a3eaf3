#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "phasekit/qubit.hpp"
#include "phasekit/types.hpp"

namespace phasekit {

namespace detail {

template <typename Scalar>
void check_theta(Scalar theta, const char* who) {
  if (!(theta >= Scalar(0) && theta <= Scalar(pi) / 2))
    throw std::invalid_argument(std::string(who) +
                                ": theta must lie in [0, pi/2]");
}

}  // namespace detail

/// Spectral data of the dephased probe, plus the auxiliary f/g/Z scalars.
/// Those scalars are diagnostics only; all computation uses the directly
/// diagonalized eigenpairs.
template <typename Scalar = double>
struct Eigensystem {
  Scalar lambda_plus{};
  Scalar lambda_minus{};
  Vector2c<Scalar> v_plus;
  Vector2c<Scalar> v_minus;
  Scalar f{};
  Scalar g_plus{};
  Scalar g_minus{};
  Scalar z_plus{};
  Scalar z_minus{};
};

/// State after preparation, dephasing and the phase shift:
/// diag(cos^2 th, sin^2 th) with off-diagonal e^{-i phi - Delta^2} cos th sin th.
template <typename Scalar>
Matrix2c<Scalar> shifted_state(Scalar theta, Scalar phi,
                               const NoiseSpec<Scalar>& noise) {
  return apply_phase_shift(
      apply_dephasing(make_probe(ProbeSpec<Scalar>{theta}), noise), phi);
}

/// Closed-form diagonalization of the dephased probe:
/// lambda_pm = (1 pm sqrt(cos^2 2th + e^{-2 Delta^2} sin^2 2th))/2.
template <typename Scalar>
Eigensystem<Scalar> eigensystem(Scalar theta, const NoiseSpec<Scalar>& noise) {
  detail::check_theta(theta, "eigensystem");
  if (noise.delta_sq < Scalar(0))
    throw std::invalid_argument("eigensystem: delta_sq must be nonnegative");

  const Scalar c2 = std::cos(2 * theta);
  const Scalar s2 = std::sin(2 * theta);
  const Scalar damp = noise.damping();

  Eigensystem<Scalar> es;
  const Scalar radius = std::hypot(c2, damp * s2);
  es.lambda_plus = Scalar(0.5) * (1 + radius);
  es.lambda_minus = Scalar(0.5) * (1 - radius);

  // rho - 1/2 = (radius/2)(cos chi sigma_z + sin chi sigma_x)
  const Scalar chi = std::atan2(damp * s2, c2);
  const Scalar ch = std::cos(chi / 2);
  const Scalar sh = std::sin(chi / 2);
  es.v_plus << Complex<Scalar>(ch, 0), Complex<Scalar>(sh, 0);
  es.v_minus << Complex<Scalar>(-sh, 0), Complex<Scalar>(ch, 0);

  // auxiliary f/g/Z parametrization, recorded as-is (can leave the real axis
  // or diverge at the poles; never used for computation)
  const Scalar e2 = damp * damp;
  es.f = std::sqrt(e2 + (1 - e2) * std::cos(4 * theta));
  es.g_plus = c2 + es.f / (std::sqrt(Scalar(2)) * s2);
  es.g_minus = c2 - es.f / (std::sqrt(Scalar(2)) * s2);
  es.z_plus = std::sqrt(1 + es.g_plus * es.g_plus);
  es.z_minus = std::sqrt(1 + es.g_minus * es.g_minus);
  return es;
}

/// Quantum Fisher information H = e^{-2 Delta^2} sin^2 2theta, independent
/// of the phase.
template <typename Scalar>
Scalar qfi(Scalar theta, const NoiseSpec<Scalar>& noise) {
  detail::check_theta(theta, "qfi");
  const Scalar s2 = std::sin(2 * theta);
  const Scalar damp = noise.damping();
  return damp * damp * s2 * s2;
}

/// QFI from the spectral decomposition of the shifted state:
/// H = 2 sum_{n != m} (l_n - l_m)^2/(l_n + l_m) |<psi_m| G |psi_n>|^2
/// with generator eigenvalues k = +-1/2.
template <typename Scalar>
Scalar qfi_spectral_at(Scalar theta, Scalar phi,
                       const NoiseSpec<Scalar>& noise) {
  detail::check_theta(theta, "qfi_spectral");
  if (std::sin(2 * theta) == Scalar(0)) return Scalar(0);  // poles carry no coherence

  const Matrix2c<Scalar> rho = shifted_state(theta, phi, noise);
  Eigen::SelfAdjointEigenSolver<Matrix2c<Scalar>> solver(rho);
  const auto& lambda = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  Matrix2c<Scalar> gen = Matrix2c<Scalar>::Zero();
  gen(0, 0) = Complex<Scalar>(Scalar(0.5), 0);
  gen(1, 1) = Complex<Scalar>(Scalar(-0.5), 0);

  Scalar h = 0;
  for (int n = 0; n < 2; ++n) {
    for (int m = 0; m < 2; ++m) {
      if (n == m) continue;
      const Scalar den = lambda[n] + lambda[m];
      if (den <= Scalar(1e-15)) continue;
      const Complex<Scalar> cross =
          (vectors.col(m).adjoint() * gen * vectors.col(n))(0, 0);
      const Scalar diff = lambda[n] - lambda[m];
      h += 2 * diff * diff / den * std::norm(cross);
    }
  }
  return h;
}

template <typename Scalar>
Scalar qfi_spectral(Scalar theta, const NoiseSpec<Scalar>& noise) {
  return qfi_spectral_at(theta, Scalar(0), noise);
}

/// Symmetric logarithmic derivative: the Hermitian solution of
/// d_phi rho = (L rho + rho L)/2, solved in the eigenbasis of rho where
/// L_nm = 2 (d_phi rho)_nm / (lambda_n + lambda_m).
template <typename Scalar>
Matrix2c<Scalar> sld(Scalar theta, Scalar phi, const NoiseSpec<Scalar>& noise) {
  detail::check_theta(theta, "sld");

  const Matrix2c<Scalar> rho = shifted_state(theta, phi, noise);
  // d_phi rho = -i [G, rho] with G = sigma_+ sigma_-
  Matrix2c<Scalar> drho = Matrix2c<Scalar>::Zero();
  drho(0, 1) = Complex<Scalar>(0, -1) * rho(0, 1);
  drho(1, 0) = Complex<Scalar>(0, 1) * rho(1, 0);

  Eigen::SelfAdjointEigenSolver<Matrix2c<Scalar>> solver(rho);
  const auto& lambda = solver.eigenvalues();
  const Matrix2c<Scalar>& vectors = solver.eigenvectors();

  const Matrix2c<Scalar> dr_eig = vectors.adjoint() * drho * vectors;
  Matrix2c<Scalar> l_eig = Matrix2c<Scalar>::Zero();
  for (int n = 0; n < 2; ++n) {
    for (int m = 0; m < 2; ++m) {
      const Scalar den = lambda[n] + lambda[m];
      if (den <= Scalar(1e-12)) {
        if (std::abs(dr_eig(n, m)) > Scalar(1e-9))
          throw std::runtime_error(
              "sld: state degenerate along the derivative direction");
        continue;
      }
      l_eig(n, m) = Scalar(2) * dr_eig(n, m) / den;
    }
  }
  const Matrix2c<Scalar> l = vectors * l_eig * vectors.adjoint();
  return Scalar(0.5) * (l + l.adjoint().eval());
}

/// Optimal quantum estimator O = phi 1 + L/H; satisfies Tr[rho O] = phi and
/// Tr[rho (O - phi)^2] = 1/H.
template <typename Scalar>
Matrix2c<Scalar> optimal_estimator(Scalar theta, Scalar phi,
                                   const NoiseSpec<Scalar>& noise) {
  const Scalar h = qfi(theta, noise);
  if (h <= Scalar(0))
    throw std::invalid_argument(
        "optimal_estimator: QFI vanishes for this probe");
  return phi * Matrix2c<Scalar>::Identity() + sld(theta, phi, noise) / h;
}

/// Spin observable Theta_alpha = sigma_x cos(alpha) + sigma_y sin(alpha);
/// Hermitian, traceless, squares to the identity.
template <typename Scalar>
Matrix2c<Scalar> spin_observable(const MeasurementSetting<Scalar>& setting) {
  Matrix2c<Scalar> m = Matrix2c<Scalar>::Zero();
  m(0, 1) = std::polar(Scalar(1), -setting.alpha);
  m(1, 0) = std::polar(Scalar(1), setting.alpha);
  return m;
}

template <typename Scalar = double>
struct OutcomeProbabilities {
  Scalar p_plus{};
  Scalar p_minus{};
};

/// Outcome probabilities of the spin measurement Theta_alpha:
/// p_pm = (1 pm e^{-Delta^2} cos(alpha - phi) sin 2theta)/2.
template <typename Scalar>
OutcomeProbabilities<Scalar> outcome_probabilities(
    Scalar theta, Scalar phi, const NoiseSpec<Scalar>& noise,
    const MeasurementSetting<Scalar>& setting) {
  detail::check_theta(theta, "outcome_probabilities");
  const Scalar delta = wrap_angle(setting.alpha - phi);
  const Scalar contrast =
      noise.damping() * std::cos(delta) * std::sin(2 * theta);
  Scalar p_plus = Scalar(0.5) * (1 + contrast);
  if (p_plus < Scalar(0)) p_plus = Scalar(0);
  if (p_plus > Scalar(1)) p_plus = Scalar(1);
  return {p_plus, Scalar(1) - p_plus};
}

/// <Theta_alpha> = p_plus - p_minus = e^{-Delta^2} cos(alpha - phi) sin 2theta.
template <typename Scalar>
Scalar expectation(Scalar theta, Scalar phi, const NoiseSpec<Scalar>& noise,
                   const MeasurementSetting<Scalar>& setting) {
  const auto p = outcome_probabilities(theta, phi, noise, setting);
  return p.p_plus - p.p_minus;
}

/// Fisher information of the spin measurement, written as
///   F = a / (a + b),  a = (e^{-Delta^2} sin 2theta)^2 sin^2 delta,
///                     b = 1 - (e^{-Delta^2} sin 2theta)^2,
/// which keeps the removable 0/0 point (Delta^2 = 0, theta = pi/4,
/// delta = k pi) stable; the continuity value 1 is returned there.
template <typename Scalar>
Scalar fisher_information(Scalar theta, Scalar phi,
                          const NoiseSpec<Scalar>& noise,
                          const MeasurementSetting<Scalar>& setting) {
  detail::check_theta(theta, "fisher_information");
  const Scalar delta = wrap_angle(setting.alpha - phi);
  const Scalar ds2 = noise.damping() * std::sin(2 * theta);
  const Scalar sd = std::sin(delta);
  const Scalar a = ds2 * ds2 * sd * sd;
  Scalar b = 1 - ds2 * ds2;
  if (b < Scalar(0)) b = Scalar(0);
  if (a + b == Scalar(0)) return Scalar(1);
  return a / (a + b);
}

/// Squared sensitivity S = Var[Theta]/(d_phi <Theta>)^2 = 1/F; returns
/// +infinity where the slope vanishes.
template <typename Scalar>
Scalar sensitivity(Scalar theta, Scalar phi, const NoiseSpec<Scalar>& noise,
                   const MeasurementSetting<Scalar>& setting) {
  detail::check_theta(theta, "sensitivity");
  const Scalar delta = wrap_angle(setting.alpha - phi);
  const Scalar mean = expectation(theta, phi, noise, setting);
  const Scalar slope = noise.damping() * std::sin(2 * theta) * std::sin(delta);
  if (slope == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return (1 - mean * mean) / (slope * slope);
}

enum class VarianceKind { classical, quantum };

/// Cramer-Rao bound 1/(N F) or 1/(N H) for N effective measurements.
template <typename Scalar>
Scalar cramer_rao(VarianceKind kind, Scalar theta, Scalar phi,
                  const NoiseSpec<Scalar>& noise,
                  const MeasurementSetting<Scalar>& setting,
                  Scalar n_measurements) {
  if (!(n_measurements > Scalar(0)))
    throw std::invalid_argument("cramer_rao: n_measurements must be positive");
  const Scalar info = kind == VarianceKind::quantum
                          ? qfi(theta, noise)
                          : fisher_information(theta, phi, noise, setting);
  if (info <= Scalar(0))
    throw std::runtime_error("cramer_rao: information quantity vanishes");
  return Scalar(1) / (n_measurements * info);
}

}  // namespace phasekit
