#pragma once

#include <cmath>
#include <stdexcept>

#include "phasekit/quadrature.hpp"
#include "phasekit/types.hpp"

namespace phasekit {

template <typename Scalar = double>
Matrix2c<Scalar> pauli_x() {
  Matrix2c<Scalar> m;
  m << Complex<Scalar>(0, 0), Complex<Scalar>(1, 0),
       Complex<Scalar>(1, 0), Complex<Scalar>(0, 0);
  return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> pauli_y() {
  Matrix2c<Scalar> m;
  m << Complex<Scalar>(0, 0), Complex<Scalar>(0, -1),
       Complex<Scalar>(0, 1), Complex<Scalar>(0, 0);
  return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> pauli_z() {
  Matrix2c<Scalar> m;
  m << Complex<Scalar>(1, 0), Complex<Scalar>(0, 0),
       Complex<Scalar>(0, 0), Complex<Scalar>(-1, 0);
  return m;
}

/// rho = (1 + r.sigma)/2. Basis convention: index 0 = |+1/2> (H),
/// index 1 = |-1/2> (V).
template <typename Scalar>
Matrix2c<Scalar> density_from_bloch(const Vector3<Scalar>& r) {
  Matrix2c<Scalar> rho;
  rho(0, 0) = Complex<Scalar>(Scalar(0.5) * (1 + r.z()), 0);
  rho(1, 1) = Complex<Scalar>(Scalar(0.5) * (1 - r.z()), 0);
  rho(0, 1) = Scalar(0.5) * Complex<Scalar>(r.x(), -r.y());
  rho(1, 0) = Scalar(0.5) * Complex<Scalar>(r.x(), r.y());
  return rho;
}

template <typename Scalar>
Vector3<Scalar> bloch_from_density(const Matrix2c<Scalar>& rho) {
  return Vector3<Scalar>(Scalar(2) * rho(0, 1).real(),
                         -Scalar(2) * rho(0, 1).imag(),
                         rho(0, 0).real() - rho(1, 1).real());
}

template <typename Scalar>
bool is_valid_density(const Matrix2c<Scalar>& rho, Scalar tol = Scalar(1e-12)) {
  if (std::abs(rho(0, 0).imag()) > tol || std::abs(rho(1, 1).imag()) > tol)
    return false;
  if (std::abs(rho(1, 0) - std::conj(rho(0, 1))) > tol) return false;
  if (std::abs(rho(0, 0).real() + rho(1, 1).real() - Scalar(1)) > tol)
    return false;
  const Scalar det =
      rho(0, 0).real() * rho(1, 1).real() - std::norm(rho(0, 1));
  return det >= -tol;
}

/// Pure state (1 + r.sigma)/2 with r = (sin 2theta, 0, cos 2theta).
template <typename Scalar>
Matrix2c<Scalar> make_probe(const ProbeSpec<Scalar>& spec) {
  if (!(spec.theta >= Scalar(0) && spec.theta <= Scalar(pi) / 2))
    throw std::invalid_argument("make_probe: theta must lie in [0, pi/2]");
  Vector3<Scalar> r(std::sin(2 * spec.theta), Scalar(0),
                    std::cos(2 * spec.theta));
  return density_from_bloch(r);
}

/// U_phi rho U_phi^dag with U_phi = exp(-i phi sigma_+ sigma_-), i.e.
/// rho01 -> e^{-i phi} rho01 with the diagonal untouched.
template <typename Scalar>
Matrix2c<Scalar> apply_phase_shift(const Matrix2c<Scalar>& rho, Scalar phi) {
  const Complex<Scalar> u = std::polar(Scalar(1), -phi);
  Matrix2c<Scalar> out = rho;
  out(0, 1) *= u;
  out(1, 0) *= std::conj(u);
  return out;
}

/// Phase-diffusion channel: off-diagonals damped by e^{-Delta^2},
/// populations untouched.
template <typename Scalar>
Matrix2c<Scalar> apply_dephasing(const Matrix2c<Scalar>& rho,
                                 const NoiseSpec<Scalar>& noise) {
  if (noise.delta_sq < Scalar(0))
    throw std::invalid_argument("apply_dephasing: delta_sq must be nonnegative");
  const Scalar damp = noise.damping();
  Matrix2c<Scalar> out = rho;
  out(0, 1) *= damp;
  out(1, 0) *= damp;
  return out;
}

/// Fixed-step RK4 integration of rho' = gamma L[sigma_+ sigma_-] rho.
/// Matches apply_dephasing with Delta^2 = gamma*t/2 up to O(steps^-4).
template <typename Scalar>
Matrix2c<Scalar> evolve_master_equation(const Matrix2c<Scalar>& rho,
                                        Scalar gamma, Scalar t, int steps) {
  if (gamma < Scalar(0) || t < Scalar(0))
    throw std::invalid_argument(
        "evolve_master_equation: gamma and t must be nonnegative");
  if (steps < 1)
    throw std::invalid_argument("evolve_master_equation: steps must be >= 1");

  Matrix2c<Scalar> proj = Matrix2c<Scalar>::Zero();
  proj(0, 0) = Complex<Scalar>(1, 0);  // sigma_+ sigma_-

  const auto rhs = [&](const Matrix2c<Scalar>& m) -> Matrix2c<Scalar> {
    return gamma * (proj * m * proj - Scalar(0.5) * (proj * m + m * proj));
  };

  const Scalar h = t / Scalar(steps);
  Matrix2c<Scalar> state = rho;
  for (int i = 0; i < steps; ++i) {
    const Matrix2c<Scalar> k1 = rhs(state);
    const Matrix2c<Scalar> k2 = rhs(state + (h / 2) * k1);
    const Matrix2c<Scalar> k3 = rhs(state + (h / 2) * k2);
    const Matrix2c<Scalar> k4 = rhs(state + h * k3);
    state += (h / 6) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
  }
  return state;
}

/// Gaussian average of phase-shifted states,
///   integral dphi N(phi; center, 2 Delta^2) U_phi rho U_phi^dag,
/// by Gauss-Hermite quadrature. The kick variance 2 Delta^2 makes
/// E[e^{-i phi}] = e^{-Delta^2} e^{-i center}, matching apply_dephasing.
template <typename Scalar>
Matrix2c<Scalar> gaussian_phase_average(const Matrix2c<Scalar>& rho,
                                        Scalar center_phi,
                                        const NoiseSpec<Scalar>& noise,
                                        int quad_points) {
  if (quad_points < 3)
    throw std::invalid_argument("gaussian_phase_average: need >= 3 nodes");
  if (noise.delta_sq < Scalar(0))
    throw std::invalid_argument(
        "gaussian_phase_average: delta_sq must be nonnegative");

  const auto [nodes, weights] = gauss_hermite<Scalar>(quad_points);
  // phi = center + 2 Delta x maps the kernel onto the e^{-x^2} weight
  const Scalar scale = 2 * std::sqrt(noise.delta_sq);
  const Scalar inv_sqrt_pi = Scalar(1) / std::sqrt(Scalar(pi));

  Matrix2c<Scalar> acc = Matrix2c<Scalar>::Zero();
  for (int i = 0; i < quad_points; ++i) {
    const Scalar phi = center_phi + scale * nodes[i];
    acc += (weights[i] * inv_sqrt_pi) * apply_phase_shift(rho, phi);
  }
  return acc;
}

}  // namespace phasekit
