#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

#include "phasekit/types.hpp"

namespace phasekit {

/// Gauss-Hermite nodes and weights for the weight function e^{-x^2},
/// computed with the Golub-Welsch eigenvalue method on the Jacobi matrix
/// of the Hermite recurrence.
template <typename Scalar = double>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>,
          Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>
gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need at least one node");
  using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  MatrixX jacobi = MatrixX::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const Scalar off = std::sqrt(Scalar(k) / Scalar(2));
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }

  Eigen::SelfAdjointEigenSolver<MatrixX> solver(jacobi);
  VectorX nodes = solver.eigenvalues();
  VectorX weights(n);
  const Scalar mu0 = std::sqrt(Scalar(pi));  // zeroth moment of e^{-x^2}
  for (int i = 0; i < n; ++i) {
    const Scalar first = solver.eigenvectors()(0, i);
    weights[i] = mu0 * first * first;
  }
  return {std::move(nodes), std::move(weights)};
}

}  // namespace phasekit
