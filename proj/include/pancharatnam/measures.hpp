#pragma once

// Entanglement measures used to cross-check the deficit witness.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pancharatnam/qstate.hpp"

namespace pancharatnam {

inline constexpr double kEntropyEigenClip = 1e-10;

/// Von Neumann entropy -Tr[rho ln rho] in nats. Eigenvalues within
/// kEntropyEigenClip of zero are treated as exact zeros.
inline double entanglement_entropy(const Operator& rho) {
  if (rho.kind() != OperatorKind::density)
    throw std::invalid_argument("entanglement_entropy: operator is not tagged density");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.entries(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double p = solver.eigenvalues()(i);
    if (p <= kEntropyEigenClip) continue;
    s -= p * std::log(p);
  }
  return s;
}

/// Wootters concurrence of a two-qubit density operator:
/// C = max{0, mu_1 - mu_2 - mu_3 - mu_4} with mu_i the descending square
/// roots of the eigenvalues of rho (sigma_y x sigma_y) rho* (sigma_y x sigma_y).
inline double wootters_concurrence(const Operator& rho) {
  if (rho.kind() != OperatorKind::density)
    throw std::invalid_argument("wootters_concurrence: operator is not tagged density");
  if (rho.shape().total_dim() != 4)
    throw std::invalid_argument("wootters_concurrence: operator is not two-qubit sized");

  const Matrix yy = Eigen::kroneckerProduct(sigma_y().entries(), sigma_y().entries());
  const Matrix r = rho.entries() * yy * rho.entries().conjugate() * yy;

  Eigen::ComplexEigenSolver<Matrix> solver(r, false);
  std::vector<double> mu;
  for (Eigen::Index i = 0; i < 4; ++i)
    mu.push_back(std::sqrt(std::max(0.0, solver.eigenvalues()(i).real())));
  std::sort(mu.begin(), mu.end(), std::greater<double>());
  return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

}  // namespace pancharatnam
