#pragma once

// Seeded random states and unitaries for property tests and the self test.
//
// std::mt19937_64 is seeded directly and all variates are derived from its
// raw output with fixed arithmetic (no std::uniform_real_distribution or
// std::normal_distribution, whose streams vary across standard libraries),
// so a given seed produces the same objects on every platform.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pancharatnam/phase.hpp"
#include "pancharatnam/qstate.hpp"

namespace pancharatnam {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // First variate in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * kPi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  Complex gaussian_complex() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-random state on the full space of the shape.
inline StateVector random_state(const HilbertShape& shape, SeededRng& rng) {
  Vector v(shape.total_dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.gaussian_complex();
  return StateVector::normalized(shape, std::move(v));
}

/// Product of independent Haar-random factor states.
inline StateVector random_product_state(const HilbertShape& shape, SeededRng& rng) {
  StateVector state = random_state(HilbertShape({shape.dim(0)}), rng);
  for (int i = 1; i < shape.factor_count(); ++i)
    state = tensor_product(state, random_state(HilbertShape({shape.dim(i)}), rng));
  return StateVector(shape, state.amplitudes());
}

/// Haar-random unitary matrix: QR of a complex Gaussian matrix with the R
/// diagonal phases absorbed into Q.
inline Matrix haar_unitary_matrix(int dim, SeededRng& rng) {
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = rng.gaussian_complex();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0);
  }
  return q;
}

inline Operator haar_unitary(int dim, SeededRng& rng) {
  return Operator(HilbertShape({dim}), haar_unitary_matrix(dim, rng), OperatorKind::unitary);
}

/// Random hermitian operator with Gaussian matrix elements.
inline Operator random_hermitian(int dim, SeededRng& rng) {
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = rng.gaussian_complex();
  Matrix h = 0.5 * (a + a.adjoint());
  return Operator(HilbertShape({dim}), std::move(h), OperatorKind::hermitian);
}

/// One independent Haar unitary per factor of the shape.
inline LocalUnitarySet random_local_unitaries(const HilbertShape& shape, SeededRng& rng) {
  std::vector<Operator> us;
  for (int i = 0; i < shape.factor_count(); ++i) us.push_back(haar_unitary(shape.dim(i), rng));
  return LocalUnitarySet(std::move(us));
}

}  // namespace pancharatnam
