#pragma once

// Dense complex linear algebra for finite-dimensional multipartite quantum
// states: construction, composition, reduction, Schmidt decomposition, and
// the unitary families used by the scenario builders.
//
// Index convention (shared by every module): a basis state of a factorized
// space with dimensions [d_0, d_1, ..., d_{K-1}] is addressed by
//   flat = s_0 * (d_1 * d_2 * ... ) + s_1 * (d_2 * ... ) + ... + s_{K-1},
// i.e. the leftmost factor is the slowest index. For qubit registers this is
// the usual binary reading of |s_0 s_1 ... s_{K-1}> with s_0 most
// significant. Tensor products follow the same convention (left operand
// slow), which is exactly the Kronecker product layout.
//
// Subsystem indices are 0-based throughout.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pancharatnam {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;

// Construction-time tolerances.
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kDensityTraceTolerance = 1e-12;
inline constexpr double kDensityEigenFloor = -1e-10;
inline constexpr double kSchmidtZeroClip = 1e-12;

/// Ordered list of subsystem dimensions of a factorized Hilbert space.
class HilbertShape {
 public:
  explicit HilbertShape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("HilbertShape: empty dimension list");
    for (int d : dims_)
      if (d < 1) throw std::invalid_argument("HilbertShape: factor dimension < 1");
  }

  const std::vector<int>& dims() const { return dims_; }
  int factor_count() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
  std::ptrdiff_t total_dim() const {
    std::ptrdiff_t t = 1;
    for (int d : dims_) t *= d;
    return t;
  }

  bool operator==(const HilbertShape& other) const { return dims_ == other.dims_; }
  bool operator!=(const HilbertShape& other) const { return !(*this == other); }

 private:
  std::vector<int> dims_;
};

namespace detail {

/// Flat-index stride of each subsystem (leftmost slowest).
inline std::vector<std::ptrdiff_t> index_strides(const std::vector<int>& dims) {
  std::vector<std::ptrdiff_t> strides(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    strides[static_cast<std::size_t>(i)] =
        strides[static_cast<std::size_t>(i) + 1] * dims[static_cast<std::size_t>(i) + 1];
  return strides;
}

/// Flat offsets contributed by every joint value of the chosen subsystems,
/// enumerated with the first listed subsystem slowest.
inline std::vector<std::ptrdiff_t> subindex_offsets(const std::vector<int>& dims,
                                                    const std::vector<int>& subs) {
  const auto strides = index_strides(dims);
  std::ptrdiff_t count = 1;
  for (int i : subs) count *= dims[static_cast<std::size_t>(i)];
  std::vector<std::ptrdiff_t> offsets(static_cast<std::size_t>(count), 0);
  for (std::ptrdiff_t j = 0; j < count; ++j) {
    std::ptrdiff_t rem = j;
    std::ptrdiff_t acc = 0;
    for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
      const std::ptrdiff_t d = dims[static_cast<std::size_t>(*it)];
      acc += (rem % d) * strides[static_cast<std::size_t>(*it)];
      rem /= d;
    }
    offsets[static_cast<std::size_t>(j)] = acc;
  }
  return offsets;
}

inline void check_subsystem_indices(const HilbertShape& shape, const std::vector<int>& subs,
                                    const char* what) {
  if (subs.empty()) throw std::invalid_argument(std::string(what) + ": empty subsystem set");
  std::vector<int> sorted = subs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument(std::string(what) + ": repeated subsystem index");
  if (sorted.front() < 0 || sorted.back() >= shape.factor_count())
    throw std::out_of_range(std::string(what) + ": subsystem index out of range");
}

}  // namespace detail

/// Normalized pure state over a factorized Hilbert space.
class StateVector {
 public:
  StateVector(HilbertShape shape, Vector amplitudes)
      : shape_(std::move(shape)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != shape_.total_dim())
      throw std::invalid_argument("StateVector: amplitude count does not match shape");
    if (std::abs(amplitudes_.norm() - 1.0) > kNormTolerance)
      throw std::invalid_argument("StateVector: amplitudes are not normalized");
  }

  /// Builds a state from arbitrary amplitudes, rescaling to unit norm.
  static StateVector normalized(HilbertShape shape, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (n <= 0.0) throw std::invalid_argument("StateVector: zero vector cannot be normalized");
    return StateVector(std::move(shape), amplitudes / n);
  }

  /// Computational basis state |index> on the given shape.
  static StateVector basis(HilbertShape shape, std::ptrdiff_t index) {
    Vector v = Vector::Zero(shape.total_dim());
    v(index) = 1.0;
    return StateVector(std::move(shape), std::move(v));
  }

  const HilbertShape& shape() const { return shape_; }
  const Vector& amplitudes() const { return amplitudes_; }

 private:
  HilbertShape shape_;
  Vector amplitudes_;
};

enum class OperatorKind { general, unitary, hermitian, density };

/// Square operator on a factorized Hilbert space, tagged with the structural
/// property it is required to satisfy. The tag is verified at construction.
class Operator {
 public:
  Operator(HilbertShape shape, Matrix entries, OperatorKind kind)
      : shape_(std::move(shape)), entries_(std::move(entries)), kind_(kind) {
    const std::ptrdiff_t d = shape_.total_dim();
    if (entries_.rows() != d || entries_.cols() != d)
      throw std::invalid_argument("Operator: matrix side does not match shape");
    verify_kind();
  }

  static Operator identity(HilbertShape shape, OperatorKind kind = OperatorKind::unitary) {
    const std::ptrdiff_t d = shape.total_dim();
    return Operator(std::move(shape), Matrix::Identity(d, d), kind);
  }

  const HilbertShape& shape() const { return shape_; }
  const Matrix& entries() const { return entries_; }
  OperatorKind kind() const { return kind_; }

 private:
  void verify_kind() const {
    switch (kind_) {
      case OperatorKind::general:
        return;
      case OperatorKind::unitary: {
        const Matrix gram = entries_.adjoint() * entries_;
        const std::ptrdiff_t d = entries_.rows();
        const double dev = (gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
        if (dev > kUnitaryTolerance)
          throw std::invalid_argument("Operator: unitary tag violated");
        return;
      }
      case OperatorKind::hermitian: {
        const double dev = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
        if (dev > kHermitianTolerance)
          throw std::invalid_argument("Operator: hermitian tag violated");
        return;
      }
      case OperatorKind::density: {
        const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > kHermitianTolerance)
          throw std::invalid_argument("Operator: density operator is not hermitian");
        if (std::abs(entries_.trace().real() - 1.0) > kDensityTraceTolerance ||
            std::abs(entries_.trace().imag()) > kDensityTraceTolerance)
          throw std::invalid_argument("Operator: density operator trace differs from 1");
        Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < kDensityEigenFloor)
          throw std::invalid_argument("Operator: density operator has a negative eigenvalue");
        return;
      }
    }
  }

  HilbertShape shape_;
  Matrix entries_;
  OperatorKind kind_;
};

/// Descending Schmidt coefficients with the matching orthonormal bases.
/// The state they came from is sum_n sqrt(lambda_n) |a_n>|b_n>.
class SchmidtForm {
 public:
  SchmidtForm(Eigen::VectorXd coefficients, Matrix basis_a, Matrix basis_b)
      : coefficients_(std::move(coefficients)),
        basis_a_(std::move(basis_a)),
        basis_b_(std::move(basis_b)) {
    const auto r = coefficients_.size();
    if (basis_a_.cols() != r || basis_b_.cols() != r)
      throw std::invalid_argument("SchmidtForm: basis column count mismatch");
    for (Eigen::Index n = 0; n + 1 < r; ++n)
      if (coefficients_(n) < coefficients_(n + 1))
        throw std::invalid_argument("SchmidtForm: coefficients not in descending order");
    if (coefficients_.minCoeff() < 0.0)
      throw std::invalid_argument("SchmidtForm: negative coefficient");
    if (std::abs(coefficients_.sum() - 1.0) > 1e-10)
      throw std::invalid_argument("SchmidtForm: coefficients do not sum to 1");
  }

  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const Matrix& basis_a() const { return basis_a_; }
  const Matrix& basis_b() const { return basis_b_; }

  /// Rebuilds the bipartite state sum_n sqrt(lambda_n) |a_n>|b_n> on the
  /// two-factor shape [dim A, dim B].
  StateVector assemble() const {
    const auto da = basis_a_.rows();
    const auto db = basis_b_.rows();
    Vector amps = Vector::Zero(da * db);
    for (Eigen::Index n = 0; n < coefficients_.size(); ++n) {
      if (coefficients_(n) == 0.0) continue;
      const double w = std::sqrt(coefficients_(n));
      for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < db; ++j)
          amps(i * db + j) += w * basis_a_(i, n) * basis_b_(j, n);
    }
    return StateVector::normalized(HilbertShape({static_cast<int>(da), static_cast<int>(db)}),
                                   std::move(amps));
  }

 private:
  Eigen::VectorXd coefficients_;
  Matrix basis_a_;
  Matrix basis_b_;
};

/// Fock-space truncation: keep number states 0..n_max; tail_bound is the
/// guaranteed bound on the probability mass discarded by the cut.
struct FockSpec {
  int n_max = 0;
  double tail_bound = 0.0;

  FockSpec(int n_max_, double tail_bound_) : n_max(n_max_), tail_bound(tail_bound_) {
    if (n_max < 0) throw std::invalid_argument("FockSpec: n_max < 0");
    if (!(tail_bound >= 0.0 && tail_bound < 1.0))
      throw std::invalid_argument("FockSpec: tail_bound outside [0, 1)");
  }
};

// ---------------------------------------------------------------------------
// Composition and reduction
// ---------------------------------------------------------------------------

inline StateVector tensor_product(const StateVector& a, const StateVector& b) {
  std::vector<int> dims = a.shape().dims();
  const auto& db = b.shape().dims();
  dims.insert(dims.end(), db.begin(), db.end());
  Vector amps = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
  return StateVector(HilbertShape(std::move(dims)), std::move(amps));
}

namespace detail {
inline OperatorKind combined_kind(OperatorKind a, OperatorKind b) {
  if (a == OperatorKind::unitary && b == OperatorKind::unitary) return OperatorKind::unitary;
  if (a == OperatorKind::density && b == OperatorKind::density) return OperatorKind::density;
  const bool ah = a == OperatorKind::hermitian || a == OperatorKind::density;
  const bool bh = b == OperatorKind::hermitian || b == OperatorKind::density;
  if (ah && bh) return OperatorKind::hermitian;
  return OperatorKind::general;
}
}  // namespace detail

inline Operator tensor_product(const Operator& a, const Operator& b) {
  std::vector<int> dims = a.shape().dims();
  const auto& db = b.shape().dims();
  dims.insert(dims.end(), db.begin(), db.end());
  Matrix entries = Eigen::kroneckerProduct(a.entries(), b.entries());
  return Operator(HilbertShape(std::move(dims)), std::move(entries),
                  detail::combined_kind(a.kind(), b.kind()));
}

/// Sum of operators on the same space. Hermitian-likes stay hermitian;
/// everything else degrades to general.
inline Operator operator+(const Operator& a, const Operator& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("Operator+: shape mismatch");
  const bool ah = a.kind() == OperatorKind::hermitian || a.kind() == OperatorKind::density;
  const bool bh = b.kind() == OperatorKind::hermitian || b.kind() == OperatorKind::density;
  return Operator(a.shape(), a.entries() + b.entries(),
                  ah && bh ? OperatorKind::hermitian : OperatorKind::general);
}

/// Reduced density operator of a density operator, keeping the listed
/// subsystems (original order preserved).
inline Operator partial_trace(const Operator& rho, const std::vector<int>& keep) {
  if (rho.kind() != OperatorKind::density)
    throw std::invalid_argument("partial_trace: operator is not tagged density");
  detail::check_subsystem_indices(rho.shape(), keep, "partial_trace");

  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  const auto& dims = rho.shape().dims();
  std::vector<int> rest;
  for (int i = 0; i < rho.shape().factor_count(); ++i)
    if (!std::binary_search(kept.begin(), kept.end(), i)) rest.push_back(i);

  const auto off_keep = detail::subindex_offsets(dims, kept);
  std::vector<std::ptrdiff_t> off_rest =
      rest.empty() ? std::vector<std::ptrdiff_t>{0} : detail::subindex_offsets(dims, rest);

  const auto dk = static_cast<std::ptrdiff_t>(off_keep.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (std::ptrdiff_t a = 0; a < dk; ++a)
    for (std::ptrdiff_t b = 0; b < dk; ++b) {
      Complex sum = 0.0;
      for (const std::ptrdiff_t t : off_rest)
        sum += rho.entries()(off_keep[static_cast<std::size_t>(a)] + t,
                             off_keep[static_cast<std::size_t>(b)] + t);
      out(a, b) = sum;
    }

  std::vector<int> kept_dims;
  for (int i : kept) kept_dims.push_back(dims[static_cast<std::size_t>(i)]);
  return Operator(HilbertShape(std::move(kept_dims)), std::move(out), OperatorKind::density);
}

/// Reduced density operator of a pure state, computed without materializing
/// the full outer product.
inline Operator reduced_density(const StateVector& psi, const std::vector<int>& keep) {
  detail::check_subsystem_indices(psi.shape(), keep, "reduced_density");
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  const auto& dims = psi.shape().dims();
  std::vector<int> rest;
  for (int i = 0; i < psi.shape().factor_count(); ++i)
    if (!std::binary_search(kept.begin(), kept.end(), i)) rest.push_back(i);

  const auto off_keep = detail::subindex_offsets(dims, kept);
  std::vector<std::ptrdiff_t> off_rest =
      rest.empty() ? std::vector<std::ptrdiff_t>{0} : detail::subindex_offsets(dims, rest);

  const auto dk = static_cast<std::ptrdiff_t>(off_keep.size());
  const auto dr = static_cast<std::ptrdiff_t>(off_rest.size());
  Matrix m(dk, dr);
  for (std::ptrdiff_t a = 0; a < dk; ++a)
    for (std::ptrdiff_t t = 0; t < dr; ++t)
      m(a, t) = psi.amplitudes()(off_keep[static_cast<std::size_t>(a)] +
                                 off_rest[static_cast<std::size_t>(t)]);
  Matrix out = m * m.adjoint();

  std::vector<int> kept_dims;
  for (int i : kept) kept_dims.push_back(dims[static_cast<std::size_t>(i)]);
  return Operator(HilbertShape(std::move(kept_dims)), std::move(out), OperatorKind::density);
}

/// Applies an operator to a single tensor factor of a state.
inline StateVector apply_to_factor(const StateVector& state, const Operator& op, int factor) {
  const auto& dims = state.shape().dims();
  if (factor < 0 || factor >= state.shape().factor_count())
    throw std::out_of_range("apply_to_factor: factor index out of range");
  const std::ptrdiff_t d = dims[static_cast<std::size_t>(factor)];
  if (op.shape().total_dim() != d)
    throw std::invalid_argument("apply_to_factor: operator dimension mismatch");

  std::ptrdiff_t left = 1, right = 1;
  for (int j = 0; j < factor; ++j) left *= dims[static_cast<std::size_t>(j)];
  for (int j = factor + 1; j < state.shape().factor_count(); ++j)
    right *= dims[static_cast<std::size_t>(j)];

  const Vector& in = state.amplitudes();
  Vector out(in.size());
  using StridedConst = Eigen::Map<const Vector, 0, Eigen::InnerStride<>>;
  using Strided = Eigen::Map<Vector, 0, Eigen::InnerStride<>>;
  for (std::ptrdiff_t l = 0; l < left; ++l)
    for (std::ptrdiff_t r = 0; r < right; ++r) {
      StridedConst vin(in.data() + l * d * right + r, d, Eigen::InnerStride<>(right));
      Strided vout(out.data() + l * d * right + r, d, Eigen::InnerStride<>(right));
      vout = op.entries() * vin;
    }
  return StateVector(state.shape(), std::move(out));
}

// ---------------------------------------------------------------------------
// Schmidt decomposition
// ---------------------------------------------------------------------------

/// Schmidt decomposition across the bipartition (side_a | complement).
/// Coefficients are the squared singular values of the amplitude matrix,
/// descending, with values below kSchmidtZeroClip reported as exact zeros.
inline SchmidtForm schmidt_decompose(const StateVector& psi, const std::vector<int>& side_a) {
  detail::check_subsystem_indices(psi.shape(), side_a, "schmidt_decompose");
  if (static_cast<int>(side_a.size()) >= psi.shape().factor_count())
    throw std::invalid_argument("schmidt_decompose: degenerate cut, one side is empty");

  std::vector<int> a_sorted = side_a;
  std::sort(a_sorted.begin(), a_sorted.end());
  const auto& dims = psi.shape().dims();
  std::vector<int> b_side;
  for (int i = 0; i < psi.shape().factor_count(); ++i)
    if (!std::binary_search(a_sorted.begin(), a_sorted.end(), i)) b_side.push_back(i);

  const auto off_a = detail::subindex_offsets(dims, a_sorted);
  const auto off_b = detail::subindex_offsets(dims, b_side);
  const auto da = static_cast<std::ptrdiff_t>(off_a.size());
  const auto db = static_cast<std::ptrdiff_t>(off_b.size());

  Matrix m(da, db);
  for (std::ptrdiff_t i = 0; i < da; ++i)
    for (std::ptrdiff_t j = 0; j < db; ++j)
      m(i, j) = psi.amplitudes()(off_a[static_cast<std::size_t>(i)] +
                                 off_b[static_cast<std::size_t>(j)]);

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd lambdas = svd.singularValues().array().square();
  for (Eigen::Index n = 0; n < lambdas.size(); ++n)
    if (lambdas(n) <= kSchmidtZeroClip) lambdas(n) = 0.0;

  return SchmidtForm(std::move(lambdas), svd.matrixU(), svd.matrixV().conjugate());
}

// ---------------------------------------------------------------------------
// Fock-space states and the scenario unitaries
// ---------------------------------------------------------------------------

/// Probability mass a Poisson(mean) distribution places above n_max.
inline double poisson_tail(double mean, int n_max) {
  if (mean < 0.0) throw std::invalid_argument("poisson_tail: negative mean");
  if (mean == 0.0) return 0.0;
  // Sum upward from n_max+1; terms decay geometrically once n > mean.
  int n = n_max + 1;
  double log_p = -mean + n * std::log(mean) - std::lgamma(static_cast<double>(n) + 1.0);
  double p = std::exp(log_p);
  double sum = 0.0;
  for (int iter = 0; iter < 1000000; ++iter) {
    sum += p;
    ++n;
    p *= mean / n;
    if (n > mean && p < sum * 1e-18 + 1e-320) break;
  }
  return sum;
}

/// Truncated coherent state |alpha> on number states 0..n_max, renormalized
/// after the cut. The discarded probability is poisson_tail(|alpha|^2, n_max).
inline StateVector coherent_state(Complex alpha, const FockSpec& spec) {
  Vector amps(spec.n_max + 1);
  Complex c = std::exp(-0.5 * std::norm(alpha));
  amps(0) = c;
  for (int n = 1; n <= spec.n_max; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    amps(n) = c;
  }
  return StateVector::normalized(HilbertShape({spec.n_max + 1}), std::move(amps));
}

/// Number-operator phase rotation exp(-i theta N): diagonal with entries
/// exp(-i theta n), n = 0..n_max.
inline Operator number_phase_unitary(double theta, const FockSpec& spec) {
  const int d = spec.n_max + 1;
  Matrix m = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n) m(n, n) = std::exp(Complex(0.0, -theta * n));
  return Operator(HilbertShape({d}), std::move(m), OperatorKind::unitary);
}

/// exp(-i g |phi><phi|) = (I - P) + exp(-i g) P with P = |phi><phi|.
inline Operator projector_phase_unitary(const StateVector& phi_vec, double g) {
  const Vector& v = phi_vec.amplitudes();
  const std::ptrdiff_t d = v.size();
  Matrix m = Matrix::Identity(d, d) + (std::exp(Complex(0.0, -g)) - 1.0) * (v * v.adjoint());
  return Operator(phi_vec.shape(), std::move(m), OperatorKind::unitary);
}

inline Operator sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return Operator(HilbertShape({2}), std::move(m), OperatorKind::unitary);
}

inline Operator sigma_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return Operator(HilbertShape({2}), std::move(m), OperatorKind::unitary);
}

}  // namespace pancharatnam
