#pragma once

// Pancharatnam phases of pure and mixed states under unitary evolution, and
// the phase deficit of a multipartite pure state under local evolution.
//
// Conventions: all phases are in radians on the principal branch (-pi, pi];
// a phase is reported as undefined when the interference amplitude it comes
// from has magnitude below kVisibilityEpsilon. The deficit of a state under
// local unitaries (U_1, ..., U_K) is
//   Delta = Arg<Psi| U_1 x ... x U_K |Psi> - sum_i Arg Tr[rho_i U_i],
// wrapped back to the principal branch. A nonzero deficit certifies
// entanglement of |Psi|; a zero deficit certifies nothing.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pancharatnam/qstate.hpp"

namespace pancharatnam {

inline constexpr double kVisibilityEpsilon = 1e-9;
inline constexpr double kWitnessTolerance = 1e-8;

/// Wraps an angle to the principal branch (-pi, pi].
inline double wrap_angle(double x) {
  double w = std::remainder(x, 2.0 * kPi);
  if (w <= -kPi) w = kPi;
  return w;
}

/// Phase of an interference amplitude. `defined` is false when the magnitude
/// is below kVisibilityEpsilon, in which case `phase` holds 0 and must not be
/// consumed.
struct PhaseResult {
  double phase = 0.0;
  double visibility = 0.0;
  bool defined = false;
};

inline PhaseResult principal_arg(Complex z) {
  PhaseResult r;
  r.visibility = std::abs(z);
  r.defined = r.visibility >= kVisibilityEpsilon;
  if (r.defined) {
    r.phase = std::atan2(z.imag(), z.real());
    if (r.phase <= -kPi) r.phase = kPi;
  }
  return r;
}

/// Pancharatnam phase Arg<initial|final> between two pure states.
inline PhaseResult pancharatnam_pure(const StateVector& initial, const StateVector& final_state) {
  if (initial.shape() != final_state.shape())
    throw std::invalid_argument("pancharatnam_pure: shape mismatch");
  return principal_arg(initial.amplitudes().dot(final_state.amplitudes()));
}

/// Pancharatnam phase Arg Tr[rho U] of a mixed state under a unitary.
inline PhaseResult pancharatnam_mixed(const Operator& rho, const Operator& u) {
  if (rho.kind() != OperatorKind::density)
    throw std::invalid_argument("pancharatnam_mixed: first operator must be a density operator");
  if (u.kind() != OperatorKind::unitary)
    throw std::invalid_argument("pancharatnam_mixed: second operator must be unitary");
  if (rho.shape().total_dim() != u.shape().total_dim())
    throw std::invalid_argument("pancharatnam_mixed: dimension mismatch");
  const Complex tr = rho.entries().transpose().cwiseProduct(u.entries()).sum();
  return principal_arg(tr);
}

/// Dynamical phase -<H> t (hbar = 1) accumulated by a pure state. Not
/// wrapped: dynamical phases add over subsystems and over time.
inline double dynamical_phase(const Operator& h, const StateVector& state, double t) {
  if (h.kind() != OperatorKind::hermitian)
    throw std::invalid_argument("dynamical_phase: generator must be hermitian");
  if (h.shape().total_dim() != state.shape().total_dim())
    throw std::invalid_argument("dynamical_phase: dimension mismatch");
  const double expectation = state.amplitudes().dot(h.entries() * state.amplitudes()).real();
  return -expectation * t;
}

/// Dynamical phase -Tr[rho H] t of a mixed state.
inline double dynamical_phase(const Operator& h, const Operator& rho, double t) {
  if (h.kind() != OperatorKind::hermitian)
    throw std::invalid_argument("dynamical_phase: generator must be hermitian");
  if (rho.kind() != OperatorKind::density)
    throw std::invalid_argument("dynamical_phase: state must be a density operator");
  if (h.shape().total_dim() != rho.shape().total_dim())
    throw std::invalid_argument("dynamical_phase: dimension mismatch");
  const double expectation = rho.entries().transpose().cwiseProduct(h.entries()).sum().real();
  return -expectation * t;
}

/// One unitary per tensor factor of some state shape.
struct LocalUnitarySet {
  std::vector<Operator> unitaries;

  explicit LocalUnitarySet(std::vector<Operator> us) : unitaries(std::move(us)) {
    if (unitaries.empty()) throw std::invalid_argument("LocalUnitarySet: empty");
    for (const auto& u : unitaries)
      if (u.kind() != OperatorKind::unitary)
        throw std::invalid_argument("LocalUnitarySet: member is not tagged unitary");
  }

  void check_matches(const HilbertShape& shape) const {
    if (static_cast<int>(unitaries.size()) != shape.factor_count())
      throw std::invalid_argument("LocalUnitarySet: unitary count differs from factor count");
    for (int i = 0; i < shape.factor_count(); ++i)
      if (unitaries[static_cast<std::size_t>(i)].shape().total_dim() != shape.dim(i))
        throw std::invalid_argument("LocalUnitarySet: unitary dimension differs from factor");
  }
};

/// Global phase, local phases, and their mismatch for one state and one set
/// of local unitaries.
struct DeficitReport {
  PhaseResult global_phase;
  std::vector<PhaseResult> local_phases;
  /// Principal-branch deficit; 0 when any contributing phase is undefined.
  double deficit = 0.0;
  /// Same difference before wrapping, for callers tracking winding.
  double deficit_unwrapped = 0.0;
  bool entangled_witnessed = false;
  double witness_tolerance = kWitnessTolerance;

  bool all_defined() const {
    if (!global_phase.defined) return false;
    for (const auto& p : local_phases)
      if (!p.defined) return false;
    return true;
  }

  /// Name of the first undefined phase ("global", "local 0", ...), or "".
  std::string first_undefined() const {
    if (!global_phase.defined) return "global";
    for (std::size_t i = 0; i < local_phases.size(); ++i)
      if (!local_phases[i].defined) return "local " + std::to_string(i);
    return "";
  }
};

namespace detail {
inline DeficitReport assemble_deficit_report(PhaseResult global,
                                             std::vector<PhaseResult> locals,
                                             double witness_tolerance) {
  DeficitReport report;
  report.global_phase = global;
  report.local_phases = std::move(locals);
  report.witness_tolerance = witness_tolerance;
  if (report.all_defined()) {
    double local_sum = 0.0;
    for (const auto& p : report.local_phases) local_sum += p.phase;
    report.deficit_unwrapped = global.phase - local_sum;
    report.deficit = wrap_angle(report.deficit_unwrapped);
    report.entangled_witnessed = std::abs(report.deficit) > witness_tolerance;
  }
  return report;
}
}  // namespace detail

/// Phase deficit of |psi> under one local unitary per factor. The global
/// phase is taken against the locally evolved state; each local phase is the
/// mixed-state phase of the corresponding reduced density operator.
inline DeficitReport phase_deficit(const StateVector& psi, const LocalUnitarySet& locals,
                                   double witness_tolerance = kWitnessTolerance) {
  locals.check_matches(psi.shape());

  StateVector evolved = psi;
  for (int i = 0; i < psi.shape().factor_count(); ++i)
    evolved = apply_to_factor(evolved, locals.unitaries[static_cast<std::size_t>(i)], i);
  const PhaseResult global = pancharatnam_pure(psi, evolved);

  std::vector<PhaseResult> local_phases;
  for (int i = 0; i < psi.shape().factor_count(); ++i) {
    const Operator rho_i = reduced_density(psi, {i});
    local_phases.push_back(pancharatnam_mixed(rho_i, locals.unitaries[static_cast<std::size_t>(i)]));
  }
  return detail::assemble_deficit_report(global, std::move(local_phases), witness_tolerance);
}

/// Deficit of a bipartite state given in Schmidt form, evaluated directly
/// from the Schmidt data:
///   Arg sum_kl sqrt(l_k l_l) U_kl V_kl - Arg sum_k l_k U_kk - Arg sum_k l_k V_kk
/// with U, V the local unitaries in the Schmidt bases. Returns nullopt when
/// any of the three amplitudes falls below kVisibilityEpsilon.
inline std::optional<double> deficit_closed_form_schmidt(const SchmidtForm& schmidt,
                                                         const Operator& u_a,
                                                         const Operator& u_b) {
  if (u_a.shape().total_dim() != schmidt.basis_a().rows() ||
      u_b.shape().total_dim() != schmidt.basis_b().rows())
    throw std::invalid_argument("deficit_closed_form_schmidt: unitary dimension mismatch");
  if (u_a.kind() != OperatorKind::unitary || u_b.kind() != OperatorKind::unitary)
    throw std::invalid_argument("deficit_closed_form_schmidt: operators must be unitary");

  const Eigen::VectorXd& lam = schmidt.coefficients();
  const Matrix ua = schmidt.basis_a().adjoint() * u_a.entries() * schmidt.basis_a();
  const Matrix ub = schmidt.basis_b().adjoint() * u_b.entries() * schmidt.basis_b();

  Complex global = 0.0, local_a = 0.0, local_b = 0.0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    local_a += lam(k) * ua(k, k);
    local_b += lam(k) * ub(k, k);
    for (Eigen::Index l = 0; l < lam.size(); ++l)
      global += std::sqrt(lam(k) * lam(l)) * ua(k, l) * ub(k, l);
  }

  const PhaseResult pg = principal_arg(global);
  const PhaseResult pa = principal_arg(local_a);
  const PhaseResult pb = principal_arg(local_b);
  if (!pg.defined || !pa.defined || !pb.defined) return std::nullopt;
  return wrap_angle(pg.phase - pa.phase - pb.phase);
}

}  // namespace pancharatnam
