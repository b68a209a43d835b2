#pragma once

// Builders for the three worked systems (micro-macro superposition,
// coherent-state cat, Kondo boundary spins) and their published closed-form
// phase, deficit, entropy and concurrence expressions.
//
// The closed forms are transcribed exactly as printed in the source
// material, suspected typos included; they are audit targets, not ground
// truth, and never feed the entanglement verdict. Known suspect spots, each
// flagged where it is coded below and measured by the oracle audit:
//   - cat deficit, third arctangent: the (k^2 + k*^2) / (k^2 - k*^2)
//     combinations are swapped relative to the Re/Im split of Tr[rho_B V];
//   - cat entropy exponent: n_- n_+ cos(xi) where the coherent overlap has
//     sqrt(n_- n_+) cos(xi);
//   - Kondo global phase denominator: missing a constant cos^2(theta) term
//     relative to the direct inner product.
//
// Every printed arctangent of a pair N/D is evaluated quadrant-aware as
// Arg(D + iN), with the shared undefined rule when |D + iN| is negligible.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pancharatnam/phase.hpp"
#include "pancharatnam/qstate.hpp"

namespace pancharatnam {

/// A prepared initial state together with the local unitaries it evolves
/// under.
struct ScenarioSystem {
  StateVector initial;
  LocalUnitarySet locals;
};

// ---------------------------------------------------------------------------
// Micro-macro superposition: sqrt(l0)|psi>|0> + sqrt(l1)|psi_bar>|1>
// ---------------------------------------------------------------------------

/// lambda0 is the weight of the |psi>|0> branch (lambda1 = 1 - lambda0);
/// g1, g2 are the accumulated local phases epsilon_i t (hbar = 1).
struct MicroMacroParams {
  double lambda0 = 0.75;
  double g1 = 0.5 * kPi;
  double g2 = 0.5 * kPi;
};

namespace detail {
inline void check_micro_macro(const MicroMacroParams& p) {
  if (!(p.lambda0 > 0.0 && p.lambda0 <= 1.0))
    throw std::invalid_argument("micro_macro: lambda0 outside (0, 1]");
}
inline double xlnx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }
}  // namespace detail

/// The macroscopic side is represented on the two-dimensional span of
/// |psi>, |psi_bar>; both local unitaries are projector phase rotations onto
/// the second basis state of their factor.
inline ScenarioSystem micro_macro_build(const MicroMacroParams& p) {
  detail::check_micro_macro(p);
  Vector amps = Vector::Zero(4);
  amps(0) = std::sqrt(p.lambda0);
  amps(3) = std::sqrt(1.0 - p.lambda0);
  StateVector initial(HilbertShape({2, 2}), std::move(amps));
  const StateVector excited = StateVector::basis(HilbertShape({2}), 1);
  LocalUnitarySet locals({projector_phase_unitary(excited, p.g1),
                          projector_phase_unitary(excited, p.g2)});
  return ScenarioSystem{std::move(initial), std::move(locals)};
}

struct MicroMacroClosed {
  PhaseResult phi_ab;
  PhaseResult phi_a;
  PhaseResult phi_b;
  double delta = 0.0;
  bool delta_defined = false;
};

/// Published global and local phases:
///   Phi_AB = atan[-l1 sin(g1+g2) / (l0 + l1 cos(g1+g2))]
///   Phi_A  = atan[-l1 sin g1 / (1 + l1(cos g1 - 1))], Phi_B likewise.
inline MicroMacroClosed micro_macro_closed(const MicroMacroParams& p) {
  detail::check_micro_macro(p);
  const double l1 = 1.0 - p.lambda0;
  MicroMacroClosed out;
  out.phi_ab = principal_arg(Complex(p.lambda0 + l1 * std::cos(p.g1 + p.g2),
                                     -l1 * std::sin(p.g1 + p.g2)));
  out.phi_a = principal_arg(Complex(1.0 + l1 * (std::cos(p.g1) - 1.0), -l1 * std::sin(p.g1)));
  out.phi_b = principal_arg(Complex(1.0 + l1 * (std::cos(p.g2) - 1.0), -l1 * std::sin(p.g2)));
  out.delta_defined = out.phi_ab.defined && out.phi_a.defined && out.phi_b.defined;
  if (out.delta_defined)
    out.delta = wrap_angle(out.phi_ab.phase - out.phi_a.phase - out.phi_b.phase);
  return out;
}

struct MicroMacroInversion {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double entropy_nats = 0.0;
};

/// Recovers the superposition weights from a deficit measured at
/// g1 = g2 = pi/2: lambda0 = 1/(1 + tan(delta/2)). Defined for
/// delta in [0, pi); the tangent is singular at delta = pi and negative
/// weights are rejected.
inline MicroMacroInversion micro_macro_invert(double delta) {
  if (!(delta >= 0.0))
    throw std::domain_error("micro_macro_invert: negative tan(delta/2)");
  if (!(delta < kPi))
    throw std::domain_error("micro_macro_invert: delta outside [0, pi)");
  const double t = std::tan(0.5 * delta);
  MicroMacroInversion out;
  out.lambda0 = 1.0 / (1.0 + t);
  out.lambda1 = t / (1.0 + t);
  out.entropy_nats = -detail::xlnx(out.lambda0) - detail::xlnx(out.lambda1);
  return out;
}

// ---------------------------------------------------------------------------
// Coherent-state cat: (k|alpha_->|g> + k*|alpha_+>|e>)/sqrt(2)
// ---------------------------------------------------------------------------

/// n_minus, n_plus are mean photon numbers |alpha_-|^2, |alpha_+|^2; xi is
/// the relative coherent phase (the plus amplitude is taken real); k =
/// exp(-i psi); theta is the number-operator rotation angle of the local
/// unitary U = exp(-i theta N), with V = sigma_x on the qubit.
struct CatParams {
  double n_minus = 2.0;
  double n_plus = 1.0;
  double xi = 0.25 * kPi;
  double psi = 0.0;
  double theta = kPi;
  FockSpec fock{18, 1e-12};
};

namespace detail {
inline void check_cat(const CatParams& p) {
  if (!(p.n_minus >= 0.0 && p.n_plus >= 0.0))
    throw std::invalid_argument("cat: negative mean photon number");
}
}  // namespace detail

inline ScenarioSystem cat_build(const CatParams& p) {
  detail::check_cat(p);
  if (poisson_tail(p.n_minus, p.fock.n_max) > p.fock.tail_bound ||
      poisson_tail(p.n_plus, p.fock.n_max) > p.fock.tail_bound)
    throw std::invalid_argument("cat_build: truncation tail above tolerance");

  const Complex alpha_minus = std::sqrt(p.n_minus) * std::exp(Complex(0.0, p.xi));
  const Complex alpha_plus = std::sqrt(p.n_plus);
  const Complex k = std::exp(Complex(0.0, -p.psi));

  const StateVector minus = coherent_state(alpha_minus, p.fock);
  const StateVector plus = coherent_state(alpha_plus, p.fock);
  const int fock_dim = p.fock.n_max + 1;
  Vector amps = Vector::Zero(2 * fock_dim);
  for (int n = 0; n < fock_dim; ++n) {
    amps(2 * n) = k * minus.amplitudes()(n);
    amps(2 * n + 1) = std::conj(k) * plus.amplitudes()(n);
  }
  StateVector initial = StateVector::normalized(HilbertShape({fock_dim, 2}), std::move(amps));
  LocalUnitarySet locals({number_phase_unitary(p.theta, p.fock), sigma_x()});
  return ScenarioSystem{std::move(initial), std::move(locals)};
}

struct CatClosed {
  Complex trace_ab;
  Complex trace_a;
  Complex trace_b;
  double delta = 0.0;
  bool delta_defined = false;
  /// Published entropy with its 1/(2 ln 2) prefactor; NaN (entropy_defined
  /// false) when the printed exponent pushes the argument of a log negative.
  double entropy_bits = 0.0;
  bool entropy_defined = false;
};

inline CatClosed cat_closed(const CatParams& p) {
  detail::check_cat(p);
  const double n = std::sqrt(p.n_minus * p.n_plus);
  const Complex k = std::exp(Complex(0.0, -p.psi));
  const Complex k2 = k * k;
  const Complex k2c = std::conj(k) * std::conj(k);

  const double e_minus = std::exp(n * std::cos(p.xi - p.theta));
  const double e_plus = std::exp(n * std::cos(p.xi + p.theta));
  const double s_minus = n * std::sin(p.xi - p.theta);
  const double s_plus = n * std::sin(p.xi + p.theta);

  CatClosed out;

  const Complex d1 = k2 * e_minus * std::cos(s_minus) + k2c * e_plus * std::cos(s_plus);
  const Complex n1 = k2 * e_minus * std::sin(s_minus) - k2c * e_plus * std::sin(s_plus);
  out.trace_ab = 0.5 * std::exp(-0.5 * (p.n_minus + p.n_plus)) * (d1 + Complex(0, 1) * n1);

  const double ea = std::exp(p.n_minus * (std::cos(p.theta) - 1.0));
  const double eb = std::exp(p.n_plus * (std::cos(p.theta) - 1.0));
  const double d2 = ea * std::cos(p.n_minus * std::sin(p.theta)) +
                    eb * std::cos(p.n_plus * std::sin(p.theta));
  const double n2 = -(ea * std::sin(p.n_minus * std::sin(p.theta)) +
                      eb * std::sin(p.n_plus * std::sin(p.theta)));
  out.trace_a = 0.5 * Complex(d2, n2);

  const double cb = std::cos(n * std::sin(p.xi));
  const double sb = std::sin(n * std::sin(p.xi));
  out.trace_b = 0.5 * std::exp(-0.5 * (p.n_minus + p.n_plus) + n * std::cos(p.xi)) *
                ((k2 + k2c) * cb + Complex(0, 1) * (k2 - k2c) * sb);

  // Printed deficit, three quadrant-aware arctangents. The third pair pairs
  // (k^2 + k*^2) with the sine and (k^2 - k*^2) with the cosine, unlike the
  // trace it came from; kept as printed.
  const PhaseResult t1 = principal_arg(d1 + Complex(0, 1) * n1);
  const PhaseResult t2 = principal_arg(Complex(d2, n2));
  const PhaseResult t3 = principal_arg((k2 - k2c) * cb + Complex(0, 1) * (k2 + k2c) * sb);
  out.delta_defined = t1.defined && t2.defined && t3.defined;
  if (out.delta_defined) out.delta = wrap_angle(t1.phase - t2.phase - t3.phase);

  // Published entropy; the exponent carries n_- n_+ cos(xi) as printed.
  const double c = std::norm(k) *
                   std::exp(-0.5 * p.n_minus - 0.5 * p.n_plus + p.n_minus * p.n_plus * std::cos(p.xi));
  const auto half_term = [](double x) { return x == 0.0 ? 0.0 : x * std::log(0.5 * x); };
  out.entropy_bits = -(half_term(1.0 - c) + half_term(1.0 + c)) / (2.0 * std::log(2.0));
  out.entropy_defined = std::isfinite(out.entropy_bits);
  return out;
}

// ---------------------------------------------------------------------------
// Kondo boundary spins
// ---------------------------------------------------------------------------

/// theta = 2 J_m t fixes the four-spin state; g1, g4 are the projector
/// phases epsilon_1 tau, epsilon_4 tau applied to the boundary spins.
struct KondoParams {
  double theta = 0.0;
  double g1 = 0.5 * kPi;
  double g4 = 0.5 * kPi;
};

/// Four-qubit state
///   (-i sin(theta)/2)(|0011> + |1100>) - (cos(theta)/2)(|1001> + |0110>)
///   + (exp(i theta)/2)(|0101> + |1010>)
/// with projector phase rotations on spins 1 and 4 and identities on 2, 3.
inline ScenarioSystem kondo_build(const KondoParams& p) {
  Vector amps = Vector::Zero(16);
  const Complex a = Complex(0.0, -0.5) * std::sin(p.theta);
  const double b = -0.5 * std::cos(p.theta);
  const Complex c = 0.5 * std::exp(Complex(0.0, p.theta));
  amps(0b0011) = a;
  amps(0b1100) = a;
  amps(0b1001) = b;
  amps(0b0110) = b;
  amps(0b0101) = c;
  amps(0b1010) = c;
  StateVector initial(HilbertShape({2, 2, 2, 2}), std::move(amps));

  const StateVector excited = StateVector::basis(HilbertShape({2}), 1);
  const Operator id2 = Operator::identity(HilbertShape({2}));
  LocalUnitarySet locals({projector_phase_unitary(excited, p.g1), id2, id2,
                          projector_phase_unitary(excited, p.g4)});
  return ScenarioSystem{std::move(initial), std::move(locals)};
}

struct KondoClosed {
  PhaseResult phi_global;
  PhaseResult phi_1;
  PhaseResult phi_4;
  double delta = 0.0;
  bool delta_defined = false;
  double e_from_delta = 0.0;
  bool e_defined = false;
};

/// Published global phase
///   atan[(-(1+sin^2 t)(sin g1 + sin g4) - sin(g1+g4) + sin^2 t sin(g1+g4)) /
///        ((1+sin^2 t)(cos g1 + cos g4) + cos(g1+g4) - sin^2 t cos(g1+g4))]
/// (denominator as printed; the direct inner product carries an extra
/// constant cos^2 t term), locals atan[-sin g / (1 + cos g)], and the
/// deficit-to-concurrence relation E = (tan delta + 2)/(tan delta - 2).
inline KondoClosed kondo_closed(const KondoParams& p) {
  const double s2 = std::sin(p.theta) * std::sin(p.theta);
  const double num = -(1.0 + s2) * (std::sin(p.g1) + std::sin(p.g4)) - std::sin(p.g1 + p.g4) +
                     s2 * std::sin(p.g1 + p.g4);
  const double den = (1.0 + s2) * (std::cos(p.g1) + std::cos(p.g4)) + std::cos(p.g1 + p.g4) -
                     s2 * std::cos(p.g1 + p.g4);

  KondoClosed out;
  out.phi_global = principal_arg(Complex(den, num));
  out.phi_1 = principal_arg(Complex(1.0 + std::cos(p.g1), -std::sin(p.g1)));
  out.phi_4 = principal_arg(Complex(1.0 + std::cos(p.g4), -std::sin(p.g4)));
  out.delta_defined = out.phi_global.defined && out.phi_1.defined && out.phi_4.defined;
  if (out.delta_defined) {
    out.delta = wrap_angle(out.phi_global.phase - out.phi_1.phase - out.phi_4.phase);
    const double t = std::tan(out.delta);
    out.e_from_delta = (t + 2.0) / (t - 2.0);
    out.e_defined = std::isfinite(out.e_from_delta);
  }
  return out;
}

/// Published concurrence of the boundary-spin pair: max{0, (1 - 3cos 2t)/4}.
inline double kondo_concurrence(double theta) {
  return std::max(0.0, 0.25 * (1.0 - 3.0 * std::cos(2.0 * theta)));
}

}  // namespace pancharatnam
