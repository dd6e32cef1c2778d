#pragma once

// Exact pure-state simulation of one photon, or one photon entangled with a
// one-qubit probe. Joint kets are ordered |photon, probe>:
// |00>, |01>, |10>, |11>.

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>

#include "rotp/errors.hpp"
#include "rotp/random.hpp"

namespace rotp {

using Bit = std::uint8_t;

namespace quantum {

enum class Basis : std::uint8_t { Plus, Cross };

enum class EncodingOp : std::uint8_t { U0, U1 };

inline EncodingOp encoding_for_bit(Bit b) { return b ? EncodingOp::U1 : EncodingOp::U0; }

inline Basis other_basis(Basis b) { return b == Basis::Plus ? Basis::Cross : Basis::Plus; }

inline const char* to_string(Basis b) { return b == Basis::Plus ? "plus" : "cross"; }

/// Two consecutive pad bits selecting a preparation state:
/// 00 -> |H>, 11 -> |V>, 01 -> |u>, 10 -> |d>.
struct BasisKeyPair {
  Bit b0 = 0;
  Bit b1 = 0;

  BasisKeyPair() = default;
  BasisKeyPair(Bit first, Bit second) : b0(first), b1(second) {
    if (first > 1 || second > 1) throw DomainError("basis-key bits must be 0 or 1");
  }

  /// Plus-MB for equal bits, cross-MB otherwise.
  Basis basis() const { return b0 == b1 ? Basis::Plus : Basis::Cross; }
  /// Which eigenstate of basis() the pair names (0 = |H>/|u>, 1 = |V>/|d>).
  Bit eigen_index() const { return b0; }

  friend bool operator==(const BasisKeyPair&, const BasisKeyPair&) = default;
};

template <typename Scalar>
using Ket = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
template <typename Scalar>
using JointKet = Eigen::Matrix<std::complex<Scalar>, 4, 1>;
template <typename Scalar>
using Operator = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar>
using JointOperator = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

using Ketd = Ket<double>;
using JointKetd = JointKet<double>;
using Operatord = Operator<double>;
using JointOperatord = JointOperator<double>;

inline constexpr double kNormTolerance = 1e-9;

template <typename Derived>
using RealOf = typename Derived::Scalar::value_type;

/// k-th eigenstate of `b`: |0>,|1> for plus-MB, |u>,|d> for cross-MB.
template <typename Scalar = double>
Ket<Scalar> basis_state(Basis b, Bit k) {
  Ket<Scalar> s;
  if (b == Basis::Plus) {
    s << Scalar(k ? 0 : 1), Scalar(k ? 1 : 0);
  } else {
    const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
    s << r, (k ? -r : r);
  }
  return s;
}

template <typename Scalar = double>
Ket<Scalar> state_from_basis_key(BasisKeyPair pair) {
  return basis_state<Scalar>(pair.basis(), pair.eigen_index());
}

/// U0 = I, U1 = |0><1| - |1><0|.
template <typename Scalar = double>
Operator<Scalar> encoding_operator(EncodingOp op) {
  Operator<Scalar> m;
  if (op == EncodingOp::U0) {
    m.setIdentity();
  } else {
    m << Scalar(0), Scalar(1), Scalar(-1), Scalar(0);
  }
  return m;
}

template <typename Derived>
void require_normalized(const Eigen::MatrixBase<Derived>& s) {
  const auto n = s.norm();
  if (!std::isfinite(n) || std::abs(n - 1) > kNormTolerance)
    throw DomainError("state is not normalized");
}

template <typename Derived>
Ket<RealOf<Derived>> apply_encoding(EncodingOp op, const Eigen::MatrixBase<Derived>& s) {
  using Scalar = RealOf<Derived>;
  require_normalized(s);
  return (encoding_operator<Scalar>(op) * s).normalized();
}

/// |<eigen_k|s>|^2 for eigen_k the k-th eigenstate of `b`.
template <typename Derived>
RealOf<Derived> born_probability(const Eigen::MatrixBase<Derived>& s, Basis b, Bit k) {
  using Scalar = RealOf<Derived>;
  return std::norm(basis_state<Scalar>(b, k).dot(s));
}

/// Maps a probability that is numerically 0 or 1 onto the exact value, so
/// eigenstate measurements are deterministic.
template <typename Scalar>
Scalar snap_probability(Scalar p) {
  constexpr Scalar eps = Scalar(1e-12);
  if (p < eps) return Scalar(0);
  if (p > 1 - eps) return Scalar(1);
  return p;
}

template <typename Scalar>
struct Measurement {
  Bit outcome;
  Ket<Scalar> collapsed;
};

template <typename Derived>
Measurement<RealOf<Derived>> measure(const Eigen::MatrixBase<Derived>& s, Basis b,
                                     RandomStream& rng) {
  using Scalar = RealOf<Derived>;
  require_normalized(s);
  const Scalar p0 = snap_probability(born_probability(s, b, 0));
  const Bit outcome = rng.uniform() < p0 ? 0 : 1;
  return {outcome, basis_state<Scalar>(b, outcome)};
}

inline void check_attack_angle(double theta) {
  constexpr double lo = 0.0;
  constexpr double hi = std::numbers::pi / 4;
  if (!(theta >= lo - 1e-12 && theta <= hi + 1e-12))
    throw DomainError("attack strength theta must lie in [0, pi/4], got " +
                      std::to_string(theta));
}

/// Product ket |photon> (x) |probe>.
template <typename Scalar>
JointKet<Scalar> tensor(const Ket<Scalar>& photon, const Ket<Scalar>& probe) {
  JointKet<Scalar> j;
  for (int a = 0; a < 2; ++a)
    for (int p = 0; p < 2; ++p) j(2 * a + p) = photon(a) * probe(p);
  return j;
}

/// Entangling individual-attack unitary with (xi, xi_bar) the eigenstates of
/// `attack_basis`:
///   |xi,0>     -> |xi,0>
///   |xi_bar,0> -> cos(theta)|xi_bar,0> + sin(theta)|xi,1>
/// completed on the probe-|1> subspace by
///   |xi,1>     -> -sin(theta)|xi_bar,0> + cos(theta)|xi,1>
///   |xi_bar,1> -> |xi_bar,1>
template <typename Scalar = double>
JointOperator<Scalar> utb_operator(Scalar theta, Basis attack_basis) {
  check_attack_angle(static_cast<double>(theta));
  const Ket<Scalar> xi = basis_state<Scalar>(attack_basis, 0);
  const Ket<Scalar> xb = basis_state<Scalar>(attack_basis, 1);
  const Ket<Scalar> p0 = basis_state<Scalar>(Basis::Plus, 0);
  const Ket<Scalar> p1 = basis_state<Scalar>(Basis::Plus, 1);
  const Scalar c = std::cos(theta);
  const Scalar s = std::sin(theta);

  const JointKet<Scalar> xi0 = tensor(xi, p0), xi1 = tensor(xi, p1);
  const JointKet<Scalar> xb0 = tensor(xb, p0), xb1 = tensor(xb, p1);

  JointOperator<Scalar> u = xi0 * xi0.adjoint();
  u += (c * xb0 + s * xi1) * xb0.adjoint();
  u += (-s * xb0 + c * xi1) * xi1.adjoint();
  u += xb1 * xb1.adjoint();
  return u;
}

/// Applies the individual attack to |s> (x) |0>.
template <typename Derived>
JointKet<RealOf<Derived>> utb_apply(const Eigen::MatrixBase<Derived>& s, RealOf<Derived> theta,
                                    Basis attack_basis) {
  using Scalar = RealOf<Derived>;
  require_normalized(s);
  const JointOperator<Scalar> u = utb_operator<Scalar>(theta, attack_basis);
  return (u * tensor<Scalar>(s, basis_state<Scalar>(Basis::Plus, 0))).normalized();
}

/// Unnormalized probe state left after projecting the photon onto eigen_k.
template <typename Scalar>
Ket<Scalar> probe_branch(const JointKet<Scalar>& s, Basis b, Bit k) {
  const Ket<Scalar> e = basis_state<Scalar>(b, k);
  Ket<Scalar> v;
  for (int p = 0; p < 2; ++p) v(p) = std::conj(e(0)) * s(p) + std::conj(e(1)) * s(2 + p);
  return v;
}

template <typename Scalar>
struct JointMeasurement {
  Bit outcome;
  Ket<Scalar> probe;
};

/// Born-rule measurement of the photon factor; returns the probe's
/// renormalized conditional state.
template <typename Scalar>
JointMeasurement<Scalar> measure_photon_of_joint(const JointKet<Scalar>& s, Basis b,
                                                 RandomStream& rng) {
  require_normalized(s);
  const Ket<Scalar> v0 = probe_branch(s, b, 0);
  const Scalar p0 = snap_probability(v0.squaredNorm());
  const Bit outcome = rng.uniform() < p0 ? 0 : 1;
  const Ket<Scalar> v = outcome == 0 ? v0 : probe_branch(s, b, 1);
  return {outcome, v.normalized()};
}

/// True iff some unit complex c gives ||a - c b|| <= tol.
template <typename DerivedA, typename DerivedB>
bool states_equal_up_to_phase(const Eigen::MatrixBase<DerivedA>& a,
                              const Eigen::MatrixBase<DerivedB>& b, double tol) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch");
  using Scalar = RealOf<DerivedA>;
  const std::complex<Scalar> overlap = b.dot(a);
  const Scalar mag = std::abs(overlap);
  const std::complex<Scalar> c = mag > 0 ? overlap / mag : std::complex<Scalar>(1);
  return (a - c * b).norm() <= tol;
}

}  // namespace quantum
}  // namespace rotp
