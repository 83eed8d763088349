#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hwm/lax.hpp"

namespace hwm {

/// Everything the explicit solution formula needs, frozen at t = 0: the pole
/// diagonal X(0), the Lax matrix L(0), the canonical half-spins and the
/// background. All time dependence downstream enters through X(0) + t L(0).
struct FrozenEvolution {
  Eigen::VectorXcd poles;               // diagonal of X(0)
  Eigen::MatrixXcd lax;                 // L(0)
  std::vector<HalfSpinPair> halfspins;  // canonical pairs at t = 0
  Mat2 background;                      // m0 . sigma
  Eigen::MatrixXcd vecs;                // 2 x N, columns e_j
  Eigen::MatrixXcd covecs;              // 2 x N, columns xi_j

  int size() const { return static_cast<int>(poles.size()); }

  Eigen::MatrixXcd shifted_pole_matrix(double t) const {
    Eigen::MatrixXcd m = t * lax;
    m.diagonal() += poles;
    return m;
  }

  /// Matrix of the resolvent on the conjugate side, conj(X(0)) + t L(0)*.
  /// At t = 0 this is the diagonal of the reflected poles.
  Eigen::MatrixXcd hardy_matrix(double t) const {
    Eigen::MatrixXcd m = t * lax.adjoint();
    m.diagonal() += poles.conjugate();
    return m;
  }

  static FrozenEvolution freeze(const RationalData& d, double tol = kDefaultTol) {
    const ConstraintReport rep = validate(d, tol);
    if (!rep.valid) throw NotProportional("freeze: datum fails constraint validation");
    Eigen::VectorXcd vel(d.size());
    for (int j = 0; j < d.size(); ++j) vel(j) = rep.sites[j].velocity;
    return freeze_with_velocities(d, vel, tol);
  }

  /// Freeze without constraint validation (spins must still be null enough
  /// for half-spins to exist). Used for negative controls.
  static FrozenEvolution freeze_with_velocities(const RationalData& d,
                                                const Eigen::VectorXcd& velocities,
                                                double tol = 1e-6) {
    FrozenEvolution fe;
    const HalfSpinSet hs = assemble(d, tol);
    std::vector<Complex> vel(velocities.data(), velocities.data() + velocities.size());
    const LaxPair lp = lax_from_parts(d.poles, vel, hs.pairs);
    fe.poles = Eigen::Map<const Eigen::VectorXcd>(d.poles.data(), d.size());
    fe.lax = lp.L;
    fe.halfspins = hs.pairs;
    fe.background = spin_to_matrix(d.m0);
    fe.vecs = hs.vec_matrix();
    fe.covecs = hs.covec_matrix();
    return fe;
  }
};

namespace detail {

inline Eigen::PartialPivLU<Eigen::MatrixXcd> resolvent_lu(Eigen::MatrixXcd m, Complex x) {
  m.diagonal().array() -= x;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (m.rows() > 0 && lu.rcond() < 1e-13)
    throw ResolventSingular("resolvent: matrix singular to working precision");
  return lu;
}

}  // namespace detail

/// Lower component of the field,
///
///   pi_minus(t, x) = - sum_{j,k} R_jk e_j xi_k^T,  R = (X(0) + t L(0) - x I)^{-1},
///
/// the N x N contraction of the doubled-matrix formula. At t = 0 it reduces
/// to the partial fractions sum_j A_j(0) / (x - x_j(0)).
inline Mat2 pi_minus(const FrozenEvolution& fe, double t, Complex x) {
  if (fe.size() == 0) return Mat2::Zero();
  const auto lu = detail::resolvent_lu(fe.shifted_pole_matrix(t), x);
  const Eigen::MatrixXcd y = lu.solve(fe.covecs.transpose());  // N x 2
  return -(fe.vecs * y);
}

/// Upper component; for real x the Hermitian conjugate of pi_minus. Reached
/// through the conjugated resolvent, not by conjugating pi_minus.
inline Mat2 pi_plus(const FrozenEvolution& fe, double t, Complex x) {
  if (fe.size() == 0) return Mat2::Zero();
  const auto lu = detail::resolvent_lu(fe.hardy_matrix(t), x);
  const Eigen::MatrixXcd y = lu.solve(fe.vecs.conjugate().transpose());  // N x 2
  return -(fe.covecs.conjugate() * y);
}

/// Same value as pi_plus, evaluated the way the finite Hardy-space
/// representation prescribes: the field component is expanded in the basis
/// K_j = conj(F_j) H / (x - conj(x_j)) with diagonal 2x2 coefficients, the
/// inverse of (G - t T - x) acts on the coefficient stack through a doubled
/// matrix (one independent N-vector solve per diagonal slot), and the
/// boundary functional contracts the result against conj(F_j) H.
inline Mat2 hardy_rep_pi_plus(const FrozenEvolution& fe, double t, Complex x) {
  const int n = fe.size();
  if (n == 0) return Mat2::Zero();
  const auto lu = detail::resolvent_lu(fe.hardy_matrix(t), x);

  Eigen::VectorXcd slot1(n), slot2(n);  // coefficients of Pi_+ V(0): C_j = conj(E_j)
  for (int j = 0; j < n; ++j) {
    slot1(j) = std::conj(fe.halfspins[j].alpha);
    slot2(j) = std::conj(fe.halfspins[j].beta);
  }
  const Eigen::VectorXcd c1 = lu.solve(slot1);
  const Eigen::VectorXcd c2 = lu.solve(slot2);

  const Eigen::Matrix2d h = ones2();
  Mat2 acc = Mat2::Zero();
  for (int j = 0; j < n; ++j) {
    Mat2 fj_conj = Mat2::Zero();
    fj_conj(0, 0) = std::conj(fe.halfspins[j].beta);
    fj_conj(1, 1) = -std::conj(fe.halfspins[j].alpha);
    Mat2 cj = Mat2::Zero();
    cj(0, 0) = c1(j);
    cj(1, 1) = c2(j);
    acc += fj_conj * h * cj;
  }
  return -acc;
}

/// Field matrix M(t, x) = M0 + pi_minus + pi_plus without reality checks.
inline Mat2 field_matrix(const FrozenEvolution& fe, double t, double x) {
  return fe.background + pi_minus(fe, t, x) + pi_plus(fe, t, x);
}

struct FieldSample {
  Mat2 M;
  Eigen::Vector3d m;      // real spin components
  double im_residual;     // largest imaginary part, including Tr M / 2
  double unit_deviation;  // | |m| - 1 |
};

/// Field value at real x. Throws NonRealField when the reconstructed spin
/// has imaginary parts (or trace) above reality_tol; ResolventSingular
/// propagates from the solves.
inline FieldSample full_field(const FrozenEvolution& fe, double t, double x,
                              double reality_tol = 1e-8) {
  FieldSample out;
  out.M = field_matrix(fe, t, x);
  const Complex c1 = (out.M(0, 1) + out.M(1, 0)) / 2.0;
  const Complex c2 = (out.M(1, 0) - out.M(0, 1)) / (2.0 * kImag);
  const Complex c3 = (out.M(0, 0) - out.M(1, 1)) / 2.0;
  out.im_residual = std::max({std::abs(c1.imag()), std::abs(c2.imag()), std::abs(c3.imag()),
                              std::abs(out.M.trace()) / 2.0});
  out.m = Eigen::Vector3d(c1.real(), c2.real(), c3.real());
  out.unit_deviation = std::abs(out.m.norm() - 1.0);
  if (out.im_residual > reality_tol)
    throw NonRealField("full_field: imaginary residue " + std::to_string(out.im_residual));
  return out;
}

/// Poles and 2x2 residues of the evolved field at one time.
struct PoleSnapshot {
  double t = 0;
  Eigen::VectorXcd poles;
  std::vector<Mat2> spins;
  double conditioning = 1;  // condition estimate of the eigenbasis
  bool boundary_warning = false;
};

/// Eigen-decomposition snapshot: the poles at time t are the eigenvalues of
/// X(0) + t L(0), and the residues come from the same similarity applied to
/// the rank-one site matrices. Throws DefectiveMatrix when the eigenbasis
/// condition exceeds cond_threshold (a pole collision, not noise).
inline PoleSnapshot poles_and_spins_at(const FrozenEvolution& fe, double t,
                                       double cond_threshold = 1e10,
                                       double boundary_tol = 1e-6) {
  PoleSnapshot snap;
  snap.t = t;
  const int n = fe.size();
  if (n == 0) {
    snap.poles = Eigen::VectorXcd();
    return snap;
  }
  const Eigen::MatrixXcd m = fe.shifted_pole_matrix(t);

  Eigen::MatrixXcd offdiag = m;
  offdiag.diagonal().setZero();
  if (offdiag.norm() == 0.0) {  // exactly diagonal, e.g. t = 0: keep input order
    snap.poles = m.diagonal();
    snap.spins.reserve(n);
    for (int j = 0; j < n; ++j)
      snap.spins.push_back(fe.vecs.col(j) * fe.covecs.col(j).transpose());
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success)
      throw DefectiveMatrix("poles_and_spins_at: eigenvalue solver failed");
    const Eigen::MatrixXcd p = es.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p);
    const double smin = svd.singularValues()(n - 1);
    snap.conditioning = smin > 0 ? svd.singularValues()(0) / smin
                                 : std::numeric_limits<double>::infinity();
    if (!(snap.conditioning < cond_threshold))
      throw DefectiveMatrix("poles_and_spins_at: eigenbasis condition " +
                            std::to_string(snap.conditioning));
    snap.poles = es.eigenvalues();
    const Eigen::MatrixXcd left = fe.vecs * p;                        // 2 x N
    const Eigen::MatrixXcd right = p.lu().solve(fe.covecs.transpose());  // N x 2
    snap.spins.reserve(n);
    for (int j = 0; j < n; ++j) snap.spins.push_back(left.col(j) * right.row(j));
  }
  snap.boundary_warning = snap.poles.imag().minCoeff() < boundary_tol;
  return snap;
}

/// Index map from each reference entry to its nearest candidate, greedy over
/// increasing distance; ties broken lexicographically by (Re, Im).
inline std::vector<int> match_by_proximity(const Eigen::VectorXcd& reference,
                                           const Eigen::VectorXcd& candidates) {
  const int n = static_cast<int>(reference.size());
  std::vector<int> pick(n, -1);
  std::vector<bool> used(n, false);
  for (int round = 0; round < n; ++round) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < n; ++i) {
      if (pick[i] >= 0) continue;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double dist = std::abs(reference(i) - candidates(j));
        const bool closer =
            dist < best ||
            (dist == best && bj >= 0 &&
             (candidates(j).real() < candidates(bj).real() ||
              (candidates(j).real() == candidates(bj).real() &&
               candidates(j).imag() < candidates(bj).imag())));
        if (closer) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    pick[bi] = bj;
    used[bj] = true;
  }
  return pick;
}

/// One second-order pole of the half-wave image.
struct SecondOrderPole {
  Complex location;
  Mat2 coefficient;
};

/// Closed-form coefficients of |grad| applied to a field with the given
/// simple poles and residues: i A_j at x_j and -i A_j* at conj(x_j).
inline std::vector<SecondOrderPole> halfwave_coefficients(const std::vector<Complex>& poles,
                                                          const std::vector<Mat2>& residues) {
  std::vector<SecondOrderPole> out;
  out.reserve(2 * poles.size());
  for (std::size_t j = 0; j < poles.size(); ++j) {
    out.push_back({poles[j], kImag * residues[j]});
    out.push_back({std::conj(poles[j]), -kImag * residues[j].adjoint().eval()});
  }
  return out;
}

inline std::vector<SecondOrderPole> halfwave_apply(const RationalData& d) {
  std::vector<Mat2> residues;
  residues.reserve(d.spins.size());
  for (const ComplexSpin& s : d.spins) residues.push_back(spin_to_matrix(s));
  return halfwave_coefficients(d.poles, residues);
}

inline Mat2 evaluate_second_order(const std::vector<SecondOrderPole>& coeffs, Complex x) {
  Mat2 acc = Mat2::Zero();
  for (const SecondOrderPole& c : coeffs) {
    const Complex dx = x - c.location;
    acc += c.coefficient / (dx * dx);
  }
  return acc;
}

/// Defect of the evolution equation at one point:
///
///   || (M(t+h,x) - M(t-h,x)) / (2h) + (i/2) [M(t,x), |grad| M(t,x)] ||_F,
///
/// with |grad| M evaluated in closed form on the pole snapshot at time t.
/// Second order in h on constraint-valid data.
inline double pde_residual(const FrozenEvolution& fe, double t, double x, double h) {
  const Mat2 forward = field_matrix(fe, t + h, x);
  const Mat2 backward = field_matrix(fe, t - h, x);
  const Mat2 dm = (forward - backward) / (2.0 * h);

  const PoleSnapshot snap = poles_and_spins_at(fe, t);
  const std::vector<Complex> poles(snap.poles.data(), snap.poles.data() + snap.poles.size());
  const Mat2 gradm = evaluate_second_order(halfwave_coefficients(poles, snap.spins), x);
  const Mat2 m = field_matrix(fe, t, x);
  return (dm + (kImag / 2.0) * commutator(m, gradm)).norm();
}

}  // namespace hwm
