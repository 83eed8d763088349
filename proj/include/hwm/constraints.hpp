#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "hwm/data.hpp"

namespace hwm {

/// Coupling matrix of site j,
///
///   B_j = M0 + A_j*/(x_j - conj x_j)
///       + sum_{k != j} [ A_k*/(x_j - conj x_k) + A_k/(x_j - x_k) ].
///
/// Throws DegeneratePoles when any denominator falls below `guard`.
inline Mat2 b_matrix(const RationalData& d, int j, double guard = 1e-8) {
  const Complex xj = d.poles[j];
  auto safe_inv = [guard](Complex den) {
    if (std::abs(den) < guard) throw DegeneratePoles("b_matrix: vanishing denominator");
    return 1.0 / den;
  };
  Mat2 b = spin_to_matrix(d.m0);
  for (int k = 0; k < d.size(); ++k) {
    const Mat2 ak = spin_to_matrix(d.spins[k]);
    b += ak.adjoint().eval() * safe_inv(xj - std::conj(d.poles[k]));
    if (k != j) b += ak * safe_inv(xj - d.poles[k]);
  }
  return b;
}

/// Least-squares coefficient of B_j A_j against A_j. No proportionality
/// check; initial_velocity adds it.
inline Complex velocity_projection(const RationalData& d, int j) {
  const Mat2 a = spin_to_matrix(d.spins[j]);
  const Mat2 astar = a.adjoint();
  const Complex den = (a * astar).trace();
  if (std::abs(den) == 0.0) throw Error("velocity_projection: zero spin");
  return (b_matrix(d, j) * a * astar).trace() / den;
}

/// Velocity through the commutator trace, Tr([A_j, A_j*] B_j) / (2 Tr(A_j A_j*)).
/// Agrees with velocity_projection on constraint-valid data.
inline Complex velocity_trace_form(const RationalData& d, int j) {
  const Mat2 a = spin_to_matrix(d.spins[j]);
  const Mat2 astar = a.adjoint();
  const Complex den = (a * astar).trace();
  if (std::abs(den) == 0.0) throw Error("velocity_trace_form: zero spin");
  return (commutator(a, astar) * b_matrix(d, j)).trace() / (2.0 * den);
}

/// Initial pole velocity b_j, defined by B_j A_j = b_j A_j. Throws
/// NotProportional when the eigen relation fails beyond tolerance.
inline Complex initial_velocity(const RationalData& d, int j, double tol = kDefaultTol) {
  const Mat2 a = spin_to_matrix(d.spins[j]);
  const Mat2 b = b_matrix(d, j);
  const Complex bj = velocity_projection(d, j);
  const double residual = (b * a - bj * a).norm();
  const double scale = std::max(1.0, b.norm()) * std::max(1.0, a.norm());
  if (residual > tol * scale)
    throw NotProportional("initial_velocity: ||B_j A_j - b_j A_j|| = " +
                          std::to_string(residual) + " at site " + std::to_string(j));
  return bj;
}

/// Residuals of the full constraint set. All fields are absolute Frobenius
/// norms; the validity flag compares them against scale-aware thresholds.
struct ConstraintReport {
  struct Site {
    double spin_norm = 0;          // Hermitian magnitude of s_j
    double null_residual = 0;      // |s_j . s_j|
    double anticomm_residual = 0;  // ||B_j A_j + A_j B_j||_F
    double eigen_residual = 0;     // ||B_j A_j - b_j A_j||_F
    Complex velocity{};            // b_j
  };

  std::vector<Site> sites;
  double m0_unit_residual = 0;       // ||M0^2 - I||_F
  double m0_trace_residual = 0;      // |Tr M0|
  double m0_hermitian_residual = 0;  // ||M0 - M0*||_F
  double pole_separation = 0;
  double pole_min_imag = 0;
  bool valid = false;
  double tol = kDefaultTol;

  double max_site_residual() const {
    double r = 0;
    for (const Site& s : sites)
      r = std::max({r, s.null_residual, s.anticomm_residual, s.eigen_residual});
    return r;
  }
};

/// Checks the whole constraint set. Reports, never throws: degenerate pole
/// geometry marks the report invalid and skips the per-site algebra.
inline ConstraintReport validate(const RationalData& d, double tol = kDefaultTol) {
  ConstraintReport rep;
  rep.tol = tol;
  const Mat2 m0 = spin_to_matrix(d.m0);
  rep.m0_unit_residual = (m0 * m0 - Mat2::Identity()).norm();
  rep.m0_trace_residual = std::abs(m0.trace());
  rep.m0_hermitian_residual = (m0 - m0.adjoint().eval()).norm();
  rep.pole_separation = min_pole_separation(d.poles);
  rep.pole_min_imag = min_pole_imag(d.poles);

  constexpr double kGeometryGuard = 1e-8;
  bool ok = rep.m0_unit_residual < tol && rep.m0_trace_residual < tol &&
            rep.m0_hermitian_residual < tol && rep.pole_min_imag > kGeometryGuard &&
            rep.pole_separation > kGeometryGuard &&
            static_cast<int>(d.spins.size()) == d.size();

  if (ok) {
    for (int j = 0; j < d.size(); ++j) {
      ConstraintReport::Site site;
      const ComplexSpin& s = d.spins[j];
      site.spin_norm = spin_norm(s);
      site.null_residual = std::abs(dot(s, s));
      const Mat2 a = spin_to_matrix(s);
      const Mat2 b = b_matrix(d, j, kGeometryGuard);
      site.anticomm_residual = anticommutator(b, a).norm();
      if (site.spin_norm > tol) {
        site.velocity = velocity_projection(d, j);
        site.eigen_residual = (b * a - site.velocity * a).norm();
      }
      rep.sites.push_back(site);

      const double scale = std::max(1.0, b.norm()) * std::max(1.0, a.norm());
      ok = ok && site.spin_norm > tol &&
           site.null_residual < tol * std::max(1.0, hermitian_norm_sq(s)) &&
           site.anticomm_residual < tol * scale && site.eigen_residual < tol * scale;
    }
  }
  rep.valid = ok;
  return rep;
}

/// Real rotation taking (0, 0, 1) to the given unit vector (Rodrigues form).
inline Eigen::Matrix3d rotation_from_axis3(const Eigen::Vector3d& unit) {
  const Eigen::Vector3d zhat(0, 0, 1);
  const Eigen::Vector3d axis = zhat.cross(unit);
  const double sin_angle = axis.norm();
  const double cos_angle = zhat.dot(unit);
  if (sin_angle < 1e-14) {
    if (cos_angle > 0) return Eigen::Matrix3d::Identity();
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();  // pi turn about x
    flip(1, 1) = flip(2, 2) = -1;
    return flip;
  }
  Eigen::Matrix3d k;
  const Eigen::Vector3d u = axis / sin_angle;
  k << 0, -u.z(), u.y(), u.z(), 0, -u.x(), -u.y(), u.x(), 0;
  return Eigen::Matrix3d::Identity() + sin_angle * k + (1 - cos_angle) * k * k;
}

/// Valid one-pole datum. With q = Im(x1) the spin in the frame where m0 is
/// the third axis is q (cos phase, sin phase, i); it is null, and the
/// bilinear constraint m0 . s = i |s|^2 / (2q) holds with equality, so the
/// anticommutation constraint is exact and the pole velocity vanishes.
inline RationalData single_soliton(Complex x1, const ComplexSpin& m0, double phase = 0.0) {
  const double q = x1.imag();
  if (q <= 0) throw Error("single_soliton: pole must lie in the upper half-plane");
  const Eigen::Vector3d m0_re(m0.s1.real(), m0.s2.real(), m0.s3.real());
  const double im_part = std::abs(m0.s1.imag()) + std::abs(m0.s2.imag()) + std::abs(m0.s3.imag());
  if (im_part > 1e-12 || std::abs(m0_re.norm() - 1.0) > 1e-10)
    throw Error("single_soliton: m0 must be a real unit vector");

  const Eigen::Matrix3d rot = rotation_from_axis3(m0_re);
  const Eigen::Vector3d re = rot * Eigen::Vector3d(q * std::cos(phase), q * std::sin(phase), 0);
  const Eigen::Vector3d im = rot * Eigen::Vector3d(0, 0, q);
  RationalData d;
  d.m0 = m0;
  d.poles = {x1};
  d.spins = {{Complex(re.x(), im.x()), Complex(re.y(), im.y()), Complex(re.z(), im.z())}};
  return d;
}

}  // namespace hwm
