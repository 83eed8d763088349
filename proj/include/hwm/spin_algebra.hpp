#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "hwm/errors.hpp"

namespace hwm {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr Complex kImag{0.0, 1.0};

/// Spin vector in C^3.
///
/// Every dot product in this library is the bilinear form (no conjugation);
/// the Hermitian pairing enters only through hermitian_norm_sq. A spin is
/// "null" when dot(s, s) = 0, which is a property of valid data, not an
/// invariant enforced at construction.
struct ComplexSpin {
  Complex s1{}, s2{}, s3{};
};

inline ComplexSpin operator+(const ComplexSpin& a, const ComplexSpin& b) {
  return {a.s1 + b.s1, a.s2 + b.s2, a.s3 + b.s3};
}

inline ComplexSpin operator-(const ComplexSpin& a, const ComplexSpin& b) {
  return {a.s1 - b.s1, a.s2 - b.s2, a.s3 - b.s3};
}

inline ComplexSpin operator*(const Complex& c, const ComplexSpin& s) {
  return {c * s.s1, c * s.s2, c * s.s3};
}

inline ComplexSpin conj(const ComplexSpin& s) {
  return {std::conj(s.s1), std::conj(s.s2), std::conj(s.s3)};
}

/// Bilinear dot product s.t = s1 t1 + s2 t2 + s3 t3 (symmetric, no conjugate).
inline Complex dot(const ComplexSpin& a, const ComplexSpin& b) {
  return a.s1 * b.s1 + a.s2 * b.s2 + a.s3 * b.s3;
}

inline ComplexSpin cross(const ComplexSpin& a, const ComplexSpin& b) {
  return {a.s2 * b.s3 - a.s3 * b.s2,
          a.s3 * b.s1 - a.s1 * b.s3,
          a.s1 * b.s2 - a.s2 * b.s1};
}

/// s . conj(s), the squared Hermitian magnitude.
inline double hermitian_norm_sq(const ComplexSpin& s) {
  return std::norm(s.s1) + std::norm(s.s2) + std::norm(s.s3);
}

inline double spin_norm(const ComplexSpin& s) {
  return std::sqrt(hermitian_norm_sq(s));
}

inline Mat2 pauli(int k) {
  Mat2 m;
  switch (k) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -kImag, kImag, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw Error("pauli index must be 1, 2 or 3");
  }
  return m;
}

/// s . sigma = [[s3, s1 - i s2], [s1 + i s2, -s3]]; always traceless.
inline Mat2 spin_to_matrix(const ComplexSpin& s) {
  Mat2 m;
  m << s.s3, s.s1 - kImag * s.s2,
       s.s1 + kImag * s.s2, -s.s3;
  return m;
}

/// Inverse of the Pauli correspondence, s_k = Tr(M sigma_k) / 2.
/// The trace must vanish within tol relative to the matrix norm.
inline ComplexSpin matrix_to_spin(const Mat2& m, double tol = kDefaultTol) {
  const double scale = std::max(1.0, m.norm());
  if (std::abs(m.trace()) > tol * scale) {
    throw NonTraceless("matrix_to_spin: trace " + std::to_string(std::abs(m.trace())) +
                       " exceeds tolerance");
  }
  return {(m(0, 1) + m(1, 0)) / 2.0,
          (m(1, 0) - m(0, 1)) / (2.0 * kImag),
          (m(0, 0) - m(1, 1)) / 2.0};
}

inline Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

inline Mat2 anticommutator(const Mat2& a, const Mat2& b) { return a * b + b * a; }

}  // namespace hwm
