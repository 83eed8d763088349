#pragma once

#include <limits>
#include <vector>

#include "hwm/spin_algebra.hpp"

namespace hwm {

/// Full initial datum of the rational simple-pole ansatz
///
///   m(x) = m0 + sum_j s_j / (x - x_j) + sum_j conj(s_j) / (x - conj(x_j)),
///
/// with the background m0 a real unit vector, poles x_j in the open upper
/// half-plane and pairwise distinct, and one spin per pole. The struct itself
/// is a plain value; constraint checking lives in constraints.hpp.
struct RationalData {
  ComplexSpin m0;
  std::vector<Complex> poles;
  std::vector<ComplexSpin> spins;

  int size() const { return static_cast<int>(poles.size()); }
};

inline double min_pole_separation(const std::vector<Complex>& poles) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < poles.size(); ++j)
    for (std::size_t k = j + 1; k < poles.size(); ++k)
      sep = std::min(sep, std::abs(poles[j] - poles[k]));
  return sep;
}

inline double min_pole_imag(const std::vector<Complex>& poles) {
  double m = std::numeric_limits<double>::infinity();
  for (const Complex& x : poles) m = std::min(m, x.imag());
  return m;
}

/// Pointwise value of the ansatz field in Pauli form, valid at any x off the
/// poles. Direct partial-fraction evaluation, no resolvent involved.
inline Mat2 direct_field(const RationalData& d, Complex x) {
  Mat2 m = spin_to_matrix(d.m0);
  for (int j = 0; j < d.size(); ++j) {
    const Mat2 a = spin_to_matrix(d.spins[j]);
    m += a / (x - d.poles[j]);
    m += a.adjoint().eval() / (x - std::conj(d.poles[j]));
  }
  return m;
}

}  // namespace hwm
