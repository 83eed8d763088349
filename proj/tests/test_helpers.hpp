#pragma once

#include <random>

#include "hwm/datagen.hpp"

namespace hwm::test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline Complex random_complex(std::mt19937_64& g, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(g), u(g)};
}

inline ComplexSpin random_spin(std::mt19937_64& g, double scale = 1.0) {
  return {random_complex(g, scale), random_complex(g, scale), random_complex(g, scale)};
}

inline Mat2 random_mat2(std::mt19937_64& g, double scale = 1.0) {
  Mat2 m;
  m << random_complex(g, scale), random_complex(g, scale),
       random_complex(g, scale), random_complex(g, scale);
  return m;
}

inline Eigen::MatrixXcd random_matrix(std::mt19937_64& g, int rows, int cols, double scale = 1.0) {
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = random_complex(g, scale);
  return m;
}

/// The hand-checked one-pole datum: background (0,0,1), pole i, spin (1,0,i).
/// Its coupling matrix is [[1/2, -i/2], [-i/2, -1/2]], B_1 A_1 = 0, and the
/// field profile is m(x) = (2x, 0, x^2 - 1) / (x^2 + 1) at every time.
inline RationalData static_soliton() {
  RationalData d;
  d.m0 = {0, 0, 1};
  d.poles = {Complex(0, 1)};
  d.spins = {{Complex(1, 0), Complex(0, 0), Complex(0, 1)}};
  return d;
}

inline Eigen::Vector3d static_profile(double x) {
  const double den = x * x + 1;
  return {2 * x / den, 0, (x * x - 1) / den};
}

/// Deterministic validated two-pole data used across the suites.
inline RationalData valid_pair_datum(std::uint64_t seed) {
  auto g = rng(seed);
  return random_valid_data(g, 2);
}

}  // namespace hwm::test
