#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "hwm/constraints.hpp"
#include "hwm/halfspin.hpp"

namespace hwm {

/// Lax pair of the pole/spin system in half-spin form:
///
///   L_jj = xdot_j,   L_jk = (xi_j . e_k) / (x_j - x_k),
///   B_jj = 0,        B_jk = (xi_j . e_k) / (x_j - x_k)^2.
///
/// B is antisymmetric (the pairing is antisymmetric and the denominator is
/// even), and along the flow dL/dt = [B, L], so the spectrum of L is
/// conserved.
struct LaxPair {
  Eigen::MatrixXcd L;
  Eigen::MatrixXcd B;
  Eigen::VectorXcd velocities;
};

/// Assembles the pair from raw parts with no constraint checks.
inline LaxPair lax_from_parts(const std::vector<Complex>& poles,
                              const std::vector<Complex>& velocities,
                              const std::vector<HalfSpinPair>& pairs) {
  const int n = static_cast<int>(poles.size());
  LaxPair lp;
  lp.L = Eigen::MatrixXcd::Zero(n, n);
  lp.B = Eigen::MatrixXcd::Zero(n, n);
  lp.velocities = Eigen::VectorXcd::Zero(n);
  for (int j = 0; j < n; ++j) {
    lp.velocities(j) = velocities[j];
    lp.L(j, j) = velocities[j];
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const Complex p = pairing(pairs[j], pairs[k]);
      const Complex dx = poles[j] - poles[k];
      lp.L(j, k) = p / dx;
      lp.B(j, k) = p / (dx * dx);
    }
  }
  return lp;
}

/// Lax pair of a constraint-valid datum; velocities come from the eigen
/// relation B_j A_j = b_j A_j and propagate NotProportional when it fails.
inline LaxPair build_lax(const RationalData& d, double tol = kDefaultTol) {
  const HalfSpinSet hs = assemble(d, tol);
  std::vector<Complex> vel(d.size());
  for (int j = 0; j < d.size(); ++j) vel[j] = initial_velocity(d, j, tol);
  return lax_from_parts(d.poles, vel, hs.pairs);
}

/// Sign bookkeeping between the half-spin entries and the square-root form:
/// eps(k, j) = (xi_j . e_k) / sqrt(-2 s_j . s_k), principal root. Every
/// defined entry is unimodular. Entries with s_j . s_k = 0 off the diagonal
/// stay undefined (NaN) and are flagged in `defined`.
struct MatsunoSigns {
  Eigen::MatrixXcd eps;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> defined;

  int defined_count() const {
    int c = 0;
    for (int j = 0; j < defined.rows(); ++j)
      for (int k = 0; k < defined.cols(); ++k)
        if (defined(j, k)) ++c;
    return c;
  }
};

inline MatsunoSigns matsuno_consistency(const RationalData& d, double tol = kDefaultTol) {
  const int n = d.size();
  const HalfSpinSet hs = assemble(d, tol);
  MatsunoSigns ms;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ms.eps = Eigen::MatrixXcd::Constant(n, n, Complex(nan, nan));
  ms.defined = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const Complex prod = dot(d.spins[j], d.spins[k]);
      const double scale = std::max(1.0, spin_norm(d.spins[j]) * spin_norm(d.spins[k]));
      if (std::abs(prod) < tol * scale) continue;  // orthogonal spins, entry undefined
      ms.eps(k, j) = pairing(j, k, hs) / std::sqrt(-2.0 * prod);
      ms.defined(k, j) = true;
    }
  return ms;
}

/// [Tr L, Tr L^2, ..., Tr L^kmax].
inline std::vector<Complex> conserved_traces(const Eigen::MatrixXcd& l, int kmax) {
  std::vector<Complex> traces;
  traces.reserve(kmax);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(l.rows(), l.cols());
  for (int k = 1; k <= kmax; ++k) {
    p = (p * l).eval();
    traces.push_back(p.trace());
  }
  return traces;
}

/// Elementary symmetric functions e_1..e_N of the eigenvalues, computed from
/// power traces via Newton's identities. The characteristic polynomial is
/// z^N - e_1 z^{N-1} + e_2 z^{N-2} - ... ; no eigenvalue ordering involved.
inline std::vector<Complex> char_poly_coefficients(const Eigen::MatrixXcd& l) {
  const int n = static_cast<int>(l.rows());
  const std::vector<Complex> p = conserved_traces(l, n);
  std::vector<Complex> e(n + 1);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    Complex acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += ((i % 2) ? 1.0 : -1.0) * e[k - i] * p[i - 1];
    e[k] = acc / static_cast<double>(k);
  }
  return {e.begin() + 1, e.end()};
}

namespace detail {

template <class State>
std::vector<HalfSpinPair> state_pairs(const State& st, std::vector<HalfSpinPair>* follow) {
  if constexpr (requires { st.pairs; }) {
    (void)follow;
    return st.pairs;
  } else {
    std::vector<HalfSpinPair> pairs(st.s.size());
    for (std::size_t j = 0; j < st.s.size(); ++j)
      pairs[j] = follow && !follow->empty() ? continuous_halfspins(st.s[j], (*follow)[j])
                                            : canonical_halfspins_unchecked(st.s[j]);
    if (follow) *follow = pairs;
    return pairs;
  }
}

}  // namespace detail

/// Central-difference defect of the Lax equation along a uniformly sampled
/// trajectory: max over interior samples of
///
///   || (L(t+h) - L(t-h)) / (2h) - [B(t), L(t)] ||_F.
///
/// Second order in h for trajectories of the pole/spin system with null
/// spins. States may carry half-spin pairs directly (preferred, the lift is
/// already continuous) or spins, which are lifted with step-to-step branch
/// continuity.
template <class StateSeq>
inline double lax_residual(const StateSeq& states, double h) {
  const int m = static_cast<int>(states.size());
  if (m < 3) throw Error("lax_residual: need at least three samples");
  std::vector<HalfSpinPair> follow;
  std::vector<LaxPair> lax;
  lax.reserve(m);
  for (const auto& st : states) {
    const auto pairs = detail::state_pairs(st, &follow);
    lax.push_back(lax_from_parts(st.x, st.v, pairs));
  }
  double worst = 0;
  for (int i = 1; i + 1 < m; ++i) {
    const Eigen::MatrixXcd dl = (lax[i + 1].L - lax[i - 1].L) / (2.0 * h);
    const Eigen::MatrixXcd bracket = lax[i].B * lax[i].L - lax[i].L * lax[i].B;
    worst = std::max(worst, (dl - bracket).norm());
  }
  return worst;
}

}  // namespace hwm
