#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "hwm/evolution.hpp"

namespace hwm {

/// Brute-force reference dynamics: classical fixed-step RK4 on the coupled
/// pole/velocity/spin system
///
///   xdot_j = v_j,
///   vdot_j = -4 sum_{k != j} (s_j . s_k) / (x_j - x_k)^3,
///   sdot_j = 2i sum_{k != j} (s_j x s_k) / (x_j - x_k)^2,
///
/// and on the equivalent half-spin system, entirely independent of the
/// resolvent formula it is used to check.

struct OracleOptions {
  double separation_guard = 1e-7;  // abort when poles approach (PoleCollision)
  double boundary_guard = 1e-7;    // abort when Im x_j drops (BoundaryApproach)
};

struct SpinCMState {
  double t = 0;
  std::vector<Complex> x;
  std::vector<Complex> v;
  std::vector<ComplexSpin> s;

  int size() const { return static_cast<int>(x.size()); }
};

struct HalfSpinState {
  double t = 0;
  std::vector<Complex> x;
  std::vector<Complex> v;
  std::vector<HalfSpinPair> pairs;

  int size() const { return static_cast<int>(x.size()); }

  std::vector<ComplexSpin> spins() const {
    std::vector<ComplexSpin> s(pairs.size());
    for (std::size_t j = 0; j < pairs.size(); ++j) s[j] = spin_from_halfspins(pairs[j]);
    return s;
  }
};

namespace detail {

inline void require_separated(const std::vector<Complex>& x, double guard) {
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = j + 1; k < x.size(); ++k)
      if (std::abs(x[j] - x[k]) < guard)
        throw PoleCollision("oracle: poles closer than the separation guard");
}

inline void require_off_axis(const std::vector<Complex>& x, double guard) {
  for (const Complex& xj : x)
    if (xj.imag() < guard)
      throw BoundaryApproach("oracle: pole too close to the real axis");
}

inline std::vector<Complex> pole_acceleration(const std::vector<Complex>& x,
                                              const std::vector<ComplexSpin>& s) {
  const std::size_t n = x.size();
  std::vector<Complex> acc(n, Complex(0, 0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const Complex dx = x[j] - x[k];
      acc[j] += -4.0 * dot(s[j], s[k]) / (dx * dx * dx);
    }
  return acc;
}

template <class F>
Eigen::VectorXcd rk4_step(const F& f, const Eigen::VectorXcd& y, double h) {
  const Eigen::VectorXcd k1 = f(y);
  const Eigen::VectorXcd k2 = f(y + (h / 2) * k1);
  const Eigen::VectorXcd k3 = f(y + (h / 2) * k2);
  const Eigen::VectorXcd k4 = f(y + h * k3);
  return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

inline int step_count(double t1, double h) {
  if (!(h > 0) || !(t1 > 0)) throw Error("oracle: need t1 > 0 and h > 0");
  return std::max(1, static_cast<int>(std::llround(t1 / h)));
}

// flat layout of the spin system: [x(n), v(n), s1 s2 s3 per site]
inline Eigen::VectorXcd pack(const SpinCMState& st) {
  const int n = st.size();
  Eigen::VectorXcd y(5 * n);
  for (int j = 0; j < n; ++j) {
    y(j) = st.x[j];
    y(n + j) = st.v[j];
    y(2 * n + 3 * j) = st.s[j].s1;
    y(2 * n + 3 * j + 1) = st.s[j].s2;
    y(2 * n + 3 * j + 2) = st.s[j].s3;
  }
  return y;
}

inline SpinCMState unpack(double t, const Eigen::VectorXcd& y) {
  const int n = static_cast<int>(y.size()) / 5;
  SpinCMState st;
  st.t = t;
  st.x.resize(n);
  st.v.resize(n);
  st.s.resize(n);
  for (int j = 0; j < n; ++j) {
    st.x[j] = y(j);
    st.v[j] = y(n + j);
    st.s[j] = {y(2 * n + 3 * j), y(2 * n + 3 * j + 1), y(2 * n + 3 * j + 2)};
  }
  return st;
}

}  // namespace detail

/// Time derivative of the pole/velocity/spin state. Throws PoleCollision
/// when the separation guard trips.
inline SpinCMState rhs_spin_cm(const SpinCMState& st, const OracleOptions& opts = {}) {
  detail::require_separated(st.x, opts.separation_guard);
  const int n = st.size();
  SpinCMState d;
  d.t = st.t;
  d.x = st.v;
  d.v = detail::pole_acceleration(st.x, st.s);
  d.s.assign(n, ComplexSpin{});
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const Complex dx = st.x[j] - st.x[k];
      d.s[j] = d.s[j] + (2.0 * kImag / (dx * dx)) * cross(st.s[j], st.s[k]);
    }
  return d;
}

/// Half-spin rates alpha_j' = sum_k (xi_j . e_k) / (x_j - x_k)^2 alpha_k and
/// the same matrix acting on beta.
inline std::vector<HalfSpinPair> rhs_halfspin_pairs(const HalfSpinState& st) {
  const int n = st.size();
  std::vector<HalfSpinPair> d(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const Complex dx = st.x[j] - st.x[k];
      const Complex w = pairing(st.pairs[j], st.pairs[k]) / (dx * dx);
      d[j].alpha += w * st.pairs[k].alpha;
      d[j].beta += w * st.pairs[k].beta;
    }
  return d;
}

/// Same rates written through the antisymmetry of the pairing,
/// alpha_j' = sum_k -(xi_k . e_j) / (x_j - x_k)^2 alpha_k.
inline std::vector<HalfSpinPair> rhs_halfspin_pairs_via_antisymmetry(const HalfSpinState& st) {
  const int n = st.size();
  std::vector<HalfSpinPair> d(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const Complex dx = st.x[j] - st.x[k];
      const Complex w = -pairing(st.pairs[k], st.pairs[j]) / (dx * dx);
      d[j].alpha += w * st.pairs[k].alpha;
      d[j].beta += w * st.pairs[k].beta;
    }
  return d;
}

/// Constraint-checked initial state: velocities from the eigen relation.
inline SpinCMState initial_state(const RationalData& d, double tol = kDefaultTol) {
  SpinCMState st;
  st.t = 0;
  st.x = d.poles;
  st.s = d.spins;
  st.v.resize(d.size());
  for (int j = 0; j < d.size(); ++j) st.v[j] = initial_velocity(d, j, tol);
  return st;
}

/// Raw integration from an arbitrary state; no validation, guards only.
inline std::vector<SpinCMState> integrate_spin_cm_from(const SpinCMState& initial, double t1,
                                                       double h, const OracleOptions& opts = {}) {
  const int n_steps = detail::step_count(t1, h);
  const double dt = t1 / n_steps;
  auto f = [&](const Eigen::VectorXcd& y) {
    return detail::pack(rhs_spin_cm(detail::unpack(0, y), opts));
  };
  std::vector<SpinCMState> out;
  out.reserve(n_steps + 1);
  out.push_back(initial);
  Eigen::VectorXcd y = detail::pack(initial);
  for (int i = 1; i <= n_steps; ++i) {
    y = detail::rk4_step(f, y, dt);
    SpinCMState st = detail::unpack(initial.t + i * dt, y);
    detail::require_off_axis(st.x, opts.boundary_guard);
    out.push_back(st);
  }
  return out;
}

struct SpinCMTrajectory {
  std::vector<SpinCMState> states;
  /// Step-halving estimate of the global error at t1, |y_h - y_{h/2}| / 15.
  double richardson_error = 0;
};

/// Integrates a validated datum on [0, t1] at uniform step h and reports a
/// Richardson error estimate from an internal run at h/2.
inline SpinCMTrajectory integrate_spin_cm(const RationalData& d, double t1, double h,
                                          double tol = kDefaultTol,
                                          const OracleOptions& opts = {}) {
  const ConstraintReport rep = validate(d, tol);
  if (!rep.valid) throw NotProportional("integrate_spin_cm: datum fails validation");
  const SpinCMState st0 = initial_state(d, tol);
  SpinCMTrajectory traj;
  traj.states = integrate_spin_cm_from(st0, t1, h, opts);
  const std::vector<SpinCMState> fine = integrate_spin_cm_from(st0, t1, h / 2, opts);
  traj.richardson_error =
      (detail::pack(traj.states.back()) - detail::pack(fine.back())).norm() / 15.0;
  return traj;
}

/// Integrates the half-spin system (poles and velocities as above, pairs by
/// the linear rate equation). The initial pairs are canonical.
inline std::vector<HalfSpinState> integrate_halfspin(const RationalData& d, double t1, double h,
                                                     double tol = kDefaultTol,
                                                     const OracleOptions& opts = {}) {
  const ConstraintReport rep = validate(d, tol);
  if (!rep.valid) throw NotProportional("integrate_halfspin: datum fails validation");
  const int n = d.size();
  const int n_steps = detail::step_count(t1, h);
  const double dt = t1 / n_steps;

  // flat layout: [x(n), v(n), alpha(n), beta(n)]
  auto unpack = [n](double t, const Eigen::VectorXcd& y) {
    HalfSpinState st;
    st.t = t;
    st.x.assign(y.data(), y.data() + n);
    st.v.assign(y.data() + n, y.data() + 2 * n);
    st.pairs.resize(n);
    for (int j = 0; j < n; ++j) st.pairs[j] = {y(2 * n + j), y(3 * n + j)};
    return st;
  };
  auto pack = [n](const HalfSpinState& st) {
    Eigen::VectorXcd y(4 * n);
    for (int j = 0; j < n; ++j) {
      y(j) = st.x[j];
      y(n + j) = st.v[j];
      y(2 * n + j) = st.pairs[j].alpha;
      y(3 * n + j) = st.pairs[j].beta;
    }
    return y;
  };
  auto f = [&](const Eigen::VectorXcd& y) {
    HalfSpinState st = unpack(0, y);
    detail::require_separated(st.x, opts.separation_guard);
    HalfSpinState rate;
    rate.x = st.v;
    rate.v = detail::pole_acceleration(st.x, st.spins());
    rate.pairs = rhs_halfspin_pairs(st);
    return pack(rate);
  };

  HalfSpinState st0;
  st0.t = 0;
  st0.x = d.poles;
  st0.pairs = assemble(d, tol).pairs;
  st0.v.resize(n);
  for (int j = 0; j < n; ++j) st0.v[j] = rep.sites[j].velocity;

  std::vector<HalfSpinState> out;
  out.reserve(n_steps + 1);
  out.push_back(st0);
  Eigen::VectorXcd y = pack(st0);
  for (int i = 1; i <= n_steps; ++i) {
    y = detail::rk4_step(f, y, dt);
    HalfSpinState st = unpack(i * dt, y);
    detail::require_off_axis(st.x, opts.boundary_guard);
    out.push_back(st);
  }
  return out;
}

struct Propagator {
  double t = 0;
  Eigen::MatrixXcd U;
};

/// Solves Udot = B(t) U, U(0) = I along a stored trajectory, by integrating
/// the half-spin system jointly with U at the trajectory's own step (so the
/// RK4 stages see a consistent B). Accepts trajectories from either oracle;
/// spin states seed the canonical half-spin lift at t = 0. Since B is
/// exactly antisymmetric, U stays complex orthogonal up to integration error.
template <class StateSeq>
inline std::vector<Propagator> integrate_propagator(const StateSeq& traj,
                                                    const OracleOptions& opts = {}) {
  if (traj.size() < 2) throw Error("integrate_propagator: need at least two samples");
  const auto& front = traj.front();
  const int n = front.size();
  const double h = traj[1].t - traj[0].t;

  HalfSpinState st0;
  st0.t = front.t;
  st0.x = front.x;
  st0.v = front.v;
  if constexpr (requires { front.pairs; }) {
    st0.pairs = front.pairs;
  } else {
    st0.pairs.resize(n);
    for (int j = 0; j < n; ++j) st0.pairs[j] = canonical_halfspins_unchecked(front.s[j]);
  }

  // flat layout: [x(n), v(n), alpha(n), beta(n), U(n*n)]
  const int base = 4 * n;
  auto f = [&](const Eigen::VectorXcd& y) {
    HalfSpinState st;
    st.x.assign(y.data(), y.data() + n);
    st.v.assign(y.data() + n, y.data() + 2 * n);
    st.pairs.resize(n);
    for (int j = 0; j < n; ++j) st.pairs[j] = {y(2 * n + j), y(3 * n + j)};
    detail::require_separated(st.x, opts.separation_guard);

    const std::vector<Complex> acc = detail::pole_acceleration(st.x, st.spins());
    const std::vector<HalfSpinPair> pr = rhs_halfspin_pairs(st);
    const LaxPair lp = lax_from_parts(st.x, st.v, st.pairs);
    const Eigen::Map<const Eigen::MatrixXcd> u(y.data() + base, n, n);
    const Eigen::MatrixXcd du = lp.B * u;

    Eigen::VectorXcd dy(base + n * n);
    for (int j = 0; j < n; ++j) {
      dy(j) = st.v[j];
      dy(n + j) = acc[j];
      dy(2 * n + j) = pr[j].alpha;
      dy(3 * n + j) = pr[j].beta;
    }
    Eigen::Map<Eigen::MatrixXcd>(dy.data() + base, n, n) = du;
    return dy;
  };

  Eigen::VectorXcd y(base + n * n);
  for (int j = 0; j < n; ++j) {
    y(j) = st0.x[j];
    y(n + j) = st0.v[j];
    y(2 * n + j) = st0.pairs[j].alpha;
    y(3 * n + j) = st0.pairs[j].beta;
  }
  Eigen::Map<Eigen::MatrixXcd>(y.data() + base, n, n) = Eigen::MatrixXcd::Identity(n, n);

  std::vector<Propagator> out;
  out.reserve(traj.size());
  out.push_back({st0.t, Eigen::MatrixXcd::Identity(n, n)});
  for (std::size_t i = 1; i < traj.size(); ++i) {
    y = detail::rk4_step(f, y, h);
    out.push_back({traj[i].t, Eigen::Map<const Eigen::MatrixXcd>(y.data() + base, n, n)});
  }
  return out;
}

inline double propagator_orthogonality_drift(const std::vector<Propagator>& series) {
  double worst = 0;
  for (const Propagator& p : series) {
    const int n = static_cast<int>(p.U.rows());
    worst = std::max(worst,
                     (p.U.transpose() * p.U - Eigen::MatrixXcd::Identity(n, n)).norm());
  }
  return worst;
}

struct CompareRow {
  double t = 0;
  double field_err = 0;
  double pole_err = 0;
  double spin_err = 0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  double sup_field_err = 0;
  double max_pole_err = 0;
  double max_spin_err = 0;
};

/// Sup-norm comparison of the resolvent-formula field against the oracle
/// trajectory on a spatial grid, with per-pole and per-residue errors after
/// nearest-neighbor matching. `stride` subsamples the trajectory.
inline CompareReport compare(const FrozenEvolution& fe, const std::vector<SpinCMState>& traj,
                             const std::vector<double>& xs, int stride = 1) {
  CompareReport rep;
  for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(stride)) {
    const SpinCMState& st = traj[i];
    CompareRow row;
    row.t = st.t;

    for (double x : xs) {
      Mat2 oracle = fe.background;
      for (int j = 0; j < st.size(); ++j) {
        const Mat2 a = spin_to_matrix(st.s[j]);
        oracle += a / (Complex(x, 0) - st.x[j]);
        oracle += a.adjoint().eval() / (Complex(x, 0) - std::conj(st.x[j]));
      }
      row.field_err = std::max(row.field_err, (field_matrix(fe, st.t, x) - oracle).norm());
    }

    const PoleSnapshot snap = poles_and_spins_at(fe, st.t);
    const Eigen::Map<const Eigen::VectorXcd> xo(st.x.data(), st.size());
    const std::vector<int> pick = match_by_proximity(xo, snap.poles);
    for (int j = 0; j < st.size(); ++j) {
      row.pole_err = std::max(row.pole_err, std::abs(st.x[j] - snap.poles(pick[j])));
      row.spin_err =
          std::max(row.spin_err, (spin_to_matrix(st.s[j]) - snap.spins[pick[j]]).norm());
    }

    rep.rows.push_back(row);
    rep.sup_field_err = std::max(rep.sup_field_err, row.field_err);
    rep.max_pole_err = std::max(rep.max_pole_err, row.pole_err);
    rep.max_spin_err = std::max(rep.max_spin_err, row.spin_err);
  }
  return rep;
}

}  // namespace hwm
