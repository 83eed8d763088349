#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hwm/constraints.hpp"
#include "hwm/halfspin.hpp"

namespace hwm {

/// Data generation helpers for the command-line tool and the test suites.
/// Multi-pole construction is best effort: random seeding plus Gauss-Newton
/// polish of the constraint equations, followed by full validation.

/// Null spin from a uniformly random half-spin pair; dot(s, s) = 0 exactly
/// up to roundoff by construction.
inline ComplexSpin random_null_spin(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const HalfSpinPair p{scale * Complex(u(rng), u(rng)), scale * Complex(u(rng), u(rng))};
  return spin_from_halfspins(p);
}

/// Well-separated random poles in a band of the upper half-plane.
inline std::vector<Complex> random_poles(std::mt19937_64& rng, int n, double min_separation = 1.0) {
  std::uniform_real_distribution<double> re(-2.5, 2.5), im(0.7, 1.9);
  std::vector<Complex> poles;
  while (static_cast<int>(poles.size()) < n) {
    const Complex cand(re(rng), im(rng));
    bool ok = true;
    for (const Complex& p : poles) ok = ok && std::abs(cand - p) >= min_separation;
    if (ok) poles.push_back(cand);
  }
  return poles;
}

/// Random datum with null spins and sane pole geometry. Not constraint-valid
/// in general; useful wherever only the algebraic structure matters.
inline RationalData random_null_data(std::mt19937_64& rng, int n) {
  RationalData d;
  d.m0 = {0, 0, 1};
  d.poles = random_poles(rng, n);
  for (int j = 0; j < n; ++j) d.spins.push_back(random_null_spin(rng));
  return d;
}

struct SolveOptions {
  int max_iterations = 80;
  int max_restarts = 40;
  double target = 1e-13;    // stop when max |residual| falls below this
  double fd_step = 1e-6;    // central-difference step for the Jacobian
  double validate_tol = kDefaultTol;
};

namespace detail {

// Constraint residuals for fixed poles: per site the nullity s_j . s_j and
// the bilinear anticommutation condition s_j . w_j, where B_j = w_j . sigma.
inline Eigen::VectorXd constraint_residual(const std::vector<Complex>& poles,
                                           const ComplexSpin& m0,
                                           const std::vector<ComplexSpin>& s) {
  const int n = static_cast<int>(poles.size());
  Eigen::VectorXd f(4 * n);
  for (int j = 0; j < n; ++j) {
    ComplexSpin w = m0;
    w = w + (1.0 / (poles[j] - std::conj(poles[j]))) * conj(s[j]);
    for (int k = 0; k < n; ++k) {
      if (k == j) {
        continue;
      }
      w = w + (1.0 / (poles[j] - std::conj(poles[k]))) * conj(s[k]);
      w = w + (1.0 / (poles[j] - poles[k])) * s[k];
    }
    const Complex nullity = dot(s[j], s[j]);
    const Complex coupling = dot(s[j], w);
    f(4 * j) = nullity.real();
    f(4 * j + 1) = nullity.imag();
    f(4 * j + 2) = coupling.real();
    f(4 * j + 3) = coupling.imag();
  }
  return f;
}

inline std::vector<ComplexSpin> unpack_spins(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size()) / 6;
  std::vector<ComplexSpin> s(n);
  for (int j = 0; j < n; ++j)
    s[j] = {Complex(u(6 * j), u(6 * j + 1)), Complex(u(6 * j + 2), u(6 * j + 3)),
            Complex(u(6 * j + 4), u(6 * j + 5))};
  return s;
}

inline Eigen::VectorXd pack_spins(const std::vector<ComplexSpin>& s) {
  Eigen::VectorXd u(6 * s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    u(6 * j) = s[j].s1.real();
    u(6 * j + 1) = s[j].s1.imag();
    u(6 * j + 2) = s[j].s2.real();
    u(6 * j + 3) = s[j].s2.imag();
    u(6 * j + 4) = s[j].s3.real();
    u(6 * j + 5) = s[j].s3.imag();
  }
  return u;
}

}  // namespace detail

/// Solves the constraint equations for spins at the given poles by damped
/// Gauss-Newton with a central-difference Jacobian. The system is
/// underdetermined (4N real equations, 6N real unknowns); each step takes the
/// minimal-norm correction. Restarts from fresh random seeds until the
/// polished datum passes full validation. Throws Error when every restart
/// fails.
inline RationalData solve_constraints(const std::vector<Complex>& poles, const ComplexSpin& m0,
                                      std::mt19937_64& rng, const SolveOptions& opts = {}) {
  const int n = static_cast<int>(poles.size());
  const Eigen::Vector3d m0_re(m0.s1.real(), m0.s2.real(), m0.s3.real());
  const Eigen::Matrix3d rot = rotation_from_axis3(m0_re);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI), jitter(-0.25, 0.25);

  auto residual = [&](const Eigen::VectorXd& u) {
    return detail::constraint_residual(poles, m0, detail::unpack_spins(u));
  };

  for (int attempt = 0; attempt < opts.max_restarts; ++attempt) {
    // Seed each site with a one-pole solution of its own pole, jittered.
    std::vector<ComplexSpin> seed(n);
    for (int j = 0; j < n; ++j) {
      const double q = poles[j].imag(), phi = angle(rng);
      Eigen::Vector3d re = rot * Eigen::Vector3d(q * std::cos(phi), q * std::sin(phi), 0);
      Eigen::Vector3d im = rot * Eigen::Vector3d(0, 0, q);
      seed[j] = {Complex(re.x() + jitter(rng), im.x() + jitter(rng)),
                 Complex(re.y() + jitter(rng), im.y() + jitter(rng)),
                 Complex(re.z() + jitter(rng), im.z() + jitter(rng))};
    }

    Eigen::VectorXd u = detail::pack_spins(seed);
    Eigen::VectorXd f = residual(u);
    bool converged = false;
    for (int it = 0; it < opts.max_iterations && !converged; ++it) {
      Eigen::MatrixXd jac(f.size(), u.size());
      for (int c = 0; c < u.size(); ++c) {
        Eigen::VectorXd up = u, dn = u;
        up(c) += opts.fd_step;
        dn(c) -= opts.fd_step;
        jac.col(c) = (residual(up) - residual(dn)) / (2 * opts.fd_step);
      }
      const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-f);
      double damping = 1.0;
      for (int ls = 0; ls < 12; ++ls) {
        const Eigen::VectorXd cand = u + damping * step;
        const Eigen::VectorXd fc = residual(cand);
        if (fc.norm() < f.norm() || damping < 1e-3) {
          u = cand;
          f = fc;
          break;
        }
        damping /= 2;
      }
      converged = f.lpNorm<Eigen::Infinity>() < opts.target;
    }
    if (!converged) continue;

    RationalData d;
    d.m0 = m0;
    d.poles = poles;
    d.spins = detail::unpack_spins(u);
    bool sane = true;
    for (const ComplexSpin& s : d.spins) sane = sane && spin_norm(s) > 0.05 && spin_norm(s) < 50;
    if (sane && validate(d, opts.validate_tol).valid) return d;
  }
  throw Error("solve_constraints: no valid datum found after all restarts");
}

/// Random validated datum with n poles; background along the third axis.
inline RationalData random_valid_data(std::mt19937_64& rng, int n) {
  if (n == 1) {
    std::uniform_real_distribution<double> re(-1.5, 1.5), im(0.7, 1.6), angle(0.0, 2 * M_PI);
    return single_soliton(Complex(re(rng), im(rng)), ComplexSpin{0, 0, 1}, angle(rng));
  }
  for (int attempt = 0; attempt < 20; ++attempt) {
    const std::vector<Complex> poles = random_poles(rng, n);
    try {
      return solve_constraints(poles, ComplexSpin{0, 0, 1}, rng);
    } catch (const Error&) {
      continue;
    }
  }
  throw Error("random_valid_data: constraint solver kept failing");
}

}  // namespace hwm
