#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hwm/data.hpp"

namespace hwm {

/// Scalar pair (alpha, beta) factoring a traceless null 2x2 matrix as
///
///   A = diag(alpha, beta) * ones(2,2) * diag(beta, -alpha)
///     = [[alpha beta, -alpha^2], [beta^2, -alpha beta]].
///
/// For the canonical pair of a null spin s this reproduces s . sigma, with
/// -alpha^2 = s1 - i s2, beta^2 = s1 + i s2 and alpha beta = s3.
struct HalfSpinPair {
  Complex alpha{}, beta{};
};

inline HalfSpinPair operator-(const HalfSpinPair& p) { return {-p.alpha, -p.beta}; }

/// Canonical pair without the nullity check. Branch rule: alpha is the
/// principal square root of -s1 + i s2; when alpha is nonzero, beta = s3 /
/// alpha so that alpha beta = s3 holds exactly; otherwise beta is the
/// principal square root of s1 + i s2. Principal roots alone can violate
/// alpha beta = s3 by a sign, hence the division.
inline HalfSpinPair canonical_halfspins_unchecked(const ComplexSpin& s) {
  const Complex alpha = std::sqrt(-s.s1 + kImag * s.s2);
  if (std::abs(alpha) > 1e-12) return {alpha, s.s3 / alpha};
  return {alpha, std::sqrt(s.s1 + kImag * s.s2)};
}

/// Canonical pair of a null spin. Throws NotNull when |s.s| exceeds
/// tol * max(1, |s|^2).
inline HalfSpinPair canonical_halfspins(const ComplexSpin& s, double tol = kDefaultTol) {
  const double scale = std::max(1.0, hermitian_norm_sq(s));
  if (std::abs(dot(s, s)) > tol * scale)
    throw NotNull("canonical_halfspins: spin is not null, |s.s| = " +
                  std::to_string(std::abs(dot(s, s))));
  return canonical_halfspins_unchecked(s);
}

/// Canonical pair with the overall sign chosen closest to `previous`.
/// Used to follow a continuous lift along a trajectory: the pair of a given
/// spin is determined up to the joint sign flip (alpha, beta) -> -(alpha, beta),
/// and principal branch cuts flip it discretely.
inline HalfSpinPair continuous_halfspins(const ComplexSpin& s, const HalfSpinPair& previous) {
  HalfSpinPair p = canonical_halfspins_unchecked(s);
  const double keep = std::norm(p.alpha - previous.alpha) + std::norm(p.beta - previous.beta);
  const double flip = std::norm(p.alpha + previous.alpha) + std::norm(p.beta + previous.beta);
  return flip < keep ? -p : p;
}

inline Mat2 halfspin_to_matrix(const HalfSpinPair& p) {
  Mat2 m;
  m << p.alpha * p.beta, -p.alpha * p.alpha,
       p.beta * p.beta, -p.alpha * p.beta;
  return m;
}

/// Spin reconstructed from a pair; always null by construction.
inline ComplexSpin spin_from_halfspins(const HalfSpinPair& p) {
  const Complex a2 = p.alpha * p.alpha, b2 = p.beta * p.beta;
  return {(b2 - a2) / 2.0, (a2 + b2) / (2.0 * kImag), p.alpha * p.beta};
}

/// xi_j . e_k = beta_j alpha_k - alpha_j beta_k. Antisymmetric under j <-> k,
/// and squares to -2 s_j . s_k for canonical pairs.
inline Complex pairing(const HalfSpinPair& pj, const HalfSpinPair& pk) {
  return pj.beta * pk.alpha - pj.alpha * pk.beta;
}

/// Half-spin pairs of all sites plus the assembled diagonal matrices.
/// The 2N x 2N left matrix has diagonal (alpha_1, beta_1, alpha_2, beta_2, ...),
/// the right one (beta_1, -alpha_1, beta_2, -alpha_2, ...); sandwiching the
/// block-ones matrix between them yields the block diagonal of the A_j.
struct HalfSpinSet {
  std::vector<HalfSpinPair> pairs;

  int size() const { return static_cast<int>(pairs.size()); }

  Eigen::Vector2cd vec(int j) const { return {pairs[j].alpha, pairs[j].beta}; }
  Eigen::Vector2cd covec(int j) const { return {pairs[j].beta, -pairs[j].alpha}; }

  /// 2 x N matrix whose columns are the site vectors e_j.
  Eigen::MatrixXcd vec_matrix() const {
    Eigen::MatrixXcd m(2, size());
    for (int j = 0; j < size(); ++j) m.col(j) = vec(j);
    return m;
  }

  /// 2 x N matrix whose columns are the site covectors xi_j.
  Eigen::MatrixXcd covec_matrix() const {
    Eigen::MatrixXcd m(2, size());
    for (int j = 0; j < size(); ++j) m.col(j) = covec(j);
    return m;
  }

  Eigen::VectorXcd left_diagonal() const {
    Eigen::VectorXcd d(2 * size());
    for (int j = 0; j < size(); ++j) {
      d(2 * j) = pairs[j].alpha;
      d(2 * j + 1) = pairs[j].beta;
    }
    return d;
  }

  Eigen::VectorXcd right_diagonal() const {
    Eigen::VectorXcd d(2 * size());
    for (int j = 0; j < size(); ++j) {
      d(2 * j) = pairs[j].beta;
      d(2 * j + 1) = -pairs[j].alpha;
    }
    return d;
  }
};

inline Complex pairing(int j, int k, const HalfSpinSet& hs) {
  return pairing(hs.pairs[j], hs.pairs[k]);
}

/// Canonical half-spins of every site. Propagates NotNull.
inline HalfSpinSet assemble(const RationalData& data, double tol = kDefaultTol) {
  HalfSpinSet hs;
  hs.pairs.reserve(data.spins.size());
  for (const ComplexSpin& s : data.spins) hs.pairs.push_back(canonical_halfspins(s, tol));
  return hs;
}

// ---- constant matrices ----------------------------------------------------

/// 2 x 2 all-ones matrix; squares to twice itself.
inline Eigen::Matrix2d ones2() { return Eigen::Matrix2d::Ones(); }

/// 2n x 2 vertical stack of 2x2 identities. Contracting a block matrix from
/// both sides with it sums the 2x2 blocks.
inline Eigen::MatrixXd stacked_identity(int n) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * n, 2);
  for (int j = 0; j < n; ++j) t.block<2, 2>(2 * j, 0) = Eigen::Matrix2d::Identity();
  return t;
}

/// 2n x 2n block diagonal of all-ones 2x2 blocks.
inline Eigen::MatrixXd block_ones(int n) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) h.block<2, 2>(2 * j, 2 * j) = Eigen::Matrix2d::Ones();
  return h;
}

// ---- doubled matrices ------------------------------------------------------

/// N x N matrix acting blockwise on stacks of 2x2 blocks. Stored by its base;
/// the 2N x 2N realization (entry u_jk replaced by u_jk * I_2) is materialized
/// only where tests need the literal matrix. The map U -> [U] is an algebra
/// homomorphism and [U] commutes with every block-constant diagonal.
struct DoubledMatrix {
  Eigen::MatrixXcd base;

  Eigen::MatrixXcd materialize() const {
    const int n = static_cast<int>(base.rows());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        m(2 * j, 2 * k) = base(j, k);
        m(2 * j + 1, 2 * k + 1) = base(j, k);
      }
    return m;
  }
};

inline DoubledMatrix doubled(const Eigen::MatrixXcd& u) { return {u}; }

/// Image of a 2N x k stack of 2-row blocks under a doubled matrix:
/// block_j(out) = sum_k base(j, k) block_k(in).
inline Eigen::MatrixXcd apply_doubled(const Eigen::MatrixXcd& base,
                                      const Eigen::MatrixXcd& stacked) {
  const int n = static_cast<int>(base.rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(stacked.rows(), stacked.cols());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      out.middleRows(2 * j, 2) += base(j, k) * stacked.middleRows(2 * k, 2);
  return out;
}

}  // namespace hwm
