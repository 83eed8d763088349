#include <catch2/catch_amalgamated.hpp>

#include "hwm/halfspin.hpp"
#include "test_helpers.hpp"

using namespace hwm;

namespace {
const double kRoot2 = std::sqrt(2.0);
}

TEST_CASE("canonical pairs of the hand-worked spins") {
  const HalfSpinPair a = canonical_halfspins({1, kImag, 0});
  CHECK(std::abs(a.alpha - kImag * kRoot2) < 1e-14);
  CHECK(std::abs(a.beta) < 1e-14);

  const HalfSpinPair b = canonical_halfspins({1, -kImag, 0});
  CHECK(std::abs(b.alpha) < 1e-14);
  CHECK(std::abs(b.beta - kRoot2) < 1e-14);

  const HalfSpinPair c = canonical_halfspins({1, 0, kImag});
  CHECK(std::abs(c.alpha * c.alpha + 1.0) < 1e-14);     // alpha^2 = -1
  CHECK(std::abs(c.alpha * c.beta - kImag) < 1e-14);    // alpha beta = s3
  CHECK((halfspin_to_matrix(c) - spin_to_matrix({1, 0, kImag})).norm() < 1e-13);
}

TEST_CASE("canonical pairs satisfy the defining branch relations") {
  auto g = test::rng(41);
  for (int i = 0; i < 300; ++i) {
    const ComplexSpin s = random_null_spin(g, 1.5);
    const HalfSpinPair p = canonical_halfspins(s, 1e-9);
    CHECK(std::abs(-p.alpha * p.alpha - (s.s1 - kImag * s.s2)) < 1e-10);
    CHECK(std::abs(p.beta * p.beta - (s.s1 + kImag * s.s2)) < 1e-10);
    CHECK(std::abs(p.alpha * p.beta - s.s3) < 1e-10);
    CHECK((halfspin_to_matrix(p) - spin_to_matrix(s)).norm() < 1e-10);
  }
}

TEST_CASE("canonical_halfspins rejects non-null spins") {
  CHECK_THROWS_AS(canonical_halfspins({1, 0, 0}), NotNull);
}

TEST_CASE("halfspin_to_matrix structure") {
  CHECK(halfspin_to_matrix({0, 0}).norm() == 0.0);

  Mat2 expected;
  expected << 0, 2, 0, 0;
  CHECK((halfspin_to_matrix({kImag * kRoot2, 0}) - expected).norm() < 1e-14);

  auto g = test::rng(43);
  for (int i = 0; i < 50; ++i) {
    const HalfSpinPair p{test::random_complex(g), test::random_complex(g)};
    CHECK(std::abs(halfspin_to_matrix(p).trace()) < 1e-14);
  }
}

TEST_CASE("pairing values and antisymmetry") {
  const HalfSpinPair pa = canonical_halfspins({1, kImag, 0});
  const HalfSpinPair pb = canonical_halfspins({1, -kImag, 0});
  CHECK(std::abs(pairing(pa, pa)) == 0.0);
  CHECK(std::abs(pairing(pa, pb) + 2.0 * kImag) < 1e-14);
  // (xi_a . e_b)^2 = -2 s_a . s_b with s_a . s_b = 2
  CHECK(std::abs(pairing(pa, pb) * pairing(pa, pb) + 4.0) < 1e-13);

  auto g = test::rng(47);
  for (int i = 0; i < 300; ++i) {
    const ComplexSpin sj = random_null_spin(g), sk = random_null_spin(g);
    const HalfSpinPair pj = canonical_halfspins(sj, 1e-9), pk = canonical_halfspins(sk, 1e-9);
    const Complex w = pairing(pj, pk);
    CHECK(std::abs(w + pairing(pk, pj)) < 1e-13);
    CHECK(std::abs(w * w + 2.0 * dot(sj, sk)) < 1e-12);
  }
}

TEST_CASE("doubled matrices form an algebra and commute with block constants") {
  auto g = test::rng(53);
  CHECK((doubled(Eigen::MatrixXcd::Identity(4, 4)).materialize() -
         Eigen::MatrixXcd::Identity(8, 8))
            .norm() == 0.0);

  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXcd a = test::random_matrix(g, 3, 3);
    const Eigen::MatrixXcd b = test::random_matrix(g, 3, 3);
    CHECK((doubled(a * b).materialize() - doubled(a).materialize() * doubled(b).materialize())
              .norm() < 1e-12);

    const Mat2 c = test::random_mat2(g);
    Eigen::MatrixXcd blocks = Eigen::MatrixXcd::Zero(6, 6);
    for (int j = 0; j < 3; ++j) blocks.block<2, 2>(2 * j, 2 * j) = c;
    const Eigen::MatrixXcd da = doubled(a).materialize();
    CHECK((blocks * da - da * blocks).norm() < 1e-12);
  }
}

TEST_CASE("apply_doubled matches the materialized product") {
  auto g = test::rng(59);
  const Eigen::MatrixXcd u = test::random_matrix(g, 4, 4);
  const Eigen::MatrixXcd stacked = test::random_matrix(g, 8, 2);
  CHECK((apply_doubled(u, stacked) - doubled(u).materialize() * stacked).norm() < 1e-13);
}

TEST_CASE("assemble produces the interleaved diagonal matrices") {
  RationalData d;
  d.m0 = {0, 0, 1};
  d.poles = {Complex(0, 1)};
  d.spins = {{1, kImag, 0}};
  const HalfSpinSet hs = assemble(d);
  REQUIRE(hs.size() == 1);
  CHECK(std::abs(hs.left_diagonal()(0) - kImag * kRoot2) < 1e-14);
  CHECK(std::abs(hs.left_diagonal()(1)) < 1e-14);
  CHECK(std::abs(hs.right_diagonal()(0)) < 1e-14);
  CHECK(std::abs(hs.right_diagonal()(1) + kImag * kRoot2) < 1e-14);
}

TEST_CASE("sandwiching the block-ones matrix reproduces the site matrices") {
  auto g = test::rng(61);
  RationalData d = random_null_data(g, 3);
  const HalfSpinSet hs = assemble(d, 1e-9);
  const int n = hs.size();

  const Eigen::MatrixXcd sandwich = hs.left_diagonal().asDiagonal() * block_ones(n) *
                                    hs.right_diagonal().asDiagonal().toDenseMatrix();
  // block diagonal of the A_j
  for (int j = 0; j < n; ++j)
    CHECK((sandwich.block<2, 2>(2 * j, 2 * j) - spin_to_matrix(d.spins[j])).norm() < 1e-10);
  // off-diagonal blocks are E_j H F_k, not zero in general; the T-contraction
  // collapses the block diagonal to the plain sum
  const Eigen::MatrixXd t = stacked_identity(n);
  Mat2 total = Mat2::Zero();
  for (int j = 0; j < n; ++j) total += spin_to_matrix(d.spins[j]);
  Eigen::MatrixXcd diag_only = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j)
    diag_only.block<2, 2>(2 * j, 2 * j) = sandwich.block<2, 2>(2 * j, 2 * j);
  CHECK((t.transpose() * diag_only * t - total).norm() < 1e-10);
}

TEST_CASE("assemble on an empty datum") {
  RationalData d;
  d.m0 = {0, 0, 1};
  const HalfSpinSet hs = assemble(d);
  CHECK(hs.size() == 0);
  const Eigen::MatrixXd t = stacked_identity(0);
  CHECK((t.transpose() * block_ones(0) * t).norm() == 0.0);
}

TEST_CASE("constant matrices") {
  CHECK((ones2() * ones2() - 2 * ones2()).norm() == 0.0);
  const Eigen::MatrixXd t = stacked_identity(5);
  CHECK((t.transpose() * t - 5.0 * Eigen::Matrix2d::Identity()).norm() == 0.0);
}

TEST_CASE("concatenation identity H D1 D2 H = (d1 . d2) H") {
  auto g = test::rng(67);
  for (int i = 0; i < 300; ++i) {
    const Complex d11 = test::random_complex(g), d12 = test::random_complex(g);
    const Complex d21 = test::random_complex(g), d22 = test::random_complex(g);
    Mat2 d1 = Mat2::Zero(), d2 = Mat2::Zero();
    d1(0, 0) = d11;
    d1(1, 1) = d12;
    d2(0, 0) = d21;
    d2(1, 1) = d22;
    const Mat2 h = ones2().cast<Complex>();
    CHECK((h * d1 * d2 * h - (d11 * d21 + d12 * d22) * h).norm() < 1e-13);
  }
}

TEST_CASE("separation predicate: the mixed sum vanishes only at zero") {
  auto g = test::rng(71);
  const Mat2 h = ones2().cast<Complex>();
  for (int i = 0; i < 300; ++i) {
    const HalfSpinPair p{test::random_complex(g), test::random_complex(g)};
    const Complex gamma = test::random_complex(g), delta = test::random_complex(g);
    Mat2 k1 = Mat2::Zero(), k2 = Mat2::Zero();
    k1(0, 0) = gamma;
    k1(1, 1) = delta;
    k2(0, 0) = delta;
    k2(1, 1) = -gamma;
    Mat2 e = Mat2::Zero(), f = Mat2::Zero();
    e(0, 0) = p.alpha;
    e(1, 1) = p.beta;
    f(0, 0) = p.beta;
    f(1, 1) = -p.alpha;

    const Mat2 expr = k1 * h * f + e * h * k2;
    const double pair_scale = std::sqrt(std::norm(p.alpha) + std::norm(p.beta));
    const double coeff_scale = std::sqrt(std::norm(gamma) + std::norm(delta));
    if (coeff_scale > 1e-3 && pair_scale > 1e-3)
      CHECK(expr.norm() > 1e-9 * coeff_scale * pair_scale);
  }
}

TEST_CASE("continuous lift flips the sign when the canonical branch jumps") {
  auto g = test::rng(73);
  const ComplexSpin s = random_null_spin(g);
  const HalfSpinPair p = canonical_halfspins(s, 1e-9);
  const HalfSpinPair q = continuous_halfspins(s, -p);
  CHECK(std::abs(q.alpha + p.alpha) < 1e-14);
  CHECK(std::abs(q.beta + p.beta) < 1e-14);
}
