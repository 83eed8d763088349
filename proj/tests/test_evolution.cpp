#include <catch2/catch_amalgamated.hpp>

#include <unsupported/Eigen/FFT>

#include "hwm/evolution.hpp"
#include "hwm/ode_oracle.hpp"
#include "test_helpers.hpp"

using namespace hwm;

namespace {

FrozenEvolution freeze_null_datum(const RationalData& d, const Eigen::VectorXcd& vel) {
  return FrozenEvolution::freeze_with_velocities(d, vel, 1e-8);
}

}  // namespace

TEST_CASE("pi_minus at t = 0 is the plain partial-fraction sum") {
  auto g = test::rng(401);
  for (int n : {1, 3, 6}) {
    const RationalData d = random_null_data(g, n);
    const FrozenEvolution fe = freeze_null_datum(d, Eigen::VectorXcd::Zero(n));
    for (const Complex x : {Complex(0, 2), Complex(0.7, 0), Complex(-4.2, 0.5)}) {
      Mat2 direct = Mat2::Zero();
      for (int j = 0; j < n; ++j)
        direct += halfspin_to_matrix(fe.halfspins[j]) / (x - d.poles[j]);
      CHECK((pi_minus(fe, 0, x) - direct).norm() < 1e-12);
    }
  }
}

TEST_CASE("static soliton resolvent is time independent") {
  const FrozenEvolution fe = FrozenEvolution::freeze(test::static_soliton());
  const Mat2 a = spin_to_matrix(test::static_soliton().spins[0]);
  const Mat2 expected = a / (Complex(1, 0) - Complex(0, 1));
  for (double t : {0.0, 0.3, 1.0, 5.0}) {
    CHECK((pi_minus(fe, t, Complex(1, 0)) - expected).norm() < 1e-14);
    CHECK((pi_plus(fe, t, Complex(1, 0)) - expected.adjoint().eval()).norm() < 1e-14);
  }
}

TEST_CASE("pi_minus matches the oracle partial fractions away from t = 0") {
  const RationalData d = test::valid_pair_datum(1);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  const auto traj = integrate_spin_cm(d, 0.5, 1e-3).states;
  const SpinCMState& st = traj.back();
  Mat2 direct = Mat2::Zero();
  for (int j = 0; j < 2; ++j)
    direct += spin_to_matrix(st.s[j]) / (Complex(0.3, 0) - st.x[j]);
  CHECK((pi_minus(fe, 0.5, Complex(0.3, 0)) - direct).norm() < 1e-6);
}

TEST_CASE("pi_plus is the Hermitian conjugate of pi_minus on the real line") {
  const RationalData d = test::valid_pair_datum(2);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  auto g = test::rng(409);
  std::uniform_real_distribution<double> ut(0, 1), ux(-10, 10);
  for (int i = 0; i < 300; ++i) {
    const double t = ut(g), x = ux(g);
    CHECK((pi_plus(fe, t, x) - pi_minus(fe, t, x).adjoint().eval()).norm() < 1e-12);
  }
}

TEST_CASE("pi_plus at t = 0 sums the reflected partial fractions") {
  const RationalData d = test::valid_pair_datum(3);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  const double x = 1.3;
  Mat2 direct = Mat2::Zero();
  for (int j = 0; j < 2; ++j) {
    const Mat2 a = spin_to_matrix(d.spins[j]);
    direct += a.adjoint().eval() / (Complex(x, 0) - std::conj(d.poles[j]));
  }
  CHECK((pi_plus(fe, 0, x) - direct).norm() < 1e-12);
}

TEST_CASE("resolvent symmetry off the real line") {
  const RationalData d = test::valid_pair_datum(1);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  auto g = test::rng(419);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 100; ++i) {
    const Complex x(u(g), u(g));
    if (std::abs(x.imag()) < 0.3) continue;
    CHECK((pi_plus(fe, 0.4, x) - pi_minus(fe, 0.4, std::conj(x)).adjoint().eval()).norm() <
          1e-12);
  }
}

TEST_CASE("hardy representation equals the direct conjugate resolvent") {
  const RationalData d = test::valid_pair_datum(2);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  auto g = test::rng(421);
  std::uniform_real_distribution<double> ut(0, 1), ux(-10, 10);
  for (int i = 0; i < 300; ++i) {
    const double t = ut(g), x = ux(g);
    CHECK((hardy_rep_pi_plus(fe, t, x) - pi_plus(fe, t, x)).norm() < 1e-12);
  }
}

TEST_CASE("hardy basis matrix at t = 0 is the reflected pole diagonal") {
  const RationalData d = test::valid_pair_datum(3);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 2);
  expected(0, 0) = std::conj(d.poles[0]);
  expected(1, 1) = std::conj(d.poles[1]);
  CHECK((fe.hardy_matrix(0) - expected).norm() == 0.0);

  // one-pole expansion: the single basis term is A*/(x - conj x_1)
  const RationalData s = test::static_soliton();
  const FrozenEvolution fs = FrozenEvolution::freeze(s);
  const Mat2 astar = spin_to_matrix(s.spins[0]).adjoint();
  const double x = 0.4;
  CHECK((hardy_rep_pi_plus(fs, 0, x) - astar / (Complex(x, 0) - Complex(0, -1))).norm() <
        1e-13);
}

TEST_CASE("full field of the static soliton matches the closed profile") {
  const FrozenEvolution fe = FrozenEvolution::freeze(test::static_soliton());
  for (double t : {0.0, 0.5, 1.0}) {
    for (int i = 0; i <= 200; ++i) {
      const double x = -10 + 0.1 * i;
      const FieldSample sample = full_field(fe, t, x);
      CHECK((sample.m - test::static_profile(x)).norm() < 1e-12);
      CHECK(sample.unit_deviation < 1e-12);
      CHECK(sample.im_residual < 1e-13);
    }
  }
}

TEST_CASE("field decays to the background for large x") {
  const RationalData d = test::valid_pair_datum(1);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  const FieldSample far = full_field(fe, 0.6, 1e7);
  CHECK((far.m - Eigen::Vector3d(0, 0, 1)).norm() < 1e-5);

  // total residue is conserved: x pi_minus(t, x) -> sum_j A_j(0)
  Mat2 total = Mat2::Zero();
  for (int j = 0; j < 2; ++j) total += spin_to_matrix(d.spins[j]);
  const Complex far_x(0, 1e6);
  const double near_err = (far_x * pi_minus(fe, 0.6, far_x) - total).norm();
  const Complex farther_x(0, 1e7);
  const double far_err = (farther_x * pi_minus(fe, 0.6, farther_x) - total).norm();
  CHECK(near_err < 1e-4);
  CHECK(far_err < 0.2 * near_err);
}

TEST_CASE("evaluating on a pole raises ResolventSingular") {
  const RationalData d = test::valid_pair_datum(2);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  CHECK_THROWS_AS(pi_minus(fe, 0.0, d.poles[0]), ResolventSingular);
  CHECK_THROWS_AS(pi_plus(fe, 0.0, std::conj(d.poles[0])), ResolventSingular);
}

TEST_CASE("field stays on the sphere for a moving two-pole solution") {
  const RationalData d = test::valid_pair_datum(2);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  for (int i = 0; i < 100; ++i) {
    const double x = -10 + 0.2 * i;
    const FieldSample sample = full_field(fe, 0.8, x);
    CHECK(sample.unit_deviation < 1e-8);
    CHECK(sample.im_residual < 1e-8);
  }
}

TEST_CASE("reality guard catches an inconsistent frozen set") {
  // a Lax block unrelated to the half-spins breaks the hidden trace identity
  const RationalData d = test::valid_pair_datum(3);
  FrozenEvolution fe = FrozenEvolution::freeze(d);
  fe.lax(0, 1) += 0.5;
  CHECK_THROWS_AS(full_field(fe, 1.0, 0.3), NonRealField);
}

TEST_CASE("snapshot at t = 0 returns the input poles and residues in order") {
  const RationalData d = test::valid_pair_datum(1);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  const PoleSnapshot snap = poles_and_spins_at(fe, 0);
  REQUIRE(snap.poles.size() == 2);
  CHECK(snap.conditioning == 1.0);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(snap.poles(j) - d.poles[j]) == 0.0);
    CHECK((snap.spins[j] - spin_to_matrix(d.spins[j])).norm() < 1e-10);
  }
}

TEST_CASE("snapshot of the static soliton is time independent") {
  const FrozenEvolution fe = FrozenEvolution::freeze(test::static_soliton());
  for (double t : {0.0, 1.0, 4.0}) {
    const PoleSnapshot snap = poles_and_spins_at(fe, t);
    CHECK(std::abs(snap.poles(0) - Complex(0, 1)) < 1e-14);
    CHECK((snap.spins[0] - spin_to_matrix(test::static_soliton().spins[0])).norm() < 1e-13);
  }
}

TEST_CASE("snapshot matches the oracle after nearest matching") {
  const RationalData d = test::valid_pair_datum(2);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  const auto traj = integrate_spin_cm(d, 0.5, 1e-3).states;
  const SpinCMState& st = traj.back();
  const PoleSnapshot snap = poles_and_spins_at(fe, 0.5);
  const Eigen::Map<const Eigen::VectorXcd> xo(st.x.data(), 2);
  const std::vector<int> pick = match_by_proximity(xo, snap.poles);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(st.x[j] - snap.poles(pick[j])) < 1e-6);
    CHECK((spin_to_matrix(st.s[j]) - snap.spins[pick[j]]).norm() < 1e-6);
  }
}

TEST_CASE("snapshot residues conserve the total and stay null") {
  const RationalData d = test::valid_pair_datum(3);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  Mat2 total0 = Mat2::Zero();
  for (int j = 0; j < 2; ++j) total0 += spin_to_matrix(d.spins[j]);
  for (double t : {0.2, 0.7, 1.0}) {
    const PoleSnapshot snap = poles_and_spins_at(fe, t);
    Mat2 total = Mat2::Zero();
    for (const Mat2& a : snap.spins) {
      total += a;
      CHECK((a * a).norm() < 1e-10);
    }
    CHECK((total - total0).norm() < 1e-12);
  }
}

TEST_CASE("a Jordan-block collision raises DefectiveMatrix") {
  FrozenEvolution fe;
  fe.poles = Eigen::VectorXcd(2);
  fe.poles << Complex(0, 1), Complex(0, 1);
  fe.lax = Eigen::MatrixXcd::Zero(2, 2);
  fe.lax(0, 1) = 1.0;
  HalfSpinSet hs;
  hs.pairs = {{1, 0}, {0, 1}};
  fe.halfspins = hs.pairs;
  fe.background = pauli(3);
  fe.vecs = hs.vec_matrix();
  fe.covecs = hs.covec_matrix();
  CHECK_THROWS_AS(poles_and_spins_at(fe, 1.0), DefectiveMatrix);
}

TEST_CASE("a pole near the axis sets the boundary warning") {
  RationalData d = test::static_soliton();
  d.poles[0] = Complex(0, 1e-7);
  d.spins[0] = {Complex(1e-7, 0), 0, Complex(0, 1e-7)};  // scaled one-pole solution
  const Eigen::VectorXcd vel = Eigen::VectorXcd::Zero(1);
  const FrozenEvolution fe = freeze_null_datum(d, vel);
  CHECK(poles_and_spins_at(fe, 0).boundary_warning);
}

TEST_CASE("empty datum evolves to the constant background") {
  RationalData d;
  d.m0 = {0, 0, 1};
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  const FieldSample sample = full_field(fe, 0.7, 0.3);
  CHECK((sample.m - Eigen::Vector3d(0, 0, 1)).norm() == 0.0);
}

TEST_CASE("half-wave coefficients of the static soliton") {
  const RationalData d = test::static_soliton();
  const auto coeffs = halfwave_apply(d);
  REQUIRE(coeffs.size() == 2);
  // third component at x = 0 equals 2
  const Mat2 value = evaluate_second_order(coeffs, Complex(0, 0));
  CHECK(std::abs((value(0, 0) - value(1, 1)) / 2.0 - 2.0) < 1e-14);

  RationalData zero = d;
  zero.spins[0] = {0, 0, 0};
  CHECK(evaluate_second_order(halfwave_apply(zero), Complex(0.3, 0)).norm() == 0.0);
}

TEST_CASE("half-wave coefficients against the spectral multiplier") {
  // |xi| multiplier of m3 - 1 = -2/(x^2+1) on a wide periodic grid. The
  // closed-form coefficients follow the reversed orientation (lower
  // half-plane convention), so the spectral result equals their negative.
  const int n = 1 << 17;
  const double half_width = 400.0;
  const double dx = 2 * half_width / n;
  std::vector<std::complex<double>> f(n);
  for (int i = 0; i < n; ++i) {
    const double x = -half_width + i * dx;
    f[i] = -2.0 / (x * x + 1.0);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum(n), image(n);
  fft.fwd(spectrum, f);
  for (int k = 0; k < n; ++k) {
    const double xi = 2 * M_PI * ((k <= n / 2) ? k : k - n) / (2 * half_width);
    spectrum[k] *= std::abs(xi);
  }
  fft.inv(image, spectrum);

  const auto coeffs = halfwave_apply(test::static_soliton());
  double err_negated = 0, err_direct = 0;
  for (int i = 0; i < n; ++i) {
    const double x = -half_width + i * dx;
    if (std::abs(x) > 5) continue;
    const Mat2 cm = evaluate_second_order(coeffs, Complex(x, 0));
    const double closed3 = ((cm(0, 0) - cm(1, 1)) / 2.0).real();
    err_negated = std::max(err_negated, std::abs(image[i].real() + closed3));
    err_direct = std::max(err_direct, std::abs(image[i].real() - closed3));
  }
  CHECK(err_negated < 1e-3);
  CHECK(err_direct > 1.0);
}

TEST_CASE("evolution-equation defect of the static soliton is roundoff") {
  const FrozenEvolution fe = FrozenEvolution::freeze(test::static_soliton());
  CHECK(pde_residual(fe, 0.4, 0.7, 1e-2) < 1e-12);
}

TEST_CASE("evolution-equation defect is second order on valid data") {
  const RationalData d = test::valid_pair_datum(1);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  const double coarse = pde_residual(fe, 0.3, 0.7, 1e-2);
  const double fine = pde_residual(fe, 0.3, 0.7, 5e-3);
  CHECK(coarse / fine > 3.5);
  CHECK(coarse / fine < 4.5);
}

TEST_CASE("evolution-equation defect survives a constraint violation") {
  RationalData d = test::valid_pair_datum(1);
  auto g = test::rng(431);
  d.spins[1] = random_null_spin(g);  // nullity kept, coupling broken
  Eigen::VectorXcd vel(2);
  for (int j = 0; j < 2; ++j) vel(j) = velocity_projection(d, j);
  const FrozenEvolution fe = freeze_null_datum(d, vel);
  CHECK(pde_residual(fe, 0.3, 0.7, 1e-2) > 1e-2);
  CHECK(pde_residual(fe, 0.3, 0.7, 5e-3) > 1e-2);
}

TEST_CASE("contraction equals the literal doubled-matrix evaluation") {
  auto g = test::rng(433);
  const int n = 4;
  const RationalData d = random_null_data(g, n);
  Eigen::VectorXcd vel(n);
  for (int j = 0; j < n; ++j) vel(j) = test::random_complex(g, 0.3);
  const FrozenEvolution fe = freeze_null_datum(d, vel);
  const HalfSpinSet hs = assemble(d, 1e-8);
  std::uniform_real_distribution<double> ut(0, 1), ux(-8, 8);
  const Eigen::MatrixXd t_stack = stacked_identity(n);
  const Eigen::MatrixXd h_block = block_ones(n);
  for (int rep = 0; rep < 50; ++rep) {
    const double t = ut(g), x = ux(g);
    Eigen::MatrixXcd shifted = fe.shifted_pole_matrix(t);
    shifted.diagonal().array() -= Complex(x, 0);
    const Eigen::MatrixXcd resolvent_doubled = doubled(shifted.inverse()).materialize();
    const Eigen::MatrixXcd literal = -t_stack.transpose() *
                                     hs.left_diagonal().asDiagonal().toDenseMatrix() * h_block *
                                     resolvent_doubled *
                                     hs.right_diagonal().asDiagonal().toDenseMatrix() * t_stack;
    CHECK((literal - pi_minus(fe, t, x)).norm() < 1e-12);
  }
}

TEST_CASE("half-spin transport through the propagator") {
  const RationalData d = test::valid_pair_datum(2);
  const FrozenEvolution fe = FrozenEvolution::freeze(d);
  const auto traj = integrate_spin_cm(d, 1.0, 1e-3).states;
  const auto props = integrate_propagator(traj);
  const int n = d.size();

  // rebuild the half-spin stacks from oracle spins with branch continuity
  std::vector<HalfSpinPair> pairs = fe.halfspins;
  for (std::size_t i = 1; i < traj.size(); ++i)
    for (int j = 0; j < n; ++j) pairs[j] = continuous_halfspins(traj[i].s[j], pairs[j]);

  Eigen::MatrixXcd left0 = Eigen::MatrixXcd::Zero(2 * n, 2), right0 = left0;
  Eigen::MatrixXcd left1 = left0, right1 = left0;
  for (int j = 0; j < n; ++j) {
    left0(2 * j, 0) = fe.halfspins[j].alpha;
    left0(2 * j + 1, 1) = fe.halfspins[j].beta;
    right0(2 * j, 0) = fe.halfspins[j].beta;
    right0(2 * j + 1, 1) = -fe.halfspins[j].alpha;
    left1(2 * j, 0) = pairs[j].alpha;
    left1(2 * j + 1, 1) = pairs[j].beta;
    right1(2 * j, 0) = pairs[j].beta;
    right1(2 * j + 1, 1) = -pairs[j].alpha;
  }
  const Eigen::MatrixXcd& u = props.back().U;
  CHECK((left1 - apply_doubled(u, left0)).norm() < 1e-6);
  CHECK((right1 - apply_doubled(u, right0)).norm() < 1e-6);
}

TEST_CASE("one-pole data are fixed points of the formula") {
  auto g = test::rng(437);
  std::uniform_real_distribution<double> re(-1, 1), im(0.5, 1.5), angle(0, 2 * M_PI);
  for (int rep = 0; rep < 10; ++rep) {
    const RationalData d = single_soliton(Complex(re(g), im(g)), {0, 0, 1}, angle(g));
    const FrozenEvolution fe = FrozenEvolution::freeze(d);
    for (double x : {-3.0, 0.1, 2.4}) {
      const FieldSample at0 = full_field(fe, 0, x);
      const FieldSample at_t = full_field(fe, 1.7, x);
      CHECK((at_t.M - at0.M).norm() < 1e-12);
    }
  }
}
