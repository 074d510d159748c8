#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "vharv/errors.hpp"
#include "vharv/linear_algebra.hpp"
#include "vharv/plant.hpp"

using namespace vharv;

namespace {

std::mt19937_64 rng(2024);

Eigen::MatrixXd random_matrix(int n, int m) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = g(rng);
  return a;
}

Eigen::MatrixXd random_hurwitz(int n) {
  Eigen::MatrixXd a = random_matrix(n, n);
  const double shift = spectral_abscissa(a);
  a -= (shift + 0.5 + std::abs(shift) * 0.1) * Eigen::MatrixXd::Identity(n, n);
  return a;
}

// Taylor-series matrix exponential with scaling and squaring; the oracle for
// the zero-order-hold discretization.
Eigen::MatrixXd expm_series(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::MatrixXd scaled = a;
  while (norm > 0.5) {
    scaled *= 0.5;
    norm *= 0.5;
    ++squarings;
  }
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace

TEST_CASE("care: scalar system has the stabilizing root") {
  // a=-1, b=1, c=1, r=1: s^2 + 6 s + 1 = 0, stabilizing root 2 sqrt(2) - 3.
  Eigen::MatrixXd A(1, 1), S_expected(1, 1);
  A << -1.0;
  Eigen::VectorXd B(1);
  B << 1.0;
  Eigen::RowVectorXd C(1);
  C << 1.0;
  const auto sol = solve_care(A, B, C, 1.0);
  CHECK(sol.S(0, 0) == doctest::Approx(2.0 * std::sqrt(2.0) - 3.0).epsilon(1e-12));
  CHECK(sol.residual_norm <= 1e-12);
  CHECK(A(0, 0) + B(0) * sol.H(0) < 0.0);
}

TEST_CASE("care: zero cross term gives the zero solution") {
  const Eigen::MatrixXd A = random_hurwitz(4);
  const Eigen::VectorXd B = random_matrix(4, 1);
  const Eigen::RowVectorXd C = Eigen::RowVectorXd::Zero(4);
  const auto sol = solve_care(A, B, C, 2.5);
  CHECK(sol.S.norm() <= 1e-10);
  CHECK(sol.H.norm() <= 1e-10);
}

TEST_CASE("care: bench plant solution is stabilizing") {
  const auto p = table_params();
  const StateSpace ss = assemble_plant(p.mech, p.transducer, p.disturbance,
                                       DriveMode::ideal);
  const auto sol = solve_care(ss.A, ss.B, ss.C, 10.7);
  CHECK(sol.residual_norm <= 1e-10 * std::max(1.0, sol.S.norm()));
  CHECK(is_hurwitz(ss.A + ss.B * sol.H));
}

TEST_CASE("care: residual and stabilization on random stable systems") {
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd A = random_hurwitz(4);
    const Eigen::VectorXd B = random_matrix(4, 1);
    const Eigen::RowVectorXd C = random_matrix(1, 4);
    // A stabilizing solution exists when R + Re{C (jwI - A)^-1 B} > 0 for all
    // frequencies; pick R accordingly, as the physics does for the harvester.
    double worst = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double w = 0.01 * k;
      const Eigen::MatrixXcd m =
          std::complex<double>(0.0, w) * Eigen::MatrixXd::Identity(4, 4) - A;
      const double re = (C.cast<std::complex<double>>() * m.inverse() *
                         B.cast<std::complex<double>>())(0)
                            .real();
      worst = std::min(worst, re);
    }
    const double r_coef = 1.0 + 2.0 * std::abs(worst);
    const auto sol = solve_care(A, B, C, r_coef);
    CHECK(sol.residual_norm <= 1e-10 * std::max(1.0, sol.S.norm()));
    CHECK(is_hurwitz(A + B * sol.H));
  }
}

TEST_CASE("lyapunov: scalar") {
  Eigen::MatrixXd A(1, 1), Q(1, 1);
  A << -1.0;
  Q << 1.0;
  CHECK(solve_lyapunov(A, Q)(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("lyapunov: zero forcing gives zero covariance") {
  const Eigen::MatrixXd A = random_hurwitz(5);
  CHECK(solve_lyapunov(A, Eigen::MatrixXd::Zero(5, 5)).norm() == 0.0);
}

TEST_CASE("lyapunov: matches time-domain second-moment integration") {
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd A = random_hurwitz(4);
    const Eigen::MatrixXd G = random_matrix(4, 2);
    const Eigen::MatrixXd Q = G * G.transpose();
    const Eigen::MatrixXd sigma = solve_lyapunov(A, Q);
    CHECK((A * sigma + sigma * A.transpose() + Q).norm() <=
          1e-10 * std::max(1.0, Q.norm()));

    // d Sigma/dt = A Sigma + Sigma A' + Q integrated over 20 time constants.
    const double tc = -1.0 / spectral_abscissa(A);
    const double t_end = 20.0 * tc;
    const int steps = 4000;
    const double h = t_end / steps;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 4);
    auto f = [&](const Eigen::MatrixXd& m) {
      return (A * m + m * A.transpose() + Q).eval();
    };
    for (int k = 0; k < steps; ++k) {
      const Eigen::MatrixXd k1 = f(s);
      const Eigen::MatrixXd k2 = f(s + 0.5 * h * k1);
      const Eigen::MatrixXd k3 = f(s + 0.5 * h * k2);
      const Eigen::MatrixXd k4 = f(s + h * k3);
      s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CHECK((s - sigma).norm() <= 1e-6 * sigma.norm());
  }
}

TEST_CASE("lyapunov: non-Hurwitz input rejected") {
  CHECK_THROWS_AS(solve_lyapunov(Eigen::MatrixXd::Identity(3, 3),
                                 Eigen::MatrixXd::Identity(3, 3)),
                  SolverError);
}

TEST_CASE("is_hurwitz basics") {
  CHECK_FALSE(is_hurwitz(Eigen::MatrixXd::Identity(3, 3)));
  CHECK(is_hurwitz(-Eigen::MatrixXd::Identity(3, 3)));
  const auto p = table_params();
  const StateSpace ss = assemble_plant(p.mech, p.transducer, p.disturbance,
                                       DriveMode::backdriven);
  CHECK(is_hurwitz(ss.A));
}

TEST_CASE("zoh discretization matches the series exponential") {
  const Eigen::MatrixXd A = random_matrix(4, 4);
  const Eigen::MatrixXd B = random_matrix(4, 1);
  const double dt = 1.0 / 4096.0;
  const auto [ad, bd] = zoh_discretize(A, B, dt);

  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(5, 5);
  block.topLeftCorner(4, 4) = A * dt;
  block.topRightCorner(4, 1) = B * dt;
  const Eigen::MatrixXd e = expm_series(block);
  CHECK((ad - e.topLeftCorner(4, 4)).norm() <= 1e-10);
  CHECK((bd - e.topRightCorner(4, 1)).norm() <= 1e-10);
}

TEST_CASE("closed-loop moments: open loop has no current or power") {
  const auto p = table_params();
  const StateSpace ss = assemble_plant(p.mech, p.transducer, p.disturbance,
                                       DriveMode::backdriven);
  ControllerQ K;  // zero controller
  K.A_K = -Eigen::Matrix4d::Identity();
  const auto m = closed_loop_moments(ss, K, velocity_measurement(p.measurement));
  CHECK(m.eiq2 == 0.0);
  CHECK(m.p_gen_lin == 0.0);
  CHECK(m.ex2 > 0.0);
  CHECK(m.Sigma_cl.topLeftCorner<4, 4>().diagonal().minCoeff() >= 0.0);
}
