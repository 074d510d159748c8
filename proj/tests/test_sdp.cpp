#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <random>

#include "vharv/errors.hpp"
#include "vharv/sdp.hpp"

using namespace vharv;

namespace {

SdpBlock scalar_block(const std::string& name, double f0,
                      std::vector<std::pair<int, double>> terms) {
  SdpBlock b;
  b.name = name;
  b.dim = 1;
  b.F0 = Eigen::MatrixXd::Constant(1, 1, f0);
  for (auto [i, v] : terms) {
    b.var_index.push_back(i);
    b.F.push_back(Eigen::MatrixXd::Constant(1, 1, v));
  }
  return b;
}

}  // namespace

TEST_CASE("sdp: scalar bound") {
  SdpProblem p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Ones(1);
  p.blocks.push_back(scalar_block("cap", 3.0, {{0, -1.0}}));
  const auto sol = solve_sdp(p);
  CHECK(sol.z[0] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(sol.objective_value == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("sdp: off-diagonal coupling") {
  // max x + y  s.t.  [[1, x],[x, 1]] >= 0 and [[1, y],[y, 1]] >= 0.
  SdpProblem p;
  p.num_vars = 2;
  p.objective = Eigen::VectorXd::Ones(2);
  for (int i = 0; i < 2; ++i) {
    SdpBlock b;
    b.name = i == 0 ? "bx" : "by";
    b.dim = 2;
    b.F0 = Eigen::Matrix2d::Identity();
    b.var_index = {i};
    Eigen::Matrix2d f = Eigen::Matrix2d::Zero();
    f(0, 1) = f(1, 0) = 1.0;
    b.F = {f};
    p.blocks.push_back(b);
  }
  const auto sol = solve_sdp(p);
  CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.z[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sdp: largest eigenvalue") {
  // min t s.t. t I - A0 >= 0, i.e. maximize -t.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Eigen::MatrixXd raw(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) raw(i, j) = g(rng);
  const Eigen::MatrixXd a0 = 0.5 * (raw + raw.transpose());
  const double lmax =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a0).eigenvalues().maxCoeff();

  SdpProblem p;
  p.num_vars = 1;
  p.objective = -Eigen::VectorXd::Ones(1);
  SdpBlock b;
  b.name = "shift";
  b.dim = 5;
  b.F0 = -a0;
  b.var_index = {0};
  b.F = {Eigen::MatrixXd::Identity(5, 5)};
  p.blocks.push_back(b);
  const auto sol = solve_sdp(p);
  CHECK(sol.z[0] == doctest::Approx(lmax).epsilon(1e-6));
}

TEST_CASE("sdp: Lyapunov-style multi-variable program") {
  // Variables: svec(P) for 3x3 P plus slack t.
  // max t  s.t.  -A'P - PA - tI >= 0,  P - I >= 0,  10I - P >= 0.
  Eigen::Matrix3d A;
  A << -1.0, 0.5, 0.0,  //
      0.0, -2.0, 1.0,  //
      -0.3, 0.0, -0.7;
  auto pix = [](int i, int j) {  // svec index for 3x3
    if (i > j) std::swap(i, j);
    static const int map[3][3] = {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}};
    return map[i][j];
  };
  SdpProblem p;
  p.num_vars = 7;
  p.objective = Eigen::VectorXd::Zero(7);
  p.objective[6] = 1.0;

  SdpBlock lyap;
  lyap.name = "lyap";
  lyap.dim = 3;
  lyap.F0 = Eigen::MatrixXd::Zero(3, 3);
  SdpBlock lower = lyap, upper = lyap;
  lower.name = "lower";
  upper.name = "upper";
  lower.F0 = -Eigen::Matrix3d::Identity();
  upper.F0 = 10.0 * Eigen::Matrix3d::Identity();

  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
      e(i, j) = e(j, i) = 1.0;
      // -(A'P + PA) entry coefficients for P_ij
      const Eigen::Matrix3d coef = -(A.transpose() * e + e * A);
      lyap.var_index.push_back(pix(i, j));
      lyap.F.push_back(coef);
      lower.var_index.push_back(pix(i, j));
      lower.F.push_back(e);
      upper.var_index.push_back(pix(i, j));
      upper.F.push_back(-e);
    }
  lyap.var_index.push_back(6);
  lyap.F.push_back(-Eigen::Matrix3d::Identity());
  p.blocks = {lyap, lower, upper};

  const auto sol = solve_sdp(p);
  CHECK(sol.objective_value > 0.1);  // A is stable, so some margin exists
  // Reconstruct P and check the constraints hold.
  Eigen::Matrix3d P;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) P(i, j) = P(j, i) = sol.z[pix(i, j)];
  const double t = sol.z[6];
  const Eigen::Matrix3d slack = -(A.transpose() * P + P * A) -
                                t * Eigen::Matrix3d::Identity();
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(slack).eigenvalues().minCoeff() >=
        -1e-7);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(
            Eigen::Matrix3d(P - Eigen::Matrix3d::Identity()))
            .eigenvalues()
            .minCoeff() >= -1e-7);
}

TEST_CASE("sdp: infeasible program throws with diagnostics") {
  SdpProblem p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Ones(1);
  p.blocks.push_back(scalar_block("le1", 1.0, {{0, -1.0}}));   // z <= 1
  p.blocks.push_back(scalar_block("ge2", -2.0, {{0, 1.0}}));   // z >= 2
  CHECK_THROWS_AS(solve_sdp(p), SolverError);
}

TEST_CASE("sdp: malformed block rejected") {
  SdpProblem p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Ones(1);
  SdpBlock b;
  b.name = "bad";
  b.dim = 2;
  b.F0 = Eigen::MatrixXd::Zero(1, 1);
  p.blocks.push_back(b);
  CHECK_THROWS_AS(solve_sdp(p), ValidationError);
}
