#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "vharv/controller.hpp"
#include "vharv/linear_algebra.hpp"
#include "vharv/params.hpp"
#include "vharv/plant.hpp"
#include "vharv/sdp.hpp"

namespace vharv {

/// Knobs of the multi-objective synthesis program.
struct SynthesisConfig {
  double xdot_m = 0.0;  ///< mean-square velocity bound [m/s]; 0 drops the
                        ///< velocity and voltage-budget constraints (OP2)
  double i_cont = 0.0;  ///< continuous current rating [A]
  double v_s = 0.0;     ///< bus voltage [V], may be +inf
  double delta = 1.0;   ///< bus safety factor
  double r_coef = 0.0;  ///< quadratic loss weight (phase resistance) [Ohm]
  double kv = 0.0;      ///< n_p L / (2 lead), electrical coupling [V·s/m/A... ]

  double eps_lmi = 1e-7;   ///< strictness margin, relative per block
  int max_iters = 50;      ///< outer stochastic-linearization iterations
  double tol_gamma = 1e-5; ///< outer convergence threshold on |d gamma|

  double picard_rho = 0.5;
  double picard_tol = 1e-10;
  int picard_max = 200;

  SdpOptions sdp;

  static SynthesisConfig from(const PlantParams& params, double xdot_m);
};

/// Decision variables of the convex synthesis program, together with the
/// (possibly state-scaled) plant data they were solved against so the
/// controller can be recovered without extra context.
struct LmiVariables {
  Eigen::Matrix4d X = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d Y = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d A_tilde = Eigen::Matrix4d::Zero();
  Eigen::Vector4d B_tilde = Eigen::Vector4d::Zero();
  Eigen::RowVector4d C_tilde = Eigen::RowVector4d::Zero();
  double beta = 0.0;
  double gamma = 0.0;

  Eigen::Matrix4d A_ctx = Eigen::Matrix4d::Zero();
  Eigen::Vector4d B_ctx = Eigen::Vector4d::Zero();
  Eigen::RowVector4d Cy_ctx = Eigen::RowVector4d::Zero();
};

struct OpSolution {
  LmiVariables vars;
  std::vector<std::pair<std::string, double>> lmi_margins;  ///< min eig per LMI
  Eigen::Vector4d state_scaling = Eigen::Vector4d::Ones();
  int sdp_iterations = 0;
};

/// Solves the power-maximization program (OP2 when cfg.xdot_m == 0, OP3
/// otherwise) for the given linear(ized) plant. `riccati` must come from
/// solve_care on the same (A, B, C, r_coef). Throws SolverError when the
/// program is infeasible, naming the blocking LMIs.
OpSolution solve_op(const StateSpace& plant, const MeasurementModel& meas,
                    const SynthesisConfig& cfg, const RiccatiSolution& riccati);

/// Controller reconstruction from the change-of-variables solution. The
/// factorization X Y + M N' = I uses the SVD of I - X Y; any valid (M, N)
/// yields the same transfer function. Throws SolverError when I - X Y is
/// singular to within 1e-10.
ControllerQ recover_controller(const LmiVariables& vars);
ControllerQ recover_controller(const LmiVariables& vars, const Eigen::Matrix4d& M,
                               const Eigen::Matrix4d& N);

/// Statistically linearized plant matrix: A plus the rank-one Coulomb
/// correction scaled by the stationary velocity deviation.
Eigen::Matrix4d equivalent_A(const Eigen::Matrix<double, 8, 8>& Sigma,
                             const StateSpace& base);

/// Stationary covariance of the closed loop under the Gaussian-closure force
/// model: solves the Lyapunov-like fixed point with damped Picard iteration.
Eigen::Matrix<double, 8, 8> stationary_covariance(const StateSpace& base,
                                                  const ControllerQ& K,
                                                  const SynthesisConfig& cfg);

struct SynthesisResult {
  ControllerQ controller;
  LmiVariables vars;
  Eigen::Matrix<double, 8, 8> Sigma = Eigen::Matrix<double, 8, 8>::Zero();
  std::vector<double> gamma_trace;
  int iterations = 0;
  bool converged = false;
  double gamma = 0.0;
  Eigen::Matrix4d A_eq = Eigen::Matrix4d::Zero();  ///< plant matrix of the final solve
  std::vector<std::pair<std::string, double>> lmi_margins;
  Eigen::Vector4d state_scaling = Eigen::Vector4d::Ones();
  ClosedLoopMoments moments;  ///< on the final linearized plant
};

/// Full iterative design: alternates the convex solve with the
/// stochastic-linearization covariance update until gamma settles.
SynthesisResult iterate_design(const PlantParams& params, const SynthesisConfig& cfg);

}  // namespace vharv
