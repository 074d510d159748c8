#pragma once

#include <Eigen/Core>

#include "vharv/controller.hpp"
#include "vharv/plant.hpp"

namespace vharv {

/// Stabilizing solution of A'S + SA - (1/2)(SB + C')R^{-1}(B'S + C) = 0 with
/// the sign-indefinite quadratic term of the power objective.
struct RiccatiSolution {
  Eigen::MatrixXd S;       ///< symmetric
  Eigen::RowVectorXd H;    ///< full-information gain, A + B*H Hurwitz
  double residual_norm{};  ///< Frobenius norm of the plugged-back equation
};

/// Solves the Riccati equation above via the ordered real Schur form of the
/// Hamiltonian, selecting the stable invariant subspace. B is n x 1, C is
/// 1 x n, r_coef > 0. Throws SolverError when no stabilizing solution exists
/// (Hamiltonian eigenvalues on the imaginary axis) or the subspace is
/// degenerate.
RiccatiSolution solve_care(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                           const Eigen::RowVectorXd& C, double r_coef);

/// Bartels-Stewart solve of A*Sigma + Sigma*A' + Q = 0 for Hurwitz A and
/// symmetric Q. Throws SolverError for non-Hurwitz A.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// True iff every eigenvalue has real part < -1e-12.
bool is_hurwitz(const Eigen::MatrixXd& A);

/// Spectral abscissa (largest eigenvalue real part).
double spectral_abscissa(const Eigen::MatrixXd& A);

/// Exact zero-order-hold discretization of dx/dt = A x + B u at step dt.
/// Returns {Ad, Bd}.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_discretize(const Eigen::MatrixXd& A,
                                                           const Eigen::MatrixXd& B,
                                                           double dt);

/// Stationary second moments of the linear closed loop (plant + ControllerQ),
/// driven by unit-intensity process noise and phi_n-intensity measurement
/// noise.
struct ClosedLoopMoments {
  Eigen::Matrix<double, 8, 8> Sigma_cl;
  double ex2{};        ///< E{xdot^2}
  double eiq2{};       ///< E{i_q^2}
  double p_gen_lin{};  ///< mean generated power of the linear loop [W]
};

/// Throws SolverError when the closed loop is not Hurwitz.
ClosedLoopMoments closed_loop_moments(const StateSpace& plant, const ControllerQ& K,
                                      const MeasurementModel& meas);

/// Closed-loop system matrix [[A, B C_K], [B_K C_y, A_K]].
Eigen::Matrix<double, 8, 8> closed_loop_matrix(const StateSpace& plant,
                                               const ControllerQ& K);

}  // namespace vharv
