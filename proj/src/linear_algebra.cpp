#include "vharv/linear_algebra.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "vharv/errors.hpp"

namespace vharv {

namespace {

// Selector for dgees: move open-left-half-plane eigenvalues to the leading
// block of the Schur form.
lapack_logical select_stable(const double* wr, const double* /*wi*/) {
  return *wr < 0.0 ? 1 : 0;
}

}  // namespace

double spectral_abscissa(const Eigen::MatrixXd& A) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(A, false)
      .eigenvalues()
      .real()
      .maxCoeff();
}

bool is_hurwitz(const Eigen::MatrixXd& A) { return spectral_abscissa(A) < -1e-12; }

RiccatiSolution solve_care(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                           const Eigen::RowVectorXd& C, double r_coef) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (A.cols() != n || B.size() != n || C.size() != n)
    throw ValidationError("solve_care: dimension mismatch");
  if (!(r_coef > 0.0)) throw ValidationError("solve_care: r_coef must be > 0");

  // Hamiltonian of the completed-square form
  //   Ahat = A - B C / (2r),  G = B B' / (2r),  Qhat = -C'C / (2r)
  const Eigen::MatrixXd Ahat = A - B * C / (2.0 * r_coef);
  Eigen::MatrixXd ham(2 * n, 2 * n);
  ham.topLeftCorner(n, n) = Ahat;
  ham.topRightCorner(n, n) = -B * B.transpose() / (2.0 * r_coef);
  ham.bottomLeftCorner(n, n) = C.transpose() * C / (2.0 * r_coef);
  ham.bottomRightCorner(n, n) = -Ahat.transpose();

  const double rho = ham.cwiseAbs().maxCoeff();

  Eigen::MatrixXd T = ham;  // overwritten by the Schur factor
  Eigen::MatrixXd Z(2 * n, 2 * n);
  Eigen::VectorXd wr(2 * n), wi(2 * n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_dgees(
      LAPACK_COL_MAJOR, 'V', 'S', select_stable, 2 * n, T.data(), 2 * n, &sdim,
      wr.data(), wi.data(), Z.data(), 2 * n);
  if (info < 0) throw SolverError("solve_care: dgees argument error");
  if (info > 0 && info <= 2 * n) throw SolverError("solve_care: QR iteration failed");

  // Eigenvalues within tolerance of the imaginary axis mean the stabilizing
  // solution does not exist.
  const double axis_tol = 1e-8 * std::max(rho, 1.0);
  for (lapack_int i = 0; i < 2 * n; ++i) {
    if (std::abs(wr[i]) <= axis_tol)
      throw SolverError(
          "solve_care: Hamiltonian eigenvalue on the imaginary axis; no "
          "stabilizing solution");
  }
  if (sdim != n)
    throw SolverError("solve_care: stable invariant subspace has wrong dimension");

  const Eigen::MatrixXd U1 = Z.topLeftCorner(n, n);
  const Eigen::MatrixXd U2 = Z.bottomLeftCorner(n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(U1);
  if (!lu.isInvertible())
    throw SolverError("solve_care: singular invariant-subspace basis");
  Eigen::MatrixXd S = U2 * lu.inverse();
  S = 0.5 * (S + S.transpose()).eval();

  RiccatiSolution sol;
  sol.S = S;
  sol.H = -(B.transpose() * S + C) / (2.0 * r_coef);
  const Eigen::MatrixXd resid =
      A.transpose() * S + S * A -
      (S * B + C.transpose()) * (B.transpose() * S + C) / (2.0 * r_coef);
  sol.residual_norm = resid.norm();
  return sol;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (A.cols() != n || Q.rows() != n || Q.cols() != n)
    throw ValidationError("solve_lyapunov: dimension mismatch");
  if (!is_hurwitz(A)) throw SolverError("solve_lyapunov: A is not Hurwitz");

  // A = U T U'; T Y + Y T' = -U' Q U, then Sigma = U Y U'.
  Eigen::RealSchur<Eigen::MatrixXd> schur(A);
  const Eigen::MatrixXd& T = schur.matrixT();
  const Eigen::MatrixXd& U = schur.matrixU();
  Eigen::MatrixXd Y = -U.transpose() * Q * U;

  double scale = 1.0;
  const lapack_int info =
      LAPACKE_dtrsyl(LAPACK_COL_MAJOR, 'N', 'T', 1, n, n, T.data(), n, T.data(), n,
                     Y.data(), n, &scale);
  if (info < 0) throw SolverError("solve_lyapunov: dtrsyl argument error");
  // info == 1 flags perturbed near-common eigenvalues; impossible for a
  // Hurwitz A paired with itself, treat as failure if it shows up.
  if (info == 1) throw SolverError("solve_lyapunov: dtrsyl reported common eigenvalues");

  Eigen::MatrixXd sigma = U * (Y / scale) * U.transpose();
  return 0.5 * (sigma + sigma.transpose()).eval();
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_discretize(const Eigen::MatrixXd& A,
                                                           const Eigen::MatrixXd& B,
                                                           double dt) {
  const auto n = A.rows();
  const auto m = B.cols();
  if (A.cols() != n || B.rows() != n)
    throw ValidationError("zoh_discretize: dimension mismatch");
  if (!(dt > 0.0)) throw ValidationError("zoh_discretize: dt must be > 0");
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = A * dt;
  block.topRightCorner(n, m) = B * dt;
  const Eigen::MatrixXd e = block.exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

Eigen::Matrix<double, 8, 8> closed_loop_matrix(const StateSpace& plant,
                                               const ControllerQ& K) {
  Eigen::Matrix<double, 8, 8> A_cl;
  A_cl.topLeftCorner<4, 4>() = plant.A;
  A_cl.topRightCorner<4, 4>() = plant.B * K.C_K;
  A_cl.bottomLeftCorner<4, 4>() = K.B_K * plant.C_y;
  A_cl.bottomRightCorner<4, 4>() = K.A_K;
  return A_cl;
}

ClosedLoopMoments closed_loop_moments(const StateSpace& plant, const ControllerQ& K,
                                      const MeasurementModel& meas) {
  Eigen::Matrix<double, 8, 8> A_cl = closed_loop_matrix(plant, K);
  A_cl.bottomLeftCorner<4, 4>() = K.B_K * meas.C_y;
  if (!is_hurwitz(A_cl))
    throw SolverError("closed_loop_moments: closed loop is not Hurwitz");

  // Process noise enters the plant, measurement noise enters through B_K.
  Eigen::Matrix<double, 8, 8> Q = Eigen::Matrix<double, 8, 8>::Zero();
  Q.topLeftCorner<4, 4>() = plant.B_w * plant.B_w.transpose();
  Q.bottomRightCorner<4, 4>() = meas.phi_n * (K.B_K * K.B_K.transpose());

  ClosedLoopMoments out;
  out.Sigma_cl = solve_lyapunov(A_cl, Q);

  Eigen::Matrix<double, 1, 8> cv_cl = Eigen::Matrix<double, 1, 8>::Zero();
  cv_cl.leftCols<4>() = plant.C_v;
  Eigen::Matrix<double, 1, 8> ck_cl = Eigen::Matrix<double, 1, 8>::Zero();
  ck_cl.rightCols<4>() = K.C_K;

  out.ex2 = cv_cl * out.Sigma_cl * cv_cl.transpose();
  out.eiq2 = ck_cl * out.Sigma_cl * ck_cl.transpose();

  // E{xi i_q} couples the plant block rows with the controller output.
  const Eigen::Vector4d e_xi_iq =
      out.Sigma_cl.topRightCorner<4, 4>() * K.C_K.transpose();
  out.p_gen_lin = -1.5 * (plant.r_loss * out.eiq2 + plant.C * e_xi_iq);
  return out;
}

}  // namespace vharv
