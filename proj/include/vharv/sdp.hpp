#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace vharv {

/// One PSD constraint block: F0 + sum_i z[var_index[i]] * F[i]  >= 0.
/// Only the variables actually entering the block are listed.
struct SdpBlock {
  std::string name;
  int dim = 0;
  Eigen::MatrixXd F0;
  std::vector<int> var_index;
  std::vector<Eigen::MatrixXd> F;
};

/// Linear SDP in inequality form: maximize objective.z subject to every
/// block being positive semidefinite.
struct SdpProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;
  std::vector<SdpBlock> blocks;
};

struct SdpOptions {
  int max_iterations = 150;
  double tol_gap = 1e-9;
  double tol_feas = 1e-9;
  /// Box safeguard |z_i| <= box_radius keeps the feasible set compact; the
  /// solver verifies it is inactive at the solution. 0 disables.
  double box_radius = 1e7;
  bool verbose = false;
};

struct SdpSolution {
  Eigen::VectorXd z;
  double objective_value = 0.0;
  int iterations = 0;
  double rel_gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  /// Smallest eigenvalue of each block at z, in the caller's scaling.
  std::vector<double> block_min_eig;
};

/// Infeasible-start primal-dual interior-point method (HKM scaling, Mehrotra
/// predictor-corrector). Intended for small dense problems; throws SolverError
/// on failure with per-block margin diagnostics.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// Evaluates one block at z.
Eigen::MatrixXd sdp_block_value(const SdpBlock& block, const Eigen::VectorXd& z);

}  // namespace vharv
