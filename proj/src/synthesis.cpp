#include "vharv/synthesis.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "vharv/errors.hpp"

namespace vharv {

namespace {

// Decision vector layout: svec(X), svec(Y), vec(A~), B~, C~, beta, gamma.
struct VarMap {
  static constexpr int n = 4;
  static constexpr int count = 46;
  static int tri(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * (2 * n - i - 1) / 2 + j;
  }
  static int X(int i, int j) { return tri(i, j); }
  static int Y(int i, int j) { return 10 + tri(i, j); }
  static int At(int i, int j) { return 20 + n * i + j; }
  static int Bt(int i) { return 36 + i; }
  static int Ct(int j) { return 40 + j; }
  static int beta() { return 44; }
  static int gamma() { return 45; }
};

// Accumulates symmetric affine blocks; entries are specified on the upper
// triangle and mirrored.
class BlockBuilder {
 public:
  BlockBuilder(std::string name, int dim) {
    blk_.name = std::move(name);
    blk_.dim = dim;
    blk_.F0 = Eigen::MatrixXd::Zero(dim, dim);
  }

  void add_const(int r, int c, double v) {
    blk_.F0(r, c) += v;
    if (r != c) blk_.F0(c, r) += v;
  }

  void add_var(int r, int c, int var, double v) {
    if (v == 0.0) return;
    auto& f = coeff(var);
    f(r, c) += v;
    if (r != c) f(c, r) += v;
  }

  /// Applies the strictness margin and returns the finished block.
  SdpBlock finish(double eps_rel, double* eps_out) {
    double scale = blk_.F0.cwiseAbs().maxCoeff();
    for (const auto& f : blk_.F) scale = std::max(scale, f.cwiseAbs().maxCoeff());
    const double eps = eps_rel * std::max(1.0, scale);
    blk_.F0.diagonal().array() -= eps;
    if (eps_out) *eps_out = eps;
    return std::move(blk_);
  }

 private:
  Eigen::MatrixXd& coeff(int var) {
    for (std::size_t i = 0; i < blk_.var_index.size(); ++i)
      if (blk_.var_index[i] == var) return blk_.F[i];
    blk_.var_index.push_back(var);
    blk_.F.emplace_back(Eigen::MatrixXd::Zero(blk_.dim, blk_.dim));
    return blk_.F.back();
  }

  SdpBlock blk_;
};

// The trailing [X I; I Y] pattern shared by the variance-bound LMIs.
void fill_xy_tail(BlockBuilder& b, int r0) {
  for (int p = 0; p < 4; ++p) {
    for (int q = p; q < 4; ++q) {
      b.add_var(r0 + p, r0 + q, VarMap::X(p, q), 1.0);
      b.add_var(r0 + 4 + p, r0 + 4 + q, VarMap::Y(p, q), 1.0);
    }
    b.add_const(r0 + p, r0 + 4 + p, 1.0);
  }
}

struct ScaledPlant {
  Eigen::Matrix4d A;
  Eigen::Vector4d B, B_w;
  Eigen::RowVector4d C, C_v, C_y;
  Eigen::Matrix4d S;
  Eigen::RowVector4d H;
  Eigen::Vector4d t;  // xi' = diag(t) * xi
};

// Balances the state coordinates by the open-loop stationary deviations so
// the LMI variables stay O(1) for the interior-point solver. The recovered
// controller's transfer function is unaffected.
ScaledPlant scale_plant(const StateSpace& plant, const MeasurementModel& meas,
                        const RiccatiSolution& ric) {
  Eigen::Vector4d t = Eigen::Vector4d::Ones();
  if (is_hurwitz(plant.A)) {
    const Eigen::MatrixXd sig =
        solve_lyapunov(plant.A, plant.B_w * plant.B_w.transpose());
    for (int i = 0; i < 4; ++i) {
      const double v = sig(i, i);
      if (v > 0.0) t[i] = std::clamp(1.0 / std::sqrt(v), 1e-6, 1e6);
    }
  }
  ScaledPlant s;
  s.t = t;
  const Eigen::Vector4d ti = t.cwiseInverse();
  s.A = t.asDiagonal() * plant.A * ti.asDiagonal();
  s.B = t.asDiagonal() * plant.B;
  s.B_w = t.asDiagonal() * plant.B_w;
  s.C = plant.C * ti.asDiagonal();
  s.C_v = plant.C_v * ti.asDiagonal();
  s.C_y = meas.C_y * ti.asDiagonal();
  s.S = ti.asDiagonal() * ric.S * ti.asDiagonal();
  s.H = ric.H * ti.asDiagonal();
  return s;
}

}  // namespace

SynthesisConfig SynthesisConfig::from(const PlantParams& params, double xdot_m) {
  SynthesisConfig cfg;
  cfg.xdot_m = xdot_m;
  cfg.i_cont = params.transducer.i_cont;
  cfg.v_s = params.bus.v_s;
  cfg.delta = params.bus.delta;
  cfg.r_coef = params.transducer.R;
  cfg.kv = params.transducer.n_p * params.transducer.L / (2.0 * params.transducer.lead);
  return cfg;
}

OpSolution solve_op(const StateSpace& plant, const MeasurementModel& meas,
                    const SynthesisConfig& cfg, const RiccatiSolution& riccati) {
  if (!(cfg.xdot_m >= 0.0)) throw ValidationError("solve_op: xdot_m must be >= 0");
  if (!(cfg.eps_lmi > 0.0)) throw ValidationError("solve_op: eps_lmi must be > 0");
  if (!(cfg.i_cont > 0.0)) throw ValidationError("solve_op: i_cont must be > 0");
  if (!(meas.phi_n > 0.0)) throw ValidationError("solve_op: phi_n must be > 0");

  const ScaledPlant sp = scale_plant(plant, meas, riccati);
  const double sigma_n = std::sqrt(meas.phi_n);
  const bool op3 = cfg.xdot_m > 0.0;
  const bool voltage_budget = op3 && std::isfinite(cfg.v_s);

  SdpProblem prob;
  prob.num_vars = VarMap::count;
  prob.objective = Eigen::VectorXd::Zero(VarMap::count);
  prob.objective[VarMap::gamma()] = 1.0;

  std::vector<double> eps(6, 0.0);
  std::vector<std::string> names;

  {  // Stability/covariance LMI, negated into >= 0 form. Congruence by
     // diag(I, I, 1, sqrt(phi_n)) normalizes the noise corner.
    BlockBuilder b("lmi1", 10);
    for (int p = 0; p < 4; ++p) {
      for (int q = p; q < 4; ++q) {
        for (int r = 0; r < 4; ++r) {
          b.add_var(p, q, VarMap::X(r, q), -sp.A(p, r));
          b.add_var(p, q, VarMap::X(r, p), -sp.A(q, r));
          b.add_var(4 + p, 4 + q, VarMap::Y(p, r), -sp.A(r, q));
          b.add_var(4 + p, 4 + q, VarMap::Y(q, r), -sp.A(r, p));
        }
        b.add_var(p, q, VarMap::Ct(q), -sp.B(p));
        b.add_var(p, q, VarMap::Ct(p), -sp.B(q));
        b.add_var(4 + p, 4 + q, VarMap::Bt(p), -sp.C_y(q));
        b.add_var(4 + p, 4 + q, VarMap::Bt(q), -sp.C_y(p));
      }
      for (int q = 0; q < 4; ++q) {
        b.add_const(p, 4 + q, -sp.A(p, q));
        b.add_var(p, 4 + q, VarMap::At(q, p), -1.0);
      }
      b.add_const(p, 8, -sp.B_w(p));
      for (int r = 0; r < 4; ++r) b.add_var(4 + p, 8, VarMap::Y(p, r), -sp.B_w(r));
      b.add_var(4 + p, 9, VarMap::Bt(p), -sigma_n);
    }
    b.add_const(8, 8, 1.0);
    b.add_const(9, 9, 1.0);
    names.emplace_back("lmi1");
    prob.blocks.push_back(b.finish(cfg.eps_lmi, &eps[0]));
  }

  {  // Current-variance bound E{i_q^2} < i_cont^2 / 4.
    BlockBuilder b("lmi2", 9);
    b.add_const(0, 0, 0.25 * cfg.i_cont * cfg.i_cont);
    for (int q = 0; q < 4; ++q) b.add_var(0, 1 + q, VarMap::Ct(q), 1.0);
    fill_xy_tail(b, 1);
    names.emplace_back("lmi2");
    prob.blocks.push_back(b.finish(cfg.eps_lmi, &eps[1]));
  }

  {  // Deviation from the full-information gain: beta > E{(i_q - H xi)^2}.
    BlockBuilder b("lmi3", 9);
    b.add_var(0, 0, VarMap::beta(), 1.0);
    for (int q = 0; q < 4; ++q) {
      b.add_var(0, 1 + q, VarMap::Ct(q), 1.0);
      for (int r = 0; r < 4; ++r) b.add_var(0, 1 + q, VarMap::X(r, q), -sp.H(r));
      b.add_const(0, 5 + q, -sp.H(q));
    }
    fill_xy_tail(b, 1);
    names.emplace_back("lmi3");
    prob.blocks.push_back(b.finish(cfg.eps_lmi, &eps[2]));
  }

  {  // Power bound: gamma < -(3/2)((1/2) B_w' S B_w + beta R).
    BlockBuilder b("lmi4", 1);
    b.add_const(0, 0, -0.75 * sp.B_w.dot(sp.S * sp.B_w));
    b.add_var(0, 0, VarMap::beta(), -1.5 * cfg.r_coef);
    b.add_var(0, 0, VarMap::gamma(), -1.0);
    names.emplace_back("lmi4");
    prob.blocks.push_back(b.finish(cfg.eps_lmi, &eps[3]));
  }

  if (op3) {  // Velocity-variance bound E{xdot^2} < xdot_m^2.
    BlockBuilder b("lmi5", 9);
    b.add_const(0, 0, cfg.xdot_m * cfg.xdot_m);
    for (int q = 0; q < 4; ++q) {
      for (int r = 0; r < 4; ++r) b.add_var(0, 1 + q, VarMap::X(r, q), sp.C_v(r));
      b.add_const(0, 5 + q, sp.C_v(q));
    }
    fill_xy_tail(b, 1);
    names.emplace_back("lmi5");
    prob.blocks.push_back(b.finish(cfg.eps_lmi, &eps[4]));
  }

  if (voltage_budget) {  // Mean-square bus-voltage budget.
    BlockBuilder b("lmi6", 17);
    const double budget = 0.25 * std::pow(cfg.delta * cfg.v_s / 2.0, 2);
    b.add_const(0, 0, budget);
    for (int q = 0; q < 4; ++q) {
      b.add_var(0, 1 + q, VarMap::Ct(q), cfg.r_coef);
      for (int r = 0; r < 4; ++r) b.add_var(0, 1 + q, VarMap::X(r, q), sp.C(r));
      b.add_const(0, 5 + q, sp.C(q));
      b.add_var(0, 9 + q, VarMap::Ct(q), cfg.xdot_m * cfg.kv);
    }
    fill_xy_tail(b, 1);
    fill_xy_tail(b, 9);
    names.emplace_back("lmi6");
    prob.blocks.push_back(b.finish(cfg.eps_lmi, &eps[5]));
  }

  SdpSolution sol = solve_sdp(prob, cfg.sdp);

  OpSolution out;
  out.sdp_iterations = sol.iterations;
  out.state_scaling = sp.t;
  for (std::size_t k = 0; k < prob.blocks.size(); ++k)
    out.lmi_margins.emplace_back(names[k], sol.block_min_eig[k] + eps[k]);

  LmiVariables& v = out.vars;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      v.X(i, j) = v.X(j, i) = sol.z[VarMap::X(i, j)];
      v.Y(i, j) = v.Y(j, i) = sol.z[VarMap::Y(i, j)];
    }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) v.A_tilde(i, j) = sol.z[VarMap::At(i, j)];
  for (int i = 0; i < 4; ++i) v.B_tilde(i) = sol.z[VarMap::Bt(i)];
  for (int j = 0; j < 4; ++j) v.C_tilde(j) = sol.z[VarMap::Ct(j)];
  v.beta = sol.z[VarMap::beta()];
  v.gamma = sol.z[VarMap::gamma()];
  v.A_ctx = sp.A;
  v.B_ctx = sp.B;
  v.Cy_ctx = sp.C_y;
  return out;
}

ControllerQ recover_controller(const LmiVariables& vars, const Eigen::Matrix4d& M,
                               const Eigen::Matrix4d& N) {
  const Eigen::Matrix4d inner =
      vars.A_tilde - vars.Y * vars.A_ctx * vars.X -
      vars.B_tilde * vars.Cy_ctx * vars.X - vars.Y * vars.B_ctx * vars.C_tilde;
  Eigen::FullPivLU<Eigen::Matrix4d> lu_n(N);
  Eigen::FullPivLU<Eigen::Matrix4d> lu_m(M);
  if (!lu_n.isInvertible() || !lu_m.isInvertible())
    throw SolverError("recover_controller: factorization matrices are singular");
  // right-multiplication by M^{-T}: Z M^T = inner  <=>  Z = (M^{-1} inner^T)^T
  const Eigen::Matrix4d inner_mt = lu_m.solve(inner.transpose()).transpose();
  ControllerQ k;
  k.A_K = lu_n.solve(inner_mt);
  k.B_K = lu_n.solve(vars.B_tilde);
  k.C_K = lu_m.solve(vars.C_tilde.transpose()).transpose();
  return k;
}

ControllerQ recover_controller(const LmiVariables& vars) {
  const Eigen::Matrix4d residual =
      Eigen::Matrix4d::Identity() - vars.X * vars.Y;
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(residual,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(3) <= 1e-10 * std::max(1.0, s(0)))
    throw SolverError(
        "recover_controller: I - X Y is numerically singular, controller "
        "factorization is degenerate");
  const Eigen::Vector4d root = s.cwiseSqrt();
  const Eigen::Matrix4d M = svd.matrixU() * root.asDiagonal();
  const Eigen::Matrix4d N = svd.matrixV() * root.asDiagonal();
  return recover_controller(vars, M, N);
}

Eigen::Matrix4d equivalent_A(const Eigen::Matrix<double, 8, 8>& Sigma,
                             const StateSpace& base) {
  const double var_v =
      base.C_v * Sigma.topLeftCorner<4, 4>() * base.C_v.transpose();
  if (!(var_v > 0.0))
    throw SolverError("equivalent_A: stationary velocity variance is not positive");
  return base.A +
         std::sqrt(2.0 / M_PI) / std::sqrt(var_v) * (base.F * base.C_v);
}

Eigen::Matrix<double, 8, 8> stationary_covariance(const StateSpace& base,
                                                  const ControllerQ& K,
                                                  const SynthesisConfig& cfg) {
  Eigen::Matrix<double, 8, 8> Q = Eigen::Matrix<double, 8, 8>::Zero();
  Q.topLeftCorner<4, 4>() = base.B_w * base.B_w.transpose();

  StateSpace work = base;
  auto closed_loop = [&](const Eigen::Matrix4d& A_eq) {
    work.A = A_eq;
    return closed_loop_matrix(work, K);
  };

  Eigen::Matrix<double, 8, 8> sigma = solve_lyapunov(closed_loop(base.A), Q);
  if (base.F.isZero()) return sigma;

  for (int i = 0; i < cfg.picard_max; ++i) {
    const Eigen::Matrix4d a_eq = equivalent_A(sigma, base);
    const Eigen::Matrix<double, 8, 8> next = solve_lyapunov(closed_loop(a_eq), Q);
    const double delta = (next - sigma).norm() / std::max(next.norm(), 1e-300);
    sigma = (1.0 - cfg.picard_rho) * sigma + cfg.picard_rho * next;
    if (delta < cfg.picard_tol) return sigma;
  }
  throw SolverError("stationary_covariance: Picard iteration did not converge");
}

SynthesisResult iterate_design(const PlantParams& params, const SynthesisConfig& cfg) {
  params.validate();
  const StateSpace base = assemble_plant(params.mech, params.transducer,
                                         params.disturbance, DriveMode::backdriven);
  const MeasurementModel meas = velocity_measurement(params.measurement);

  SynthesisResult res;
  StateSpace plant_it = base;
  Eigen::Matrix4d a_eq = base.A;
  double relax = 1.0;
  double prev_gamma = 0.0, prev_dgamma = 0.0;
  int alternations = 0;

  for (int it = 0; it < cfg.max_iters; ++it) {
    plant_it.A = a_eq;
    const RiccatiSolution ric =
        solve_care(plant_it.A, plant_it.B, plant_it.C, cfg.r_coef);
    const OpSolution op = solve_op(plant_it, meas, cfg, ric);
    const ControllerQ K = recover_controller(op.vars);
    const double gamma = op.vars.gamma;
    res.gamma_trace.push_back(gamma);
    res.controller = K;
    res.vars = op.vars;
    res.lmi_margins = op.lmi_margins;
    res.state_scaling = op.state_scaling;
    res.A_eq = plant_it.A;
    res.gamma = gamma;
    res.Sigma = stationary_covariance(base, K, cfg);

    if (it > 0) {
      const double dgamma = gamma - prev_gamma;
      if (std::abs(dgamma) < cfg.tol_gamma) {
        res.converged = true;
        break;
      }
      // Damp the linearization update if gamma starts ringing.
      if (prev_dgamma != 0.0 && dgamma * prev_dgamma < 0.0) {
        if (++alternations >= 3) {
          relax *= 0.5;
          alternations = 0;
        }
      } else {
        alternations = 0;
      }
      prev_dgamma = dgamma;
    }
    prev_gamma = gamma;

    const Eigen::Matrix4d a_next = equivalent_A(res.Sigma, base);
    if ((a_next - a_eq).norm() <= 1e-12 * (1.0 + base.A.norm())) {
      res.converged = true;
      break;
    }
    a_eq = (1.0 - relax) * a_eq + relax * a_next;
  }

  res.iterations = static_cast<int>(res.gamma_trace.size());
  StateSpace plant_final = base;
  plant_final.A = res.A_eq;
  res.moments = closed_loop_moments(plant_final, res.controller, meas);
  return res;
}

}  // namespace vharv
