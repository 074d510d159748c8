#include "vharv/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "vharv/errors.hpp"

namespace vharv {

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

// Largest step alpha in (0, 1] with X + alpha*dX staying positive definite,
// shrunk by the fraction-to-boundary factor tau.
double max_step(const Eigen::LLT<Eigen::MatrixXd>& llt_x, const Eigen::MatrixXd& dx,
                double tau) {
  Eigen::MatrixXd y = llt_x.matrixL().solve(dx);
  y = llt_x.matrixL().solve(y.transpose().eval());
  const double lmin = min_eigenvalue(y);
  if (lmin >= -1e-14) return 1.0;
  return std::min(1.0, -tau / lmin);
}

struct BlockState {
  const SdpBlock* def = nullptr;
  Eigen::MatrixXd S, W, Rp, Sinv;
  Eigen::LLT<Eigen::MatrixXd> llt_s, llt_w;
  Eigen::MatrixXd dS_aff, dW_aff, dS, dW;
};

}  // namespace

Eigen::MatrixXd sdp_block_value(const SdpBlock& block, const Eigen::VectorXd& z) {
  Eigen::MatrixXd v = block.F0;
  for (std::size_t i = 0; i < block.var_index.size(); ++i)
    v += z[block.var_index[i]] * block.F[i];
  return v;
}

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  const int m = problem.num_vars;
  if (problem.objective.size() != m)
    throw ValidationError("solve_sdp: objective size mismatch");

  // Work on a scaled copy: each block divided by its largest coefficient
  // magnitude, objective normalized. Neither rescaling changes the argmax.
  std::vector<SdpBlock> blocks = problem.blocks;
  for (auto& b : blocks) {
    if (b.dim <= 0 || b.F0.rows() != b.dim || b.F.size() != b.var_index.size())
      throw ValidationError("solve_sdp: malformed block " + b.name);
    double s = b.F0.cwiseAbs().maxCoeff();
    for (const auto& f : b.F) s = std::max(s, f.cwiseAbs().maxCoeff());
    if (s <= 0.0) s = 1.0;
    b.F0 /= s;
    for (auto& f : b.F) f /= s;
  }
  if (options.box_radius > 0.0) {
    for (int i = 0; i < m; ++i) {
      SdpBlock up, lo;
      up.name = lo.name = "box";
      up.dim = lo.dim = 1;
      up.F0 = lo.F0 = Eigen::MatrixXd::Constant(1, 1, 1.0);
      up.var_index = {i};
      lo.var_index = {i};
      up.F = {Eigen::MatrixXd::Constant(1, 1, -1.0 / options.box_radius)};
      lo.F = {Eigen::MatrixXd::Constant(1, 1, 1.0 / options.box_radius)};
      blocks.push_back(std::move(up));
      blocks.push_back(std::move(lo));
    }
  }
  const double b_scale = std::max(1.0, problem.objective.cwiseAbs().maxCoeff());
  const Eigen::VectorXd b = problem.objective / b_scale;

  int cone_dim = 0;
  for (const auto& blk : blocks) cone_dim += blk.dim;

  std::vector<BlockState> st(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    st[k].def = &blocks[k];
    const int n = blocks[k].dim;
    const double shift = 1.0 + blocks[k].F0.norm();
    st[k].S = shift * Eigen::MatrixXd::Identity(n, n);
    st[k].W = Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);

  auto diagnostics = [&](const char* why) {
    std::ostringstream msg;
    msg << "solve_sdp: " << why << ";";
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      if (blocks[k].name == "box") continue;
      msg << " " << blocks[k].name << " min_eig="
          << min_eigenvalue(sdp_block_value(blocks[k], z));
    }
    return SolverError(msg.str());
  };

  Eigen::MatrixXd M(m, m);
  Eigen::VectorXd rd(m), rhs(m), dz_aff(m), dz(m);
  int iter = 0;
  double pinf = 0.0, dinf = 0.0, rel_gap = 0.0;
  int stall_count = 0;

  for (iter = 0; iter < options.max_iterations; ++iter) {
    // Residuals and merit quantities.
    double gap = 0.0, dobj = 0.0;
    pinf = 0.0;
    rd = -b;
    for (auto& s : st) {
      s.Rp = sdp_block_value(*s.def, z) - s.S;
      pinf = std::max(pinf, s.Rp.cwiseAbs().maxCoeff() /
                                (1.0 + s.def->F0.cwiseAbs().maxCoeff()));
      gap += s.W.cwiseProduct(s.S).sum();
      dobj += s.W.cwiseProduct(s.def->F0).sum();
      for (std::size_t j = 0; j < s.def->var_index.size(); ++j)
        rd[s.def->var_index[j]] -= s.W.cwiseProduct(s.def->F[j]).sum();
    }
    const double pobj = b.dot(z);
    dinf = rd.cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
    rel_gap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (options.verbose) {
      std::ostringstream line;
      line << "sdp iter " << iter << " obj " << pobj * b_scale << " gap " << rel_gap
           << " pinf " << pinf << " dinf " << dinf;
      std::fputs((line.str() + "\n").c_str(), stderr);
    }
    if (pinf < options.tol_feas && dinf < options.tol_feas && rel_gap < options.tol_gap)
      break;
    const double mu = gap / cone_dim;
    if (mu < 1e-13 && pinf > 1e-6)
      throw diagnostics("complementarity collapsed with nonzero primal residual "
                        "(problem is likely infeasible)");

    // Factorizations of the current iterates. The committed step was verified
    // positive definite, so failure here is unreachable in practice.
    for (auto& s : st) {
      s.llt_s.compute(s.S);
      s.llt_w.compute(s.W);
      if (s.llt_s.info() != Eigen::Success || s.llt_w.info() != Eigen::Success)
        throw diagnostics("iterate left the cone");
      s.Sinv = s.llt_s.solve(Eigen::MatrixXd::Identity(s.def->dim, s.def->dim));
    }

    // Schur complement M_ij = sum_k tr(F_i * sym(W F_j Sinv)).
    M.setZero();
    for (auto& s : st) {
      const auto& idx = s.def->var_index;
      const std::size_t na = idx.size();
      std::vector<Eigen::MatrixXd> g(na);
      for (std::size_t j = 0; j < na; ++j) {
        const Eigen::MatrixXd t = s.W * s.def->F[j] * s.Sinv;
        g[j] = 0.5 * (t + t.transpose());
      }
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t bi = a; bi < na; ++bi) {
          const double v = s.def->F[a].cwiseProduct(g[bi]).sum();
          const int r = std::min(idx[a], idx[bi]);
          const int c = std::max(idx[a], idx[bi]);
          M(r, c) += v;
        }
    }
    M = M.selfadjointView<Eigen::Upper>();

    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      M.diagonal().array() += 1e-12 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
      ldlt.compute(M);
      if (ldlt.info() != Eigen::Success)
        throw diagnostics("Schur complement factorization failed");
    }

    // Predictor (affine scaling, mu target 0).
    rhs = b;
    for (auto& s : st) {
      const Eigen::MatrixXd t = s.W * s.Rp * s.Sinv;
      const Eigen::MatrixXd p = 0.5 * (t + t.transpose());
      for (std::size_t j = 0; j < s.def->var_index.size(); ++j)
        rhs[s.def->var_index[j]] -= s.def->F[j].cwiseProduct(p).sum();
    }
    dz_aff = ldlt.solve(rhs);
    for (auto& s : st) {
      s.dS_aff = s.Rp;
      for (std::size_t j = 0; j < s.def->var_index.size(); ++j)
        s.dS_aff += dz_aff[s.def->var_index[j]] * s.def->F[j];
      const Eigen::MatrixXd t = s.W * s.dS_aff * s.Sinv;
      s.dW_aff = -s.W - 0.5 * (t + t.transpose());
    }

    const double tau = rel_gap > 1e-3 ? 0.9 : (rel_gap > 1e-6 ? 0.97 : 0.995);
    double ap = 1.0, ad = 1.0;
    for (auto& s : st) {
      ap = std::min(ap, max_step(s.llt_s, s.dS_aff, tau));
      ad = std::min(ad, max_step(s.llt_w, s.dW_aff, tau));
    }
    double gap_aff = 0.0;
    for (auto& s : st)
      gap_aff += (s.W + ad * s.dW_aff).cwiseProduct(s.S + ap * s.dS_aff).sum();
    gap_aff = std::max(gap_aff, 0.0);
    const double sigma =
        std::clamp(std::pow(gap_aff / std::max(gap, 1e-300), 3.0), 1e-8, 1.0);
    const double mu_t = sigma * mu;

    // Corrector with Mehrotra second-order term.
    rhs = b;
    for (auto& s : st) {
      const Eigen::MatrixXd t = s.W * s.Rp * s.Sinv;
      const Eigen::MatrixXd tc = s.dW_aff * s.dS_aff * s.Sinv;
      const Eigen::MatrixXd p =
          0.5 * (t + t.transpose()) + 0.5 * (tc + tc.transpose());
      for (std::size_t j = 0; j < s.def->var_index.size(); ++j) {
        const int vi = s.def->var_index[j];
        rhs[vi] += mu_t * s.def->F[j].cwiseProduct(s.Sinv).sum();
        rhs[vi] -= s.def->F[j].cwiseProduct(p).sum();
      }
    }
    dz = ldlt.solve(rhs);
    for (auto& s : st) {
      s.dS = s.Rp;
      for (std::size_t j = 0; j < s.def->var_index.size(); ++j)
        s.dS += dz[s.def->var_index[j]] * s.def->F[j];
      const Eigen::MatrixXd t = s.W * s.dS * s.Sinv;
      const Eigen::MatrixXd tc = s.dW_aff * s.dS_aff * s.Sinv;
      s.dW = mu_t * s.Sinv - s.W - 0.5 * (t + t.transpose()) -
             0.5 * (tc + tc.transpose());
    }
    ap = 1.0;
    ad = 1.0;
    for (auto& s : st) {
      ap = std::min(ap, max_step(s.llt_s, s.dS, tau));
      ad = std::min(ad, max_step(s.llt_w, s.dW, tau));
    }

    // Commit only a step whose endpoint factorizes; roundoff at the boundary
    // otherwise kills the next iteration.
    bool committed = false;
    for (int attempt = 0; attempt < 40 && !committed; ++attempt) {
      committed = true;
      for (auto& s : st) {
        Eigen::LLT<Eigen::MatrixXd> ls(Eigen::MatrixXd(s.S + ap * s.dS));
        Eigen::LLT<Eigen::MatrixXd> lw(Eigen::MatrixXd(s.W + ad * s.dW));
        if (ls.info() != Eigen::Success || lw.info() != Eigen::Success) {
          committed = false;
          ap *= 0.5;
          ad *= 0.5;
          break;
        }
      }
    }
    if (!committed || (ap < 1e-8 && ad < 1e-8)) {
      if (++stall_count >= 5) {
        // A stalled but feasible and nearly centered iterate is accepted when
        // it already meets a mildly relaxed gap; otherwise report failure.
        if (pinf < options.tol_feas && dinf < options.tol_feas &&
            rel_gap < 1e3 * options.tol_gap)
          break;
        throw diagnostics("step sizes collapsed");
      }
      if (!committed) continue;
    } else {
      stall_count = 0;
    }

    z += ap * dz;
    for (auto& s : st) {
      s.S += ap * s.dS;
      s.W += ad * s.dW;
    }
  }

  if (iter == options.max_iterations)
    throw diagnostics("iteration limit reached before convergence");
  if (options.box_radius > 0.0 &&
      z.cwiseAbs().maxCoeff() > 0.5 * options.box_radius)
    throw diagnostics("box safeguard active at solution; problem badly scaled");

  SdpSolution sol;
  sol.z = z;
  sol.objective_value = problem.objective.dot(z);
  sol.iterations = iter;
  sol.rel_gap = rel_gap;
  sol.primal_infeas = pinf;
  sol.dual_infeas = dinf;
  sol.block_min_eig.reserve(problem.blocks.size());
  for (const auto& blk : problem.blocks)
    sol.block_min_eig.push_back(min_eigenvalue(sdp_block_value(blk, z)));
  return sol;
}

}  // namespace vharv
