#include "vharv/runtime.hpp"

#include <cmath>

#include "vharv/errors.hpp"
#include "vharv/feasibility.hpp"
#include "vharv/linear_algebra.hpp"
#include "vharv/transforms.hpp"

namespace vharv {

std::pair<double, bool> saturate_iq(double i_q_star, double xhat,
                                    const TransducerParams& t,
                                    const BusParams& bus) {
  const auto [lo, hi] = iq_bounds(xhat, t, bus);
  if (i_q_star > hi) return {hi, true};
  if (i_q_star < lo) return {lo, true};
  return {i_q_star, false};
}

double field_weaken(double xhat, double i_q, const TransducerParams& t,
                    const BusParams& bus) {
  const auto region = FeasibilityRegion::at(xhat, t, bus);
  if (std::isinf(region.radius)) return 0.0;
  const double dq = i_q - region.center_iq;
  double radicand = region.radius * region.radius - dq * dq;
  if (radicand < 0.0) {
    if (radicand < -1e-12)
      throw SolverError("field_weaken: i_q outside its feasible interval");
    radicand = 0.0;
  }
  const double sigma = std::sqrt(radicand);
  return std::min(0.0, sigma + region.center_id);
}

VectorController::VectorController(const ControllerQ& K, const TransducerParams& t,
                                   const BusParams& bus, double dt, double f_lp_hz)
    : c_k_(K.C_K), trans_(t), bus_(bus) {
  if (!(dt > 0.0)) throw ValidationError("VectorController: dt must be > 0");
  if (!(f_lp_hz > 0.0)) throw ValidationError("VectorController: f_lp must be > 0");
  const auto [ad, bd] = zoh_discretize(K.A_K, K.B_K, dt);
  ad_ = ad;
  bd_ = bd;
  lp_keep_ = std::exp(-2.0 * M_PI * f_lp_hz * dt);
}

void VectorController::reset() {
  x_k_.setZero();
  xhat_ = 0.0;
}

double VectorController::step_kq(double y) {
  x_k_ = (ad_ * x_k_ + bd_ * y).eval();
  return c_k_ * x_k_;
}

double VectorController::lowpass_step(double xdot_meas) {
  xhat_ = lp_keep_ * xhat_ + (1.0 - lp_keep_) * xdot_meas;
  return xhat_;
}

ControlOutput VectorController::full_step(double y, double theta_re) {
  ControlOutput out;
  out.xhat = lowpass_step(t_vy_ * y);
  out.i_q_star = step_kq(y);
  const auto [i_q, saturated] = saturate_iq(out.i_q_star, out.xhat, trans_, bus_);
  out.i_q = i_q;
  out.saturated = saturated;
  out.i_d = field_weaken(out.xhat, i_q, trans_, bus_);
  out.weakening = out.i_d < 0.0;
  out.i_abc = dq_to_abc(theta_re, out.i_d, out.i_q);
  return out;
}

}  // namespace vharv
