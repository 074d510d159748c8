#pragma once

#include <Eigen/Core>

#include "vharv/controller.hpp"
#include "vharv/params.hpp"

namespace vharv {

/// Clamp of the commanded quadrature current to the speed-dependent interval
/// inside which a feasible direct current exists.
/// Returns {i_q, saturated}.
std::pair<double, bool> saturate_iq(double i_q_star, double xhat,
                                    const TransducerParams& t, const BusParams& bus);

/// Field-weakening law: the least-magnitude nonpositive direct current that
/// keeps (i_d, i_q) inside the bus-voltage disc at the filtered velocity.
/// Requires i_q within its bounds at xhat; radicand dust below 1e-12 A^2 is
/// clipped, anything worse throws.
double field_weaken(double xhat, double i_q, const TransducerParams& t,
                    const BusParams& bus);

struct ControlOutput {
  double i_q_star = 0.0;
  double i_q = 0.0;
  double i_d = 0.0;
  Eigen::Vector3d i_abc = Eigen::Vector3d::Zero();
  bool saturated = false;
  bool weakening = false;
  double xhat = 0.0;  ///< low-pass filtered measured velocity
};

/// Discrete-time realization of the full vector control law: exact
/// zero-order-hold propagation of the synthesized current law, dynamic
/// saturation and field weakening at the filtered velocity, then the inverse
/// Clarke/Park map. Single-owner, one instance per control loop.
class VectorController {
 public:
  VectorController(const ControllerQ& K, const TransducerParams& t,
                   const BusParams& bus, double dt, double f_lp_hz = 100.0);

  /// Advances the current-law state one step under the held measurement and
  /// returns the raw command C_K x_K.
  double step_kq(double y);

  /// First-order low-pass update of the velocity estimate; unit DC gain.
  double lowpass_step(double xdot_meas);

  /// One full controller step: y is the measured output, theta_re the
  /// electrical rotor angle used only for the abc projection.
  ControlOutput full_step(double y, double theta_re);

  void reset();

  double xhat() const { return xhat_; }
  const Eigen::Vector4d& state() const { return x_k_; }
  const Eigen::Matrix4d& Ad() const { return ad_; }
  const Eigen::Vector4d& Bd() const { return bd_; }

 private:
  Eigen::Matrix4d ad_;
  Eigen::Vector4d bd_;
  Eigen::RowVector4d c_k_;
  TransducerParams trans_;
  BusParams bus_;
  double t_vy_ = 1.0;
  double lp_keep_ = 0.0;  // exp(-2 pi f_lp dt)
  Eigen::Vector4d x_k_ = Eigen::Vector4d::Zero();
  double xhat_ = 0.0;
};

}  // namespace vharv
