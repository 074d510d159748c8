#include "vharv/plant.hpp"

#include <cmath>

#include "vharv/transducer.hpp"

namespace vharv {

StateSpace assemble_plant(const MechParams& mech, const TransducerParams& t,
                          const DisturbanceParams& dist, DriveMode mode,
                          const std::optional<Eigen::Matrix4d>& A_eq_override) {
  const auto [m_tilde, c_tilde] = effective_inertia(mech, t, mode);

  StateSpace ss;
  ss.A << 0.0, 1.0, 0.0, 0.0,  //
      -mech.k / m_tilde, -c_tilde / m_tilde, 0.0, -mech.m / m_tilde,  //
      0.0, 0.0, 0.0, 1.0,  //
      0.0, 0.0, -dist.omega_a * dist.omega_a, -2.0 * dist.omega_a * dist.zeta_a;
  if (A_eq_override) ss.A = *A_eq_override;

  ss.B << 0.0, force_constant(t) / m_tilde, 0.0, 0.0;
  ss.B_w << 0.0, 0.0, 0.0, 2.0 * dist.sigma_a * std::sqrt(dist.zeta_a * dist.omega_a);
  ss.F << 0.0, -t.f_c / m_tilde, 0.0, 0.0;
  ss.C << 0.0, t.n_p * t.lambda_pm / (2.0 * t.lead), 0.0, 0.0;
  ss.C_v << 0.0, 1.0, 0.0, 0.0;
  ss.C_y = ss.C_v;
  ss.r_loss = t.R;
  return ss;
}

}  // namespace vharv
