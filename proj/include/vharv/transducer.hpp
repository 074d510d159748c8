#pragma once

#include <algorithm>
#include <cmath>

#include "vharv/params.hpp"

namespace vharv {

/// Velocities below this are treated as zero when selecting the friction
/// branch; exact zero crossings are measure-zero in floating point.
inline constexpr double kStickVelocityEps = 1e-9;

/// Electromechanical force per quadrature ampere [N/A].
inline double force_constant(const TransducerParams& t) {
  return 3.0 * t.n_p * t.lambda_pm / (4.0 * t.lead);
}

/// f_e produced by the quadrature-axis current.
inline double electromech_force(double i_q, const TransducerParams& t) {
  return force_constant(t) * i_q;
}

/// Screw efficiency function of the nut power sign. The zero-power value is
/// the forward branch; both g branches are continuous through zero so the
/// choice cannot be observed.
inline double h_of(double u, double eta) { return u >= 0.0 ? eta : 1.0 / eta; }

namespace detail {

inline double g_plus(double u, double eta, double j_over_l2m) {
  const double h = h_of(u, eta);
  return h * u / (1.0 + j_over_l2m * h);
}

inline double g_minus(double u, double eta, double j_over_l2m) {
  const double h = h_of(-u, eta);
  return h * u / (1.0 + j_over_l2m * h);
}

inline double beta_term(double x, double xdot, double f_e, double a,
                        const MechParams& mech, const TransducerParams& t) {
  const double l2 = t.lead * t.lead;
  return (t.J / l2) * a + (t.J * mech.k / (mech.m * l2)) * x +
         (t.J * mech.c / (mech.m * l2) - t.B_visc / l2) * xdot + f_e;
}

}  // namespace detail

/// True when Coulomb friction can hold the mass at zero velocity.
inline bool sticking_holds(double x, double f_e, double a, const MechParams& mech,
                           const TransducerParams& t) {
  const double q = mech.m * a + mech.k * x;
  const double lo = -q + h_of(f_e, t.eta) * f_e;
  const double hi = q - h_of(-f_e, t.eta) * f_e;
  return t.f_c >= std::max(lo, hi);
}

/// Unique transducer force map: forward/backward sliding branches plus the
/// sticking value when friction pins the trajectory at zero velocity.
inline double transducer_force(double x, double xdot, double f_e, double a,
                               const MechParams& mech, const TransducerParams& t) {
  const double l2 = t.lead * t.lead;
  const double j_over_l2m = t.J / (l2 * mech.m);
  if (xdot > kStickVelocityEps) {
    const double beta = detail::beta_term(x, xdot, f_e, a, mech, t);
    return detail::g_plus(beta + j_over_l2m * t.f_c, t.eta, j_over_l2m) - t.f_c;
  }
  if (xdot < -kStickVelocityEps) {
    const double beta = detail::beta_term(x, xdot, f_e, a, mech, t);
    return detail::g_minus(beta - j_over_l2m * t.f_c, t.eta, j_over_l2m) + t.f_c;
  }
  const double q = mech.m * a + mech.k * x;
  if (t.f_c < -q + h_of(f_e, t.eta) * f_e) {
    const double beta = detail::beta_term(x, xdot, f_e, a, mech, t);
    return detail::g_plus(beta + j_over_l2m * t.f_c, t.eta, j_over_l2m) - t.f_c;
  }
  if (t.f_c < q - h_of(-f_e, t.eta) * f_e) {
    const double beta = detail::beta_term(x, xdot, f_e, a, mech, t);
    return detail::g_minus(beta - j_over_l2m * t.f_c, t.eta, j_over_l2m) + t.f_c;
  }
  return q;  // stuck: f cancels the applied load
}

/// Mechanical power delivered to the ballscrew nut. Negative means the
/// transducer is being backdriven (generating).
inline double nut_power(double x, double xdot, double f_e, double a,
                        const MechParams& mech, const TransducerParams& t) {
  const double f = transducer_force(x, xdot, f_e, a, mech, t);
  const double xddot = (-mech.k * x - mech.c * xdot - mech.m * a + f) / mech.m;
  const double l2 = t.lead * t.lead;
  return (f_e - (t.J / l2) * xddot - (t.B_visc / l2) * xdot) * xdot;
}

}  // namespace vharv
