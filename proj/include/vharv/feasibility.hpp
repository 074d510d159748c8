#pragma once

#include <cmath>
#include <utility>

#include "vharv/errors.hpp"
#include "vharv/params.hpp"

namespace vharv {

/// The finite-bus current constraint at a given transducer velocity is a disc
/// in the (i_q, i_d) plane. Center and radius are the closed forms obtained by
/// completing the square in the quasi-static voltage bound; deriving them once
/// here keeps the saturation, field-weakening, and feasibility paths on the
/// same geometry.
struct FeasibilityRegion {
  double center_iq = 0.0;
  double center_id = 0.0;
  double radius = 0.0;  ///< +inf when the bus voltage is unbounded

  static FeasibilityRegion at(double xdot, const TransducerParams& t,
                              const BusParams& bus) {
    const double two_rl = 2.0 * t.R * t.lead;
    const double npl_xdot = t.n_p * t.L * xdot;
    const double d = two_rl * two_rl + npl_xdot * npl_xdot;
    FeasibilityRegion r;
    r.center_iq = -2.0 * t.n_p * t.lambda_pm * t.R * t.lead * xdot / d;
    r.center_id = -t.n_p * t.n_p * xdot * xdot * t.lambda_pm * t.L / d;
    const double radius2 =
        (bus.delta * t.lead * bus.v_s) * (bus.delta * t.lead * bus.v_s) / d;
    if (!(radius2 > 0.0))
      throw SolverError("current feasibility disc is empty (non-positive radius)");
    r.radius = std::sqrt(radius2);
    return r;
  }

  /// Slack of the disc inequality; >= 0 inside, +inf with an unbounded bus.
  double margin(double i_d, double i_q) const {
    const double dq = i_q - center_iq;
    const double dd = i_d - center_id;
    return radius * radius - dq * dq - dd * dd;
  }

  bool contains(double i_d, double i_q) const { return margin(i_d, i_q) >= 0.0; }
};

/// Closed-form quadrature current interval {I_q_min, I_q_max} for which a
/// feasible direct current exists at this velocity.
inline std::pair<double, double> iq_bounds(double xdot, const TransducerParams& t,
                                           const BusParams& bus) {
  const auto region = FeasibilityRegion::at(xdot, t, bus);
  return {region.center_iq - region.radius, region.center_iq + region.radius};
}

struct DqFeasibility {
  bool ok = false;
  double margin = 0.0;  ///< [A^2]
};

/// Evaluates the quasi-static bus-voltage disc inequality.
inline DqFeasibility dq_feasible(double i_d, double i_q, double xdot,
                                 const TransducerParams& t, const BusParams& bus) {
  const double m = FeasibilityRegion::at(xdot, t, bus).margin(i_d, i_q);
  return {m >= 0.0, m};
}

/// Rotor-frame voltages that hold (i_d, i_q) constant at the given velocity.
/// Returns {v_d, v_q}.
inline std::pair<double, double> dq_steady_voltages(double i_d, double i_q,
                                                    double xdot,
                                                    const TransducerParams& t) {
  const double w = t.n_p * xdot / (2.0 * t.lead);  // electrical speed [rad/s]
  const double v_d = t.R * i_d - w * t.L * i_q;
  const double v_q = t.R * i_q + w * (t.L * i_d + t.lambda_pm);
  return {v_d, v_q};
}

/// Right-hand sides of the coupled rotor-frame current ODEs.
/// Returns {di_d/dt, di_q/dt}.
inline std::pair<double, double> dq_current_derivatives(double i_d, double i_q,
                                                        double v_d, double v_q,
                                                        double xdot,
                                                        const TransducerParams& t) {
  const double w = t.n_p * xdot / (2.0 * t.lead);
  const double did = (v_d - t.R * i_d + w * t.L * i_q) / t.L;
  const double diq = (v_q - t.R * i_q - w * (t.L * i_d + t.lambda_pm)) / t.L;
  return {did, diq};
}

}  // namespace vharv
