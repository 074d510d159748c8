#pragma once

#include <Eigen/Core>
#include <optional>

#include "vharv/params.hpp"

namespace vharv {

/// Augmented 4-state plant, state xi = [x, xdot, d, a].
struct StateSpace {
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  Eigen::Vector4d B = Eigen::Vector4d::Zero();    ///< quadrature-current input
  Eigen::Vector4d B_w = Eigen::Vector4d::Zero();  ///< white-noise input
  Eigen::Vector4d F = Eigen::Vector4d::Zero();    ///< Coulomb friction direction
  Eigen::RowVector4d C = Eigen::RowVector4d::Zero();    ///< power cross-term row
  Eigen::RowVector4d C_v = Eigen::RowVector4d::Zero();  ///< velocity selector
  Eigen::RowVector4d C_y = Eigen::RowVector4d::Zero();  ///< measured output
  double r_loss = 0.0;  ///< resistive-loss coefficient in the power objective [Ohm]
};

/// Measurement map: velocity-only by default.
struct MeasurementModel {
  Eigen::RowVector4d C_y{0.0, 1.0, 0.0, 0.0};
  double phi_n = 1e-6;  ///< white measurement-noise intensity
  double T_vy = 1.0;    ///< velocity selector on y
};

/// Builds the augmented linear(ized) plant. An override for A slots in the
/// statistically linearized matrix without touching the input/noise paths.
StateSpace assemble_plant(const MechParams& mech, const TransducerParams& t,
                          const DisturbanceParams& dist, DriveMode mode,
                          const std::optional<Eigen::Matrix4d>& A_eq_override = {});

inline MeasurementModel velocity_measurement(const MeasurementParams& m) {
  MeasurementModel out;
  out.phi_n = m.phi_n;
  return out;
}

}  // namespace vharv
