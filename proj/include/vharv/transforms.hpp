#pragma once

#include <Eigen/Core>
#include <cmath>

namespace vharv {

/// Combined Clarke/Park projection of abc quantities onto the rotor frame.
/// Rows are d, q, 0.
inline Eigen::Matrix3d park_matrix(double theta_re) {
  constexpr double k23 = 2.0 / 3.0;
  const double a = theta_re;
  const double b = theta_re - 2.0 * M_PI / 3.0;
  const double c = theta_re + 2.0 * M_PI / 3.0;
  Eigen::Matrix3d p;
  p << std::cos(a), std::cos(b), std::cos(c),  //
      -std::sin(a), -std::sin(b), -std::sin(c),  //
      0.5, 0.5, 0.5;
  return k23 * p;
}

inline Eigen::Matrix3d inverse_park_matrix(double theta_re) {
  const double a = theta_re;
  const double b = theta_re - 2.0 * M_PI / 3.0;
  const double c = theta_re + 2.0 * M_PI / 3.0;
  Eigen::Matrix3d p;
  p << std::cos(a), -std::sin(a), 1.0,  //
      std::cos(b), -std::sin(b), 1.0,  //
      std::cos(c), -std::sin(c), 1.0;
  return p;
}

inline Eigen::Vector3d park(double theta_re, const Eigen::Vector3d& v_abc) {
  return park_matrix(theta_re) * v_abc;
}

inline Eigen::Vector3d inverse_park(double theta_re, const Eigen::Vector3d& v_dq0) {
  return inverse_park_matrix(theta_re) * v_dq0;
}

/// Three-phase currents realizing (i_d, i_q) with zero neutral current.
inline Eigen::Vector3d dq_to_abc(double theta_re, double i_d, double i_q) {
  const double sa = std::sin(theta_re), ca = std::cos(theta_re);
  const double sb = std::sin(theta_re - 2.0 * M_PI / 3.0),
               cb = std::cos(theta_re - 2.0 * M_PI / 3.0);
  const double sc = std::sin(theta_re + 2.0 * M_PI / 3.0),
               cc = std::cos(theta_re + 2.0 * M_PI / 3.0);
  return {ca * i_d - sa * i_q, cb * i_d - sb * i_q, cc * i_d - sc * i_q};
}

}  // namespace vharv
