#pragma once

#include <Eigen/Core>

namespace vharv {

/// Strictly proper LTI quadrature-axis current law, same order as the plant.
struct ControllerQ {
  Eigen::Matrix4d A_K = Eigen::Matrix4d::Zero();
  Eigen::Vector4d B_K = Eigen::Vector4d::Zero();
  Eigen::RowVector4d C_K = Eigen::RowVector4d::Zero();
};

}  // namespace vharv
