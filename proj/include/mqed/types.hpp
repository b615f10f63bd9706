#pragma once

#include <complex>

#include <Eigen/Dense>

namespace mqed {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;

inline constexpr Complex kI{0.0, 1.0};

}  // namespace mqed
