#pragma once

#include <Eigen/Dense>

#include "obsvkit/detail/scalar_geometry.hpp"
#include "obsvkit/state.hpp"

namespace obsvkit {

namespace detail {

inline Eigen::Matrix3d to_eigen3(const Mat3<double>& A) {
  Eigen::Matrix3d out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out(r, c) = A[r][c];
  return out;
}

}  // namespace detail

// Rotation global -> IMU parameterized by the Gibbs vector s = tan(theta/2) u.
inline Eigen::Matrix3d cgr_rotation(const Eigen::Vector3d& s) {
  return detail::to_eigen3(detail::cgr_matrix<double>({s.x(), s.y(), s.z()}));
}

// Maps rotation-vector rate to Gibbs-vector rate: (I + ss' + [s x]) / 2.
inline Eigen::Matrix3d gibbs_rate(const Eigen::Vector3d& s) {
  return detail::to_eigen3(detail::gibbs_rate_matrix<double>({s.x(), s.y(), s.z()}));
}

// Inverse of gibbs_rate in closed form: 2 (I - [s x]) / (1 + s's).
inline Eigen::Matrix3d gibbs_rate_inverse(const Eigen::Vector3d& s) {
  return 2.0 * (Eigen::Matrix3d::Identity() - skew(s)) / (1.0 + s.squaredNorm());
}

}  // namespace obsvkit
