#pragma once

#include <Eigen/Dense>
#include <vector>

#include "obsvkit/detail/flat_model.hpp"
#include "obsvkit/state.hpp"

namespace obsvkit {

namespace detail {

inline std::vector<double> to_std(const Eigen::VectorXd& x) {
  return {x.data(), x.data() + x.size()};
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

// Unforced drift: attitude driven by gyro bias, velocity by gravity and
// accel bias, position by velocity; biases and landmarks constant.
inline Eigen::VectorXd drift_field(const Eigen::VectorXd& x, const Gravity& gravity = {}) {
  detail::Vec3<double> g{gravity.g.x(), gravity.g.y(), gravity.g.z()};
  return detail::to_eigen(
      detail::field_eval({detail::FieldKind::kDrift, 0}, detail::to_std(x), g));
}

// Control field multiplying gyro input axis `axis`.
inline Eigen::VectorXd gyro_field(const Eigen::VectorXd& x, int axis) {
  return detail::to_eigen(
      detail::field_eval({detail::FieldKind::kGyro, axis}, detail::to_std(x), {}));
}

// Control field multiplying accelerometer input axis `axis`.
inline Eigen::VectorXd accel_field(const Eigen::VectorXd& x, int axis) {
  return detail::to_eigen(
      detail::field_eval({detail::FieldKind::kAccel, axis}, detail::to_std(x), {}));
}

// Control-affine assembly: drift plus input-weighted control fields.
inline Eigen::VectorXd full_field(const Eigen::VectorXd& x, const Eigen::Vector3d& omega,
                                  const Eigen::Vector3d& accel, const Gravity& gravity = {}) {
  Eigen::VectorXd f = drift_field(x, gravity);
  for (int i = 0; i < 3; ++i) {
    if (omega[i] != 0.0) f += omega[i] * gyro_field(x, i);
    if (accel[i] != 0.0) f += accel[i] * accel_field(x, i);
  }
  return f;
}

inline Eigen::Vector3d feature_in_imu(const Eigen::VectorXd& x, int feature) {
  auto q = detail::feature_in_imu_eval(detail::to_std(x), feature);
  return {q[0], q[1], q[2]};
}

// Perspective projection of a landmark onto the normalized image plane.
inline Eigen::Vector2d camera_observe(const Eigen::VectorXd& x, int feature) {
  auto h = detail::obs_eval({detail::ObsKind::kCamera, feature}, detail::to_std(x));
  return {h[0], h[1]};
}

// Landmark position in the sensor frame, observed directly.
inline Eigen::Vector3d lidar_observe(const Eigen::VectorXd& x, int feature) {
  auto h = detail::obs_eval({detail::ObsKind::kLidar, feature}, detail::to_std(x));
  return {h[0], h[1], h[2]};
}

}  // namespace obsvkit
