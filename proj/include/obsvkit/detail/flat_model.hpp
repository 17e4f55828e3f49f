#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "obsvkit/constants.hpp"
#include "obsvkit/detail/dual.hpp"
#include "obsvkit/detail/scalar_geometry.hpp"
#include "obsvkit/errors.hpp"

// Scalar-generic model evaluation on flat state vectors. Instantiated with
// plain doubles and with nested dual numbers, so every routine here must stay
// within +,-,*,/ on the scalar type.
namespace obsvkit::detail {

enum class FieldKind { kDrift, kGyro, kAccel };

struct FieldId {
  FieldKind kind{FieldKind::kDrift};
  int axis{0};  // 0..2 for gyro/accel; ignored for drift
};

enum class ObsKind { kCamera, kLidar };

struct ObsSpec {
  ObsKind kind{ObsKind::kCamera};
  int feature{0};
  int out_dim() const { return kind == ObsKind::kCamera ? 2 : 3; }
};

template <typename T>
Vec3<T> seg3(const std::vector<T>& x, int at) {
  return {x[at], x[at + 1], x[at + 2]};
}

// Pair every coordinate with a perturbation direction, raising the scalar
// type one dual level.
template <typename T>
std::vector<Dual<T>> lift_state(const std::vector<T>& x, const std::vector<T>& dx) {
  std::vector<Dual<T>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.emplace_back(x[i], dx[i]);
  return out;
}

template <typename T>
std::vector<T> dual_parts(const std::vector<Dual<T>>& v) {
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& d : v) out.push_back(d.du);
  return out;
}

// Drift and control vector fields of the aided inertial model with inputs
// held at zero: the drift couples attitude to gyro bias, velocity to gravity
// and accel bias, and position to velocity; the gyro/accel control fields
// inject one input axis each.
template <typename T>
std::vector<T> field_eval(const FieldId& id, const std::vector<T>& x,
                          const Vec3<double>& gravity) {
  const int n = static_cast<int>(x.size());
  std::vector<T> f(static_cast<std::size_t>(n), T(0.0));
  Vec3<T> s = seg3(x, 0);
  switch (id.kind) {
    case FieldKind::kDrift: {
      Vec3<T> b_g = seg3(x, 3);
      Vec3<T> v = seg3(x, 6);
      Vec3<T> b_a = seg3(x, 9);
      Mat3<T> C = cgr_matrix(s);
      Mat3<T> J = gibbs_rate_matrix(s);
      Vec3<T> sdot = vneg(matvec(J, b_g));
      Vec3<T> g = {T(gravity[0]), T(gravity[1]), T(gravity[2])};
      Vec3<T> vdot = vsub(g, matTvec(C, b_a));
      for (int k = 0; k < 3; ++k) {
        f[k] = sdot[k];
        f[6 + k] = vdot[k];
        f[12 + k] = v[k];
      }
      break;
    }
    case FieldKind::kGyro: {
      Mat3<T> J = gibbs_rate_matrix(s);
      for (int k = 0; k < 3; ++k) f[k] = J[k][id.axis];
      break;
    }
    case FieldKind::kAccel: {
      Mat3<T> C = cgr_matrix(s);
      // v-block picks up column `axis` of C', i.e. row `axis` of C.
      for (int k = 0; k < 3; ++k) f[6 + k] = C[id.axis][k];
      break;
    }
  }
  return f;
}

// Feature position expressed in the IMU frame: C(s) (p_f - p_I).
template <typename T>
Vec3<T> feature_in_imu_eval(const std::vector<T>& x, int feature) {
  Vec3<T> s = seg3(x, 0);
  Vec3<T> p_I = seg3(x, 12);
  Vec3<T> p_f = seg3(x, 15 + 3 * feature);
  return matvec(cgr_matrix(s), vsub(p_f, p_I));
}

template <typename T>
std::vector<T> obs_eval(const ObsSpec& spec, const std::vector<T>& x) {
  Vec3<T> q = feature_in_imu_eval(x, spec.feature);
  if (spec.kind == ObsKind::kLidar) return {q[0], q[1], q[2]};
  if (real_part(q[2]) <= kPzMin) {
    throw CheiralityError("feature depth " + std::to_string(real_part(q[2])) +
                          " at or below minimum " + std::to_string(kPzMin));
  }
  return {q[0] / q[2], q[1] / q[2]};
}

}  // namespace obsvkit::detail
