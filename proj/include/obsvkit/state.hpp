#pragma once

#include <Eigen/Dense>
#include <vector>

namespace obsvkit {

// Which aiding sensor closes the loop: camera bearings or direct landmark
// positions.
enum class SystemMode { kVins, kLins };

struct Gravity {
  Eigen::Vector3d g{0.0, 0.0, -9.81};
};

// State of the aided inertial system on the Gibbs (Cayley) attitude chart:
// attitude s, gyro bias b_g, velocity v, accel bias b_a, IMU position p_I,
// and n landmark positions, all in the global frame. Flat layout is
// [s, b_g, v, b_a, p_I, p_f1, ..., p_fn], dimension 15 + 3n.
struct State {
  Eigen::Vector3d s{Eigen::Vector3d::Zero()};
  Eigen::Vector3d b_g{Eigen::Vector3d::Zero()};
  Eigen::Vector3d v{Eigen::Vector3d::Zero()};
  Eigen::Vector3d b_a{Eigen::Vector3d::Zero()};
  Eigen::Vector3d p_I{Eigen::Vector3d::Zero()};
  std::vector<Eigen::Vector3d> features;

  int num_features() const { return static_cast<int>(features.size()); }
  int dim() const { return 15 + 3 * num_features(); }

  Eigen::VectorXd flatten() const {
    Eigen::VectorXd x(dim());
    x.segment<3>(0) = s;
    x.segment<3>(3) = b_g;
    x.segment<3>(6) = v;
    x.segment<3>(9) = b_a;
    x.segment<3>(12) = p_I;
    for (int i = 0; i < num_features(); ++i) x.segment<3>(15 + 3 * i) = features[i];
    return x;
  }

  static State unflatten(const Eigen::VectorXd& x) {
    State st;
    st.s = x.segment<3>(0);
    st.b_g = x.segment<3>(3);
    st.v = x.segment<3>(6);
    st.b_a = x.segment<3>(9);
    st.p_I = x.segment<3>(12);
    int n = (static_cast<int>(x.size()) - 15) / 3;
    st.features.resize(n);
    for (int i = 0; i < n; ++i) st.features[i] = x.segment<3>(15 + 3 * i);
    return st;
  }
};

inline Eigen::Matrix3d skew(const Eigen::Vector3d& a) {
  Eigen::Matrix3d S;
  S << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return S;
}

}  // namespace obsvkit
