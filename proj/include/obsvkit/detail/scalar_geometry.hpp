#pragma once

#include <array>

namespace obsvkit::detail {

template <typename T>
using Vec3 = std::array<T, 3>;
template <typename T>
using Mat3 = std::array<std::array<T, 3>, 3>;  // row-major

template <typename T>
Vec3<T> vadd(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
template <typename T>
Vec3<T> vsub(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
template <typename T>
Vec3<T> vneg(const Vec3<T>& a) {
  return {-a[0], -a[1], -a[2]};
}
template <typename T, typename S>
Vec3<T> vscale(const S& c, const Vec3<T>& a) {
  return {c * a[0], c * a[1], c * a[2]};
}
template <typename T>
T vdot(const Vec3<T>& a, const Vec3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
template <typename T>
Vec3<T> vcross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[1] * b[2] - a[2] * b[1],
          a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
template <typename T>
Vec3<T> matvec(const Mat3<T>& A, const Vec3<T>& v) {
  return {vdot(A[0], v), vdot(A[1], v), vdot(A[2], v)};
}
template <typename T>
Vec3<T> matTvec(const Mat3<T>& A, const Vec3<T>& v) {
  return {A[0][0] * v[0] + A[1][0] * v[1] + A[2][0] * v[2],
          A[0][1] * v[0] + A[1][1] * v[1] + A[2][1] * v[2],
          A[0][2] * v[0] + A[1][2] * v[1] + A[2][2] * v[2]};
}

// C(s) = ((1 - s's)I + 2ss' - 2[s x]) / (1 + s's), global -> IMU.
template <typename T>
Mat3<T> cgr_matrix(const Vec3<T>& s) {
  T n = vdot(s, s);
  T d = 1.0 + n;
  T a = 1.0 - n;
  Mat3<T> C;
  C[0][0] = (a + 2.0 * s[0] * s[0]) / d;
  C[0][1] = (2.0 * s[0] * s[1] + 2.0 * s[2]) / d;
  C[0][2] = (2.0 * s[0] * s[2] - 2.0 * s[1]) / d;
  C[1][0] = (2.0 * s[1] * s[0] - 2.0 * s[2]) / d;
  C[1][1] = (a + 2.0 * s[1] * s[1]) / d;
  C[1][2] = (2.0 * s[1] * s[2] + 2.0 * s[0]) / d;
  C[2][0] = (2.0 * s[2] * s[0] + 2.0 * s[1]) / d;
  C[2][1] = (2.0 * s[2] * s[1] - 2.0 * s[0]) / d;
  C[2][2] = (a + 2.0 * s[2] * s[2]) / d;
  return C;
}

// ds/dtheta = (I + ss' + [s x]) / 2.
template <typename T>
Mat3<T> gibbs_rate_matrix(const Vec3<T>& s) {
  Mat3<T> J;
  J[0][0] = 0.5 * (1.0 + s[0] * s[0]);
  J[0][1] = 0.5 * (s[0] * s[1] - s[2]);
  J[0][2] = 0.5 * (s[0] * s[2] + s[1]);
  J[1][0] = 0.5 * (s[1] * s[0] + s[2]);
  J[1][1] = 0.5 * (1.0 + s[1] * s[1]);
  J[1][2] = 0.5 * (s[1] * s[2] - s[0]);
  J[2][0] = 0.5 * (s[2] * s[0] - s[1]);
  J[2][1] = 0.5 * (s[2] * s[1] + s[0]);
  J[2][2] = 0.5 * (1.0 + s[2] * s[2]);
  return J;
}

}  // namespace obsvkit::detail
