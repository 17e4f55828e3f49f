#pragma once

namespace obsvkit::detail {

// First-order forward-mode scalar. Nesting Dual<Dual<...>> propagates exact
// higher-order directional derivatives; the model only needs +,-,*,/.
template <typename T>
struct Dual {
  T re{};
  T du{};

  Dual() = default;
  Dual(double v) : re(v), du() {}  // NOLINT: implicit widening wanted
  Dual(const T& r, const T& d) : re(r), du(d) {}

  Dual operator-() const { return {-re, -du}; }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.re + b.re, a.du + b.du}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.re - b.re, a.du - b.du}; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return {a.re * b.re, a.re * b.du + a.du * b.re};
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.re / b.re;
    return {q, (a.du - q * b.du) / b.re};
  }

  Dual& operator+=(const Dual& o) { *this = *this + o; return *this; }
  Dual& operator-=(const Dual& o) { *this = *this - o; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
};

inline double real_part(double v) { return v; }
template <typename T>
double real_part(const Dual<T>& v) { return real_part(v.re); }

}  // namespace obsvkit::detail
