#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

namespace goodplay {

/// Point of R^3. Used for payoff vectors and, with a zero third coordinate,
/// for the planar fixtures.
struct Vec3 {
  std::array<double, 3> c{};

  constexpr Vec3() = default;
  constexpr Vec3(double a, double b, double d) : c{a, b, d} {}

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  constexpr Vec3& operator+=(const Vec3& o) {
    for (std::size_t i = 0; i < 3; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    for (std::size_t i = 0; i < 3; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(Vec3 a) { return a *= -1.0; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) {
  for (auto& v : a.c) v /= s;
  return a;
}

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
constexpr double sum(const Vec3& a) { return a[0] + a[1] + a[2]; }

inline bool all_finite(const Vec3& a) {
  return std::isfinite(a[0]) && std::isfinite(a[1]) && std::isfinite(a[2]);
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '(' << v[0] << ", " << v[1] << ", " << v[2] << ')';
}

/// Average payoff (or realized stage payoff) of the three players.
using PayoffVector = Vec3;

}  // namespace goodplay
