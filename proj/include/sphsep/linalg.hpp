#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sphsep/errors.hpp"

namespace sphsep {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double four_pi = 4.0 * pi;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(double s, Vec3 v) { return v *= s; }
inline Vec3 operator*(Vec3 v, double s) { return v *= s; }
inline Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// Direction on the unit sphere.  Construction checks |v| = 1 so downstream
// kernel/harmonic evaluators can rely on it; hot loops that produce unit
// vectors by construction use assume_unit to skip the check.
class UnitVector {
 public:
  explicit UnitVector(const Vec3& v) : v_(v) {
    if (std::abs(norm(v) - 1.0) > 1e-12)
      throw precondition_error("UnitVector: |v| deviates from 1 by more than 1e-12");
  }

  static UnitVector from_angles(double theta, double phi) {
    const double st = std::sin(theta);
    return UnitVector(Vec3{st * std::cos(phi), st * std::sin(phi), std::cos(theta)}, 0);
  }
  static UnitVector assume_unit(const Vec3& v) { return UnitVector(v, 0); }

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }

 private:
  UnitVector(const Vec3& v, int) : v_(v) {}
  Vec3 v_;
};

struct Mat3 {
  // Row-major entries.
  std::array<double, 9> a{};

  double& operator()(int i, int j) { return a[3 * i + j]; }
  double operator()(int i, int j) const { return a[3 * i + j]; }

  Mat3& operator+=(const Mat3& o) {
    for (int i = 0; i < 9; ++i) a[i] += o.a[i];
    return *this;
  }
  Mat3& operator-=(const Mat3& o) {
    for (int i = 0; i < 9; ++i) a[i] -= o.a[i];
    return *this;
  }
  Mat3& operator*=(double s) {
    for (int i = 0; i < 9; ++i) a[i] *= s;
    return *this;
  }

  static Mat3 zero() { return {}; }
  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
};

inline Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
inline Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
inline Mat3 operator*(double s, Mat3 m) { return m *= s; }

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
          m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
          m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

// v^T M (left application), convenient for tangency checks.
inline Vec3 transpose_apply(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v.x + m(1, 0) * v.y + m(2, 0) * v.z,
          m(0, 1) * v.x + m(1, 1) * v.y + m(2, 1) * v.z,
          m(0, 2) * v.x + m(1, 2) * v.y + m(2, 2) * v.z};
}

inline Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 m;
  m(0, 0) = a.x * b.x; m(0, 1) = a.x * b.y; m(0, 2) = a.x * b.z;
  m(1, 0) = a.y * b.x; m(1, 1) = a.y * b.y; m(1, 2) = a.y * b.z;
  m(2, 0) = a.z * b.x; m(2, 1) = a.z * b.y; m(2, 2) = a.z * b.z;
  return m;
}

inline double max_abs(const Mat3& m) {
  double r = 0.0;
  for (double v : m.a) r = std::max(r, std::abs(v));
  return r;
}

inline double max_abs(const Vec3& v) {
  return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

// Dense linear solve with partial pivoting.  Only used for modest systems
// (quadrature weight setup), so no attempt at blocking or refinement.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw precondition_error("solve_dense: shape mismatch");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a[perm[col] * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a[perm[r] * n + col]);
      if (v > best) { best = v; piv = r; }
    }
    if (best == 0.0) throw precondition_error("solve_dense: singular matrix");
    std::swap(perm[col], perm[piv]);

    const double d = a[perm[col] * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[perm[r] * n + col] / d;
      if (f == 0.0) continue;
      a[perm[r] * n + col] = 0.0;
      for (std::size_t c = col + 1; c < n; ++c) a[perm[r] * n + c] -= f * a[perm[col] * n + c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }

  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[perm[i]];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[perm[i] * n + c] * x[c];
    x[i] = s / a[perm[i] * n + i];
  }
  return x;
}

}  // namespace sphsep
