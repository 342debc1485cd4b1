#pragma once

#include <cmath>
#include <string>

#include "sphsep/legendre.hpp"
#include "sphsep/linalg.hpp"

namespace sphsep {

// Degree/order label for the real orthonormal harmonic basis: degree n >= 0,
// order label k in 1..2n+1.  The signed order is m = k - n - 1; negative m
// selects the sin(|m| phi) branch, positive m the cos(m phi) branch.
struct HarmonicIndex {
  int n = 0;
  int k = 1;

  int m() const { return k - n - 1; }

  void validate() const {
    if (n < 0) throw precondition_error("HarmonicIndex: degree must be >= 0");
    if (k < 1 || k > 2 * n + 1)
      throw precondition_error("HarmonicIndex: order label " + std::to_string(k) +
                               " outside 1.." + std::to_string(2 * n + 1));
  }
};

enum class VshBasis { plain, tilde };

// One of the three components of a vector-harmonic basis.  The plain basis
// splits into radial / surface-gradient / surface-curl parts; the tilde basis
// mixes the first two so that each component matches one physical source
// (interior sources, exterior sources, tangential currents).
struct VshKind {
  VshBasis basis = VshBasis::plain;
  int component = 1;  // 1, 2, or 3

  void validate() const {
    if (component < 1 || component > 3)
      throw precondition_error("VshKind: component must be 1, 2, or 3");
  }
};

// Squared norms of the unnormalized operator outputs; dividing by their square
// roots makes the vector harmonics orthonormal.  A zero constant marks an
// inadmissible (degree, component) pair.
struct NormalizationConstants {
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0;

  static NormalizationConstants plain(int n) {
    const double nn = static_cast<double>(n);
    return {1.0, nn * (nn + 1.0), nn * (nn + 1.0)};
  }
  static NormalizationConstants tilde(int n) {
    const double nn = static_cast<double>(n);
    return {(nn + 1.0) * (2.0 * nn + 1.0), nn * (2.0 * nn + 1.0), nn * (nn + 1.0)};
  }
};

inline double normalization_constant(VshKind kind, int n) {
  kind.validate();
  if (n < 0) throw precondition_error("normalization_constant: degree must be >= 0");
  const NormalizationConstants c = kind.basis == VshBasis::plain
                                       ? NormalizationConstants::plain(n)
                                       : NormalizationConstants::tilde(n);
  const double mu = kind.component == 1 ? c.mu1 : (kind.component == 2 ? c.mu2 : c.mu3);
  if (mu == 0.0)
    throw precondition_error("normalization_constant: component " +
                             std::to_string(kind.component) + " inadmissible at degree " +
                             std::to_string(n));
  return mu;
}

namespace detail {

// Fully normalized associated Legendre function Q_n^m(theta) without the
// Condon-Shortley phase, plus its theta-derivative.  Normalization is such
// that the real harmonics built from Q are orthonormal on the sphere.
// Requires sin(theta) > 0; the poles are handled by the callers via limits.
struct QPair {
  double q, dq;
};

inline QPair normalized_assoc_legendre(int n, int m, double ct, double st) {
  double qmm = std::sqrt(1.0 / four_pi);
  for (int j = 1; j <= m; ++j) qmm *= std::sqrt((2.0 * j + 1.0) / (2.0 * j)) * st;
  if (n == m) return {qmm, m == 0 ? 0.0 : m * ct * qmm / st};

  double qprev = qmm;
  double q = std::sqrt(2.0 * m + 3.0) * ct * qmm;
  for (int j = m + 2; j <= n; ++j) {
    const double jj = j, mm = m;
    const double alpha = std::sqrt((4.0 * jj * jj - 1.0) / (jj * jj - mm * mm));
    const double alpha_prev =
        std::sqrt((4.0 * (jj - 1.0) * (jj - 1.0) - 1.0) / ((jj - 1.0) * (jj - 1.0) - mm * mm));
    const double qnext = alpha * (ct * q - qprev / alpha_prev);
    qprev = q;
    q = qnext;
  }
  const double nn = n, mm = m;
  const double beta = std::sqrt((nn * nn - mm * mm) * (2.0 * nn + 1.0) / (2.0 * nn - 1.0));
  return {q, (nn * ct * q - beta * qprev) / st};
}

// Limit of Q_n^1(theta)/sin(theta) at the poles (u = cos(theta) = +-1); the
// only ingredient needed for pole values of the surface derivatives.
inline double q1_ratio_at_pole(int n, double u) {
  double gprev = std::sqrt(3.0 / (8.0 * pi));  // degree 1
  if (n == 1) return gprev;
  double g = std::sqrt(5.0) * u * gprev;  // degree 2
  for (int j = 3; j <= n; ++j) {
    const double jj = j;
    const double alpha = std::sqrt((4.0 * jj * jj - 1.0) / (jj * jj - 1.0));
    const double alpha_prev =
        std::sqrt((4.0 * (jj - 1.0) * (jj - 1.0) - 1.0) / ((jj - 1.0) * (jj - 1.0) - 1.0));
    const double gnext = alpha * (u * g - gprev / alpha_prev);
    gprev = g;
    g = gnext;
  }
  return g;
}

inline constexpr double pole_sin_eps = 1e-12;

}  // namespace detail

// Scalar harmonic value together with its tangential first derivatives:
// surface_grad is the surface gradient, surface_curl is xi ^ surface_grad.
struct ShDerivatives {
  double value = 0.0;
  Vec3 surface_grad{};
  Vec3 surface_curl{};
};

inline ShDerivatives sh_surface_gradients(const HarmonicIndex& idx, const UnitVector& xi) {
  idx.validate();
  const int n = idx.n, m = idx.m(), am = std::abs(m);
  const double ct = xi.z();
  const double st = std::hypot(xi.x(), xi.y());
  ShDerivatives out;

  if (st < detail::pole_sin_eps) {
    // Limits at the poles: only m = 0 contributes a value and only |m| = 1
    // contributes tangential derivatives.
    const double s = ct > 0.0 ? 1.0 : -1.0;
    if (m == 0) out.value = std::sqrt((2.0 * n + 1.0) / four_pi) * ((n % 2 == 1 && s < 0.0) ? -1.0 : 1.0);
    if (am == 1) {
      const double c = std::sqrt(2.0) * detail::q1_ratio_at_pole(n, s);
      out.surface_grad = (m == 1) ? Vec3{c, 0.0, 0.0} : Vec3{0.0, c, 0.0};
      out.surface_curl = cross(Vec3{0.0, 0.0, s}, out.surface_grad);
    }
    return out;
  }

  const auto [q, dq] = detail::normalized_assoc_legendre(n, am, ct, st);
  double value, d_theta, d_phi_over_sin;
  if (m == 0) {
    value = q;
    d_theta = dq;
    d_phi_over_sin = 0.0;
  } else {
    const double r2 = std::sqrt(2.0);
    const double phi = std::atan2(xi.y(), xi.x());
    const double c = std::cos(am * phi), sn = std::sin(am * phi);
    if (m > 0) {
      value = r2 * q * c;
      d_theta = r2 * dq * c;
      d_phi_over_sin = -r2 * am * q * sn / st;
    } else {
      value = r2 * q * sn;
      d_theta = r2 * dq * sn;
      d_phi_over_sin = r2 * am * q * c / st;
    }
  }

  const double cp = xi.x() / st, sp = xi.y() / st;
  const Vec3 e_theta{ct * cp, ct * sp, -st};
  const Vec3 e_phi{-sp, cp, 0.0};
  out.value = value;
  out.surface_grad = d_theta * e_theta + d_phi_over_sin * e_phi;
  out.surface_curl = d_theta * e_phi - d_phi_over_sin * e_theta;
  return out;
}

inline double sh_eval(const HarmonicIndex& idx, const UnitVector& xi) {
  return sh_surface_gradients(idx, xi).value;
}

// Orthonormal vector harmonic of the requested basis and component.
inline Vec3 vsh_eval(VshKind kind, const HarmonicIndex& idx, const UnitVector& xi) {
  const double mu = normalization_constant(kind, idx.n);  // validates admissibility
  const auto d = sh_surface_gradients(idx, xi);
  const double nn = static_cast<double>(idx.n);
  const double inv = 1.0 / std::sqrt(mu);
  const Vec3 radial = d.value * xi.vec();

  if (kind.basis == VshBasis::plain) {
    switch (kind.component) {
      case 1: return radial;
      case 2: return inv * d.surface_grad;
      default: return inv * d.surface_curl;
    }
  }
  switch (kind.component) {
    case 1: return inv * ((nn + 1.0) * radial - d.surface_grad);
    case 2: return inv * (nn * radial + d.surface_grad);
    default: return inv * d.surface_curl;
  }
}

}  // namespace sphsep
