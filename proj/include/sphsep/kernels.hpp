#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "sphsep/legendre.hpp"
#include "sphsep/linalg.hpp"

namespace sphsep {

// ---------------------------------------------------------------------------
// Analytic zonal kernels as functions of t = xi . eta.
//
//   green:        fundamental solution of the surface Laplacian (up to the
//                 constant mean), logarithmically singular at t = 1
//   single_layer: inverse square-root distance kernel, singular at t = 1
//   dinv_green:   the single-layer smoothing operator applied to green;
//                 bounded, with singular derivative at t = 1
// ---------------------------------------------------------------------------

inline double green_eval(double t) {
  if (!(t >= -1.0 && t < 1.0))
    throw precondition_error("green_eval: t must lie in [-1, 1); kernel is singular at t = 1");
  return std::log1p(-t) / four_pi + (1.0 - std::log(2.0)) / four_pi;
}

// k-th derivative, k >= 1: -(k-1)! / (4 pi (1-t)^k).
inline double green_deriv(int k, double t) {
  if (k < 1 || k > 3) throw precondition_error("green_deriv: order must be 1..3");
  if (!(t >= -1.0 && t < 1.0)) throw precondition_error("green_deriv: t must lie in [-1, 1)");
  const double u = 1.0 - t;
  double d = -1.0 / (four_pi * u);
  for (int j = 2; j <= k; ++j) d *= (j - 1) / u;
  return d;
}

inline double single_layer_eval(double t) {
  if (!(t >= -1.0 && t < 1.0))
    throw precondition_error("single_layer_eval: t must lie in [-1, 1)");
  return 1.0 / std::sqrt(2.0 * (1.0 - t));
}

// k-th derivative, k >= 1: each step multiplies by (2k-1) / (2 (1-t)).
inline double single_layer_deriv(int k, double t) {
  if (k < 1 || k > 3) throw precondition_error("single_layer_deriv: order must be 1..3");
  if (!(t >= -1.0 && t < 1.0)) throw precondition_error("single_layer_deriv: t must lie in [-1, 1)");
  const double u = 1.0 - t;
  double d = 1.0 / std::sqrt(2.0 * u);
  for (int j = 1; j <= k; ++j) d *= (2.0 * j - 1.0) / (2.0 * u);
  return d;
}

// Partial sum of the spectral series for dinv_green: the degree-n coefficient
// of the expansion in Legendre polynomials is (1/(n+1) - 1/n)/(2 pi).
inline double dinv_green_series(double t, int n_terms = 10000) {
  if (n_terms < 1) throw precondition_error("dinv_green_series: need at least one term");
  if (!(t >= -1.0 && t <= 1.0)) throw precondition_error("dinv_green_series: t outside [-1, 1]");
  double acc = 0.0, pm1 = 1.0, p = t;
  for (int n = 1; n <= n_terms; ++n) {
    acc += (1.0 / (n + 1.0) - 1.0 / n) * p;
    const double pn = ((2.0 * n + 1.0) * t * p - n * pm1) / (n + 1.0);
    pm1 = p;
    p = pn;
  }
  return acc / two_pi;
}

inline double dinv_green_eval(double t) {
  if (!(t >= -1.0 && t <= 1.0)) throw precondition_error("dinv_green_eval: t outside [-1, 1]");
  if (t == 1.0) return -1.0 / two_pi;
  // Near t = -1 the closed form multiplies a vanishing factor by a diverging
  // one and cancels catastrophically; the absolutely convergent series is
  // accurate there (the limit value is (2 ln 2 - 1)/(2 pi)).
  if (t < -1.0 + 1e-9) return dinv_green_series(t);
  const double s = single_layer_eval(t);
  return std::log((1.0 + t) * (0.5 - 1.0 / (1.0 - 2.0 * s))) / two_pi - 1.0 / two_pi;
}

inline double dinv_green_deriv1(double t) {
  const double s = single_layer_eval(t);  // range checked there
  return (0.5 - s - 1.0 / (2.0 + 4.0 * s)) / two_pi;
}

namespace detail {

// derivs[p] = p-th derivative of the kernel at t, p = 0..kmax (kmax <= 3).
enum class ZonalKind { green, single_layer, dinv_green };

inline void zonal_derivs(ZonalKind kind, double t, int kmax, std::array<double, 4>& out) {
  switch (kind) {
    case ZonalKind::green:
      out[0] = green_eval(t);
      for (int k = 1; k <= kmax; ++k) out[k] = green_deriv(k, t);
      return;
    case ZonalKind::single_layer:
      out[0] = single_layer_eval(t);
      for (int k = 1; k <= kmax; ++k) out[k] = single_layer_deriv(k, t);
      return;
    case ZonalKind::dinv_green: {
      out[0] = dinv_green_eval(t);
      if (kmax == 0) return;
      const double s = single_layer_eval(t);
      const double w = 2.0 + 4.0 * s;
      out[1] = (0.5 - s - 1.0 / w) / two_pi;
      if (kmax == 1) return;
      const double s1 = single_layer_deriv(1, t);
      out[2] = s1 * (-1.0 + 4.0 / (w * w)) / two_pi;
      if (kmax == 2) return;
      const double s2 = single_layer_deriv(2, t);
      out[3] = (s2 * (-1.0 + 4.0 / (w * w)) - 32.0 * s1 * s1 / (w * w * w)) / two_pi;
      return;
    }
  }
}

}  // namespace detail

using ZonalKernelKind = detail::ZonalKind;

// ---------------------------------------------------------------------------
// Regularization: inside the polar cap 1 - t < rho (strict) the kernel is
// replaced by its Taylor polynomial of degree taylor_order about t = 1 - rho,
// which makes the piecewise function C^{taylor_order} across the breakpoint.
// ---------------------------------------------------------------------------

struct RegularizationConfig {
  double rho = 0.25;
  int taylor_order = 2;

  void validate() const {
    if (!(rho > 0.0 && rho <= 2.0))
      throw precondition_error("RegularizationConfig: rho must lie in (0, 2]");
    if (taylor_order < 1 || taylor_order > 3)
      throw precondition_error("RegularizationConfig: taylor_order must be 1..3");
  }

  // Dyadic scale j gives rho = 2^-j exactly.
  static RegularizationConfig at_scale(int j, int taylor_order) {
    if (j < 0) throw precondition_error("RegularizationConfig: scale must be >= 0");
    RegularizationConfig cfg{std::ldexp(1.0, -j), taylor_order};
    cfg.validate();
    return cfg;
  }
};

// One-dimensional kernel profile with first and second derivatives; either the
// bare analytic kernel or its cap-regularized piecewise version.
class ZonalProfile {
 public:
  explicit ZonalProfile(ZonalKernelKind kind) : kind_(kind) {}

  ZonalProfile(ZonalKernelKind kind, RegularizationConfig cfg) : kind_(kind), cfg_(cfg) {
    cfg.validate();
    rho_ = cfg.rho;
    t0_ = 1.0 - cfg.rho;
    order_ = cfg.taylor_order;
    std::array<double, 4> d{};
    detail::zonal_derivs(kind_, t0_, order_, d);
    static constexpr double fact[4] = {1.0, 1.0, 2.0, 6.0};
    for (int p = 0; p <= order_; ++p) c_[p] = d[p] / fact[p];
  }

  ZonalKernelKind kind() const { return kind_; }
  bool regularized() const { return cfg_.has_value(); }
  const RegularizationConfig& config() const {
    if (!cfg_) throw precondition_error("ZonalProfile: profile is not regularized");
    return *cfg_;
  }
  // Breakpoint t = 1 - rho between the analytic and polynomial branches.
  double breakpoint() const {
    require_regularized();
    return t0_;
  }

  double value(double t) const {
    t = checked(t);
    if (1.0 - t < rho_) return cap_value(t);
    return analytic_value(t);
  }
  double deriv1(double t) const {
    t = checked(t);
    if (1.0 - t < rho_) return cap_deriv1(t);
    return analytic_deriv1(t);
  }
  double deriv2(double t) const {
    t = checked(t);
    if (1.0 - t < rho_) return cap_deriv2(t);
    return analytic_deriv2(t);
  }

  // Branch evaluators, exposed so smoothness across the breakpoint can be
  // checked as genuine one-sided limits.
  double analytic_value(double t) const {
    std::array<double, 4> d{};
    detail::zonal_derivs(kind_, t, 0, d);
    return d[0];
  }
  double analytic_deriv1(double t) const {
    std::array<double, 4> d{};
    detail::zonal_derivs(kind_, t, 1, d);
    return d[1];
  }
  double analytic_deriv2(double t) const {
    std::array<double, 4> d{};
    detail::zonal_derivs(kind_, t, 2, d);
    return d[2];
  }
  double cap_value(double t) const {
    require_regularized();
    const double dt = t - t0_;
    double v = c_[order_];
    for (int p = order_ - 1; p >= 0; --p) v = v * dt + c_[p];
    return v;
  }
  double cap_deriv1(double t) const {
    require_regularized();
    const double dt = t - t0_;
    double v = order_ * c_[order_];
    for (int p = order_ - 1; p >= 1; --p) v = v * dt + p * c_[p];
    return v;
  }
  double cap_deriv2(double t) const {
    require_regularized();
    if (order_ < 2) return 0.0;
    const double dt = t - t0_;
    return order_ == 2 ? 2.0 * c_[2] : 6.0 * c_[3] * dt + 2.0 * c_[2];
  }

 private:
  static double checked(double t) {
    if (t > 1.0) {
      if (t > 1.0 + 1e-12) throw precondition_error("ZonalProfile: t outside [-1, 1]");
      return 1.0;
    }
    if (t < -1.0) {
      if (t < -1.0 - 1e-12) throw precondition_error("ZonalProfile: t outside [-1, 1]");
      return -1.0;
    }
    return t;
  }
  void require_regularized() const {
    if (!cfg_) throw precondition_error("ZonalProfile: no cap branch on unregularized profile");
  }

  ZonalKernelKind kind_;
  std::optional<RegularizationConfig> cfg_;
  double rho_ = -1.0;  // sentinel: cap branch never taken when unregularized
  double t0_ = 2.0;
  int order_ = 0;
  std::array<double, 4> c_{};
};

inline ZonalProfile green_reg_profile(RegularizationConfig cfg) {
  return ZonalProfile(ZonalKernelKind::green, cfg);
}
inline ZonalProfile single_layer_reg_profile(RegularizationConfig cfg) {
  return ZonalProfile(ZonalKernelKind::single_layer, cfg);
}
inline ZonalProfile dinv_green_reg_profile(RegularizationConfig cfg) {
  return ZonalProfile(ZonalKernelKind::dinv_green, cfg);
}

// ---------------------------------------------------------------------------
// Tangential vector kernels derived from the regularized single layer kernel.
// Their common scalar factor is the derivative of the smoothed dinv_green
// profile expressed through S: c(t) = (1/2 pi)(1/2 - S - 1/(2+4S)).
// ---------------------------------------------------------------------------

enum class SVectorKind { grad, curl };

inline Vec3 s_vector_eval(SVectorKind which, RegularizationConfig cfg, const UnitVector& xi,
                          const UnitVector& eta) {
  cfg.validate();
  const ZonalProfile s = single_layer_reg_profile(cfg);
  const double t = dot(xi.vec(), eta.vec());
  const double sv = s.value(t);
  const double c = (0.5 - sv - 1.0 / (2.0 + 4.0 * sv)) / two_pi;
  if (which == SVectorKind::grad) return c * (eta.vec() - t * xi.vec());
  return c * cross(xi.vec(), eta.vec());
}

// ---------------------------------------------------------------------------
// Zonal differentiation rules: all first/second tangential derivatives of
// (xi, eta) -> F(xi . eta) in closed form.  Rows of the tensors carry the
// xi-derivative index, columns the eta side.
// ---------------------------------------------------------------------------

struct ZonalSurfaceOps {
  Vec3 grad_xi{};
  Vec3 curl_xi{};
  double lap_xi = 0.0;
  Mat3 grad_grad{};  // surface-gradient in xi (x) surface-gradient in eta
  Mat3 curl_curl{};  // surface-curl in xi (x) surface-curl in eta
};

// Accepts any profile with value/deriv1/deriv2 so test profiles (constants,
// polynomials, transcendental functions) can exercise the same rules.
template <class Profile>
ZonalSurfaceOps zonal_surface_ops(const Profile& profile, const UnitVector& xi,
                                  const UnitVector& eta) {
  const double t = dot(xi.vec(), eta.vec());
  const double f1 = profile.deriv1(t);
  const double f2 = profile.deriv2(t);
  const Vec3 d = eta.vec() - t * xi.vec();  // tangent at xi toward eta
  const Vec3 e = xi.vec() - t * eta.vec();  // tangent at eta toward xi
  const Vec3 x = cross(xi.vec(), eta.vec());

  ZonalSurfaceOps out;
  out.grad_xi = f1 * d;
  out.curl_xi = f1 * x;
  out.lap_xi = (1.0 - t * t) * f2 - 2.0 * t * f1;
  out.grad_grad =
      f2 * outer(d, e) + f1 * (Mat3::identity() - outer(xi.vec(), xi.vec()) - outer(d, eta.vec()));
  out.curl_curl = f2 * outer(x, -x) + f1 * (t * Mat3::identity() - outer(eta.vec(), xi.vec()));
  return out;
}

// ---------------------------------------------------------------------------
// The three tensor separation kernels at dyadic scales, and their wavelet
// differences.  internal picks up fields of sources below the sphere,
// external fields of sources above it, toroidal the tangential curl family.
// ---------------------------------------------------------------------------

enum class SourcePart { internal, external, toroidal };

inline const char* to_string(SourcePart p) {
  switch (p) {
    case SourcePart::internal: return "internal";
    case SourcePart::external: return "external";
    default: return "toroidal";
  }
}

enum class KernelForm { scaling, wavelet };

struct TensorKernelId {
  SourcePart part = SourcePart::internal;
  KernelForm form = KernelForm::scaling;
  int scale = 2;

  void validate() const {
    if (scale < 0) throw precondition_error("TensorKernelId: scale must be >= 0");
  }
};

// Taylor orders of the two regularized profiles entering the tensor kernels.
// Defaults give the smoothness each assembled term actually needs (second
// derivatives of the potential profile, first of the distance profile).
struct KernelOrders {
  int green = 2;
  int single_layer = 1;

  void validate() const {
    if (green < 1 || green > 3 || single_layer < 1 || single_layer > 3)
      throw precondition_error("KernelOrders: orders must be 1..3");
  }
};

struct VecTriple {
  Vec3 internal{}, external{}, toroidal{};
};

struct MatTriple {
  Mat3 internal{}, external{}, toroidal{};
};

// Evaluates all three scaling kernels at one scale in a single pass; the
// profile pair is shared, so batch evaluation costs barely more than one
// branch.  Immutable after construction and safe for concurrent use.
class ScalingKernelSet {
 public:
  ScalingKernelSet(int scale, KernelOrders orders)
      : green_(green_reg_profile(RegularizationConfig::at_scale(scale, orders.green))),
        single_(single_layer_reg_profile(RegularizationConfig::at_scale(scale, orders.single_layer))),
        rho_(std::ldexp(1.0, -scale)),
        scale_(scale) {
    orders.validate();
  }

  int scale() const { return scale_; }
  double rho() const { return rho_; }

  // Kernel-times-vector for all three branches: returns {Phi^i(xi,eta) wb}.
  VecTriple apply(const Vec3& xi, const Vec3& eta, double t, const Vec3& wb) const {
    double g1, g2, s, s1, lap;
    common(t, g1, g2, s, s1, lap);
    const double c = (0.5 - s - 1.0 / (2.0 + 4.0 * s)) / two_pi;
    const double w = 2.0 + 4.0 * s;
    const double cp = s1 * (-1.0 + 4.0 / (w * w)) / two_pi;

    const Vec3 d = eta - t * xi;
    const double xw = dot(xi, wb);
    const double ew = dot(eta, wb);
    const double ewb = xw - t * ew;  // (xi - t eta) . wb
    const double k4 = 1.0 / four_pi;

    const double a1 = 0.5 * lap + s / (8.0 * pi);
    const double a2 = 0.5 * lap - s / (8.0 * pi);
    const double q1 = 0.25 * c - 0.5 * g1;
    const double q2 = -0.25 * c - 0.5 * g1;
    const double r1 = 0.25 * cp - 0.5 * g2;
    const double r2 = -0.25 * cp - 0.5 * g2;

    VecTriple out;
    out.internal = (a1 * ew - k4 * s1 * ewb - q1 * xw) * xi + q1 * wb +
                   (-q1 * ew + r1 * ewb - k4 * s1 * ew) * d;
    out.external = (a2 * ew + k4 * s1 * ewb - q2 * xw) * xi + q2 * wb +
                   (-q2 * ew + r2 * ewb + k4 * s1 * ew) * d;
    const Vec3 x = cross(xi, eta);
    out.toroidal = g2 * dot(x, wb) * x + g1 * (xw * eta - t * wb);
    return out;
  }

  // Full tensors for all three branches.  Deliberately not inlined: both
  // scaling evaluations of a wavelet difference must run the identical
  // machine code so that the difference vanishes exactly outside the cap.
  [[gnu::noinline]] MatTriple eval(const Vec3& xi, const Vec3& eta) const {
    const double t = dot(xi, eta);
    double g1, g2, s, s1, lap;
    common(t, g1, g2, s, s1, lap);
    const double c = (0.5 - s - 1.0 / (2.0 + 4.0 * s)) / two_pi;
    const double w = 2.0 + 4.0 * s;
    const double cp = s1 * (-1.0 + 4.0 / (w * w)) / two_pi;

    const Vec3 d = eta - t * xi;
    const Vec3 e = xi - t * eta;
    const Vec3 x = cross(xi, eta);
    const double k4 = 1.0 / four_pi;
    const Mat3 tang = Mat3::identity() - outer(xi, xi);

    const double a1 = 0.5 * lap + s / (8.0 * pi);
    const double a2 = 0.5 * lap - s / (8.0 * pi);
    const double q1 = 0.25 * c - 0.5 * g1;
    const double q2 = -0.25 * c - 0.5 * g1;
    const double r1 = 0.25 * cp - 0.5 * g2;
    const double r2 = -0.25 * cp - 0.5 * g2;

    MatTriple out;
    out.internal = a1 * outer(xi, eta) - (k4 * s1) * outer(xi, e) +
                   q1 * (tang - outer(d, eta)) + r1 * outer(d, e) - (k4 * s1) * outer(d, eta);
    out.external = a2 * outer(xi, eta) + (k4 * s1) * outer(xi, e) +
                   q2 * (tang - outer(d, eta)) + r2 * outer(d, e) + (k4 * s1) * outer(d, eta);
    out.toroidal = g2 * outer(x, x) + g1 * (outer(eta, xi) - t * Mat3::identity());
    return out;
  }

 private:
  void common(double t, double& g1, double& g2, double& s, double& s1, double& lap) const {
    g1 = green_.deriv1(t);
    g2 = green_.deriv2(t);
    s = single_.value(t);
    s1 = single_.deriv1(t);
    // Outside the cap the zonal surface Laplacian of the potential profile is
    // the exact constant -1/(4 pi); inside it follows the polynomial branch.
    lap = (1.0 - t < rho_) ? (1.0 - t * t) * g2 - 2.0 * t * g1 : -1.0 / four_pi;
  }

  ZonalProfile green_, single_;
  double rho_;
  int scale_;
};

// Difference of two consecutive scaling sets.  The difference kernel vanishes
// identically outside the cap 1 - t < 2^-scale, which apply() exploits by
// contributing nothing there; eval() assembles both tensors and subtracts so
// the cancellation can be observed bit-for-bit.
class WaveletKernelSet {
 public:
  WaveletKernelSet(int scale, KernelOrders orders)
      : coarse_(scale, orders), fine_(scale + 1, orders) {}

  int scale() const { return coarse_.scale(); }
  double cap_height() const { return coarse_.rho(); }
  bool in_support(double t) const { return 1.0 - t < coarse_.rho(); }

  VecTriple apply(const Vec3& xi, const Vec3& eta, double t, const Vec3& wb) const {
    if (!in_support(t)) return {};
    const VecTriple f = fine_.apply(xi, eta, t, wb);
    const VecTriple c = coarse_.apply(xi, eta, t, wb);
    return {f.internal - c.internal, f.external - c.external, f.toroidal - c.toroidal};
  }

  MatTriple eval(const Vec3& xi, const Vec3& eta) const {
    const MatTriple f = fine_.eval(xi, eta);
    const MatTriple c = coarse_.eval(xi, eta);
    return {f.internal - c.internal, f.external - c.external, f.toroidal - c.toroidal};
  }

 private:
  ScalingKernelSet coarse_, fine_;
};

inline Mat3 pick(const MatTriple& m, SourcePart p) {
  switch (p) {
    case SourcePart::internal: return m.internal;
    case SourcePart::external: return m.external;
    default: return m.toroidal;
  }
}

inline Vec3 pick(const VecTriple& v, SourcePart p) {
  switch (p) {
    case SourcePart::internal: return v.internal;
    case SourcePart::external: return v.external;
    default: return v.toroidal;
  }
}

// Single-kernel tensor evaluation (the batch classes above are preferable in
// convolution loops).
inline Mat3 phi_eval(TensorKernelId id, KernelOrders orders, const UnitVector& xi,
                     const UnitVector& eta) {
  id.validate();
  orders.validate();
  if (id.form == KernelForm::scaling)
    return pick(ScalingKernelSet(id.scale, orders).eval(xi.vec(), eta.vec()), id.part);
  return pick(WaveletKernelSet(id.scale, orders).eval(xi.vec(), eta.vec()), id.part);
}

}  // namespace sphsep
