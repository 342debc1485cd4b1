#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "sphsep/convolve.hpp"
#include "sphsep/kernels.hpp"
#include "sphsep/quadrature.hpp"

namespace sphsep {

// Radial / curl-free tangential / divergence-free tangential potentials of a
// sampled vector field, computed with the regularized potential profile.
struct HelmholtzScalars {
  ScalarField f1, f2, f3;
};

inline HelmholtzScalars helmholtz_scalars(const VectorField& f, RegularizationConfig cfg) {
  cfg.validate();
  if (!f.grid) throw precondition_error("helmholtz_scalars: field has no grid");
  const EquiangularGrid& g = *f.grid;
  const ZonalProfile green = green_reg_profile(cfg);

  HelmholtzScalars out{ScalarField::zeros(f.grid), ScalarField::zeros(f.grid),
                       ScalarField::zeros(f.grid)};
  detail::parallel_for(g.size(), [&](std::size_t p) {
    const Vec3 xi = g.node(p);
    out.f1.values[p] = dot(xi, f.values[p]);
    double acc2 = 0.0, acc3 = 0.0;
    detail::for_each_node(g, [&](std::size_t q, const Vec3& eta, double w) {
      const double t = dot(xi, eta);
      const double g1 = green.deriv1(t);
      const Vec3& fq = f.values[q];
      // surface gradient of the profile in eta is g1 (xi - t eta),
      // its surface curl is g1 (eta ^ xi)
      acc2 -= w * g1 * (dot(xi, fq) - t * dot(eta, fq));
      acc3 -= w * g1 * dot(cross(eta, xi), fq);
    });
    out.f2.values[p] = acc2;
    out.f3.values[p] = acc3;
  });
  return out;
}

// The three separated fields (or their per-scale contributions).
struct PartFields {
  VectorField internal, external, toroidal;

  PartFields() = default;
  explicit PartFields(GridPtr grid)
      : internal(VectorField::zeros(grid)),
        external(VectorField::zeros(grid)),
        toroidal(VectorField::zeros(std::move(grid))) {}

  const VectorField& of(SourcePart p) const {
    switch (p) {
      case SourcePart::internal: return internal;
      case SourcePart::external: return external;
      default: return toroidal;
    }
  }

  void add(const PartFields& o) {
    for (std::size_t i = 0; i < internal.values.size(); ++i) {
      internal.values[i] += o.internal.values[i];
      external.values[i] += o.external.values[i];
      toroidal.values[i] += o.toroidal.values[i];
    }
  }
};

struct MultiscaleOptions {
  KernelOrders orders{};
  // Minimum grid nodes acceptable inside the kernel cap; below this the grid
  // cannot resolve the requested scale.
  int min_cap_nodes = 9;
  // Radial-mean gate, relative: |mean| <= tol * 4 pi * sup|b|.
  double radial_mean_tol = 1e-6;
  bool truncate_wavelets = true;
};

namespace detail {

// Fewest grid nodes lying inside a cap of height cap_height centred at a grid
// node; by longitude symmetry only one node per ring needs checking.
inline int min_cap_node_count(const EquiangularGrid& g, double cap_height) {
  int best = static_cast<int>(g.size());
  for (int j = 0; j < g.n_lat(); ++j) {
    const Vec3 xi = g.node(j, 0);
    int count = 0;
    for_each_cap_node(g, xi, cap_height, [&](std::size_t, const Vec3& eta, double) {
      if (1.0 - dot(xi, eta) < cap_height) ++count;
    });
    best = std::min(best, count);
  }
  return best;
}

inline void check_resolution(const EquiangularGrid& g, int scale, int min_cap_nodes) {
  if (scale < 1) return;  // cap height >= 1: always resolved on valid grids
  const double cap = std::ldexp(1.0, -(scale - 1));
  const int have = min_cap_node_count(g, cap);
  if (have < min_cap_nodes) {
    std::ostringstream msg;
    msg << "grid " << g.n_lat() << "x" << g.n_lon() << " under-resolves scale " << scale
        << ": worst cap (height 2^-" << (scale - 1) << ") contains " << have
        << " nodes, need at least " << min_cap_nodes;
    throw under_resolution_error(msg.str());
  }
}

// All three branches of the scale-J trend transform in one pass.
inline PartFields scaling_apply_all(int scale, const VectorField& b, const KernelOrders& orders) {
  const EquiangularGrid& g = *b.grid;
  const ScalingKernelSet set(scale, orders);
  PartFields out(b.grid);
  parallel_for(g.size(), [&](std::size_t p) {
    const Vec3 xi = g.node(p);
    Vec3 a1{}, a2{}, a3{};
    for_each_node(g, [&](std::size_t q, const Vec3& eta, double w) {
      const double t = dot(xi, eta);
      const VecTriple r = set.apply(xi, eta, t, w * b.values[q]);
      a1 += r.internal;
      a2 += r.external;
      a3 += r.toroidal;
    });
    out.internal.values[p] = a1;
    out.external.values[p] = a2;
    out.toroidal.values[p] = a3;
  });
  return out;
}

// All three branches of the scale-J detail transform; with truncate the node
// walk is restricted to the support cap (exact, the kernel vanishes outside).
inline PartFields wavelet_apply_all(int scale, const VectorField& b, const KernelOrders& orders,
                                    bool truncate) {
  const EquiangularGrid& g = *b.grid;
  const WaveletKernelSet set(scale, orders);
  PartFields out(b.grid);
  parallel_for(g.size(), [&](std::size_t p) {
    const Vec3 xi = g.node(p);
    Vec3 a1{}, a2{}, a3{};
    auto body = [&](std::size_t q, const Vec3& eta, double w) {
      const double t = dot(xi, eta);
      if (!set.in_support(t)) return;
      const VecTriple r = set.apply(xi, eta, t, w * b.values[q]);
      a1 += r.internal;
      a2 += r.external;
      a3 += r.toroidal;
    };
    if (truncate)
      for_each_cap_node(g, xi, set.cap_height(), body);
    else
      for_each_node(g, body);
    out.internal.values[p] = a1;
    out.external.values[p] = a2;
    out.toroidal.values[p] = a3;
  });
  return out;
}

}  // namespace detail

// Trend transform: smoothed separation at scale J (global convolution).
inline VectorField scaling_transform(SourcePart part, int scale, const VectorField& b,
                                     const MultiscaleOptions& opts = {}) {
  if (scale < 0) throw precondition_error("scaling_transform: scale must be >= 0");
  if (!b.grid) throw precondition_error("scaling_transform: field has no grid");
  opts.orders.validate();
  detail::check_resolution(*b.grid, scale, opts.min_cap_nodes);
  return detail::scaling_apply_all(scale, b, opts.orders).of(part);
}

// Detail transform: difference between scales J+1 and J, locally supported.
inline VectorField wavelet_transform(SourcePart part, int scale, const VectorField& b,
                                     const MultiscaleOptions& opts = {}) {
  if (scale < 0) throw precondition_error("wavelet_transform: scale must be >= 0");
  if (!b.grid) throw precondition_error("wavelet_transform: field has no grid");
  opts.orders.validate();
  detail::check_resolution(*b.grid, scale + 1, opts.min_cap_nodes);
  return detail::wavelet_apply_all(scale, b, opts.orders, opts.truncate_wavelets).of(part);
}

struct SeparationResult {
  int j0 = 0, jmax = 0;
  KernelOrders orders{};
  PartFields parts;                  // separation at scale jmax
  PartFields trend;                  // scale-j0 trend
  std::map<int, PartFields> details; // scale j detail contributions, j0 <= j < jmax
  double radial_mean = 0.0;          // measured quadrature mean of the radial component
};

// Quadrature mean of the radial component; must vanish for separable fields.
inline double radial_mean(const VectorField& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < b.values.size(); ++i)
    acc += b.grid->node_weight(i) * dot(b.grid->node(i), b.values[i]);
  return acc;
}

// Full pyramid: trend at j0, then locally supported detail transforms up to
// jmax.  The returned parts satisfy parts = trend + sum of details exactly up
// to floating-point summation error.
inline SeparationResult separate(const VectorField& b, int j0, int jmax,
                                 const MultiscaleOptions& opts = {}) {
  if (!b.grid) throw precondition_error("separate: field has no grid");
  if (j0 < 0 || jmax < j0)
    throw precondition_error("separate: need 0 <= j0 <= jmax");
  opts.orders.validate();

  const double rm = radial_mean(b);
  const double gate = opts.radial_mean_tol * four_pi * sup_norm(b);
  if (std::abs(rm) > gate) {
    std::ostringstream msg;
    msg << "separate: radial component has nonzero quadrature mean " << rm
        << " (allowed " << gate << "); the field cannot come from the modelled sources";
    throw precondition_error(msg.str());
  }

  detail::check_resolution(*b.grid, jmax, opts.min_cap_nodes);

  SeparationResult res;
  res.j0 = j0;
  res.jmax = jmax;
  res.orders = opts.orders;
  res.radial_mean = rm;
  res.trend = detail::scaling_apply_all(j0, b, opts.orders);
  res.parts = res.trend;
  for (int j = j0; j < jmax; ++j) {
    PartFields det = detail::wavelet_apply_all(j, b, opts.orders, opts.truncate_wavelets);
    res.parts.add(det);
    res.details.emplace(j, std::move(det));
  }
  return res;
}

}  // namespace sphsep
