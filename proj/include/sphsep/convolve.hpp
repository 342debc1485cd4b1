#pragma once

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "sphsep/kernels.hpp"
#include "sphsep/quadrature.hpp"

namespace sphsep {

namespace detail {

// Runs fn(i) for i in [0, n), split into contiguous chunks across threads.
// Each index writes only its own outputs, so results are identical for any
// thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw < 2 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned th = 0; th < n_threads; ++th) {
    const std::size_t lo = n * th / n_threads;
    const std::size_t hi = n * (th + 1) / n_threads;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Visits every grid node in ascending index order: body(node_index, eta, w).
template <class Body>
void for_each_node(const EquiangularGrid& g, Body&& body) {
  std::size_t idx = 0;
  for (int j = 0; j < g.n_lat(); ++j) {
    const double w = g.ring_weight(j);
    for (int i = 0; i < g.n_lon(); ++i, ++idx) body(idx, g.node(idx), w);
  }
}

// Visits the nodes of the spherical cap 1 - xi.eta < cap_height around xi, in
// ascending node-index order, with a one-node safety margin on every window
// edge.  Nodes outside the exact cap may therefore be visited; callers must
// treat them as zero-contribution (which wavelet kernels guarantee).
template <class Body>
void for_each_cap_node(const EquiangularGrid& g, const Vec3& xi, double cap_height, Body&& body) {
  if (cap_height >= 2.0) {
    for_each_node(g, body);
    return;
  }
  const double c_alpha = 1.0 - cap_height;  // cosine of the cap opening angle
  const double alpha = std::acos(std::clamp(c_alpha, -1.0, 1.0));
  const double ct0 = std::clamp(xi.z, -1.0, 1.0);
  const double st0 = std::sqrt(std::max(0.0, 1.0 - ct0 * ct0));
  const double theta0 = std::acos(ct0);
  const double phi0 = std::atan2(xi.y, xi.x);

  const double ring_step = pi / g.n_lat();
  const int j_lo = std::max(0, static_cast<int>(std::floor((theta0 - alpha) / ring_step)) - 1);
  const int j_hi =
      std::min(g.n_lat() - 1, static_cast<int>(std::ceil((theta0 + alpha) / ring_step)) + 1);

  const double phi_step = two_pi / g.n_lon();
  const int n_lon = g.n_lon();

  for (int j = j_lo; j <= j_hi; ++j) {
    const double ctj = std::cos(g.colatitude(j));
    const double stj = std::sin(g.colatitude(j));
    const double w = g.ring_weight(j);

    // cos of the longitude half-window at this ring
    double half = pi;
    if (st0 * stj > 1e-300) {
      const double arg = (c_alpha - ct0 * ctj) / (st0 * stj);
      if (arg >= 1.0) {
        if (std::abs(g.colatitude(j) - theta0) > alpha) continue;  // ring misses the cap
        half = 0.0;
      } else if (arg > -1.0) {
        half = std::acos(arg);
      }
    } else if (std::abs(g.colatitude(j) - theta0) > alpha) {
      continue;  // polar target: ring entirely outside
    }

    int lo = static_cast<int>(std::floor((phi0 - half) / phi_step)) - 1;
    int hi = static_cast<int>(std::ceil((phi0 + half) / phi_step)) + 1;
    if (hi - lo + 1 >= n_lon) {
      const std::size_t base = g.node_index(j, 0);
      for (int i = 0; i < n_lon; ++i) body(base + i, g.node(base + i), w);
      continue;
    }
    int lo_m = ((lo % n_lon) + n_lon) % n_lon;
    int hi_m = ((hi % n_lon) + n_lon) % n_lon;
    const std::size_t base = g.node_index(j, 0);
    if (lo_m <= hi_m) {
      for (int i = lo_m; i <= hi_m; ++i) body(base + i, g.node(base + i), w);
    } else {  // window wraps: visit the two runs in ascending index order
      for (int i = 0; i <= hi_m; ++i) body(base + i, g.node(base + i), w);
      for (int i = lo_m; i < n_lon; ++i) body(base + i, g.node(base + i), w);
    }
  }
}

}  // namespace detail

// Evaluator bound to one tensor kernel id; knows whether its support is
// compact (wavelet) and hence whether truncated convolution is allowed.
class TensorKernelEvaluator {
 public:
  TensorKernelEvaluator(TensorKernelId id, KernelOrders orders = {})
      : id_(id), orders_(orders) {
    id.validate();
    orders.validate();
    if (id.form == KernelForm::wavelet) wavelet_.emplace(id.scale, orders);
    else scaling_.emplace(id.scale, orders);
  }

  const TensorKernelId& id() const { return id_; }
  bool compactly_supported() const { return wavelet_.has_value(); }
  double support_height() const {
    if (!wavelet_) throw precondition_error("support_height: scaling kernels have global support");
    return wavelet_->cap_height();
  }

  Mat3 operator()(const UnitVector& xi, const UnitVector& eta) const {
    return eval(xi.vec(), eta.vec());
  }
  Mat3 eval(const Vec3& xi, const Vec3& eta) const {
    return wavelet_ ? pick(wavelet_->eval(xi, eta), id_.part)
                    : pick(scaling_->eval(xi, eta), id_.part);
  }
  Vec3 apply(const Vec3& xi, const Vec3& eta, double t, const Vec3& wb) const {
    return wavelet_ ? pick(wavelet_->apply(xi, eta, t, wb), id_.part)
                    : pick(scaling_->apply(xi, eta, t, wb), id_.part);
  }

 private:
  TensorKernelId id_;
  KernelOrders orders_;
  std::optional<ScalingKernelSet> scaling_;
  std::optional<WaveletKernelSet> wavelet_;
};

// Quadrature convolution: out[p] = sum_q weight(q) K(target_p, eta_q) b(eta_q).
// With truncate_to_support the sum is restricted to the kernel's cap, which is
// exact because the kernel vanishes identically outside it.
inline std::vector<Vec3> convolve_tensor(const TensorKernelEvaluator& kernel,
                                         const VectorField& field,
                                         const std::vector<UnitVector>& targets,
                                         bool truncate_to_support = false) {
  if (!field.grid) throw precondition_error("convolve_tensor: field has no grid");
  if (truncate_to_support && !kernel.compactly_supported())
    throw precondition_error(
        "convolve_tensor: truncation requested but the kernel does not have compact support");

  const EquiangularGrid& g = *field.grid;
  std::vector<Vec3> out(targets.size());
  detail::parallel_for(targets.size(), [&](std::size_t p) {
    const Vec3 xi = targets[p].vec();
    Vec3 acc{};
    auto body = [&](std::size_t q, const Vec3& eta, double w) {
      const double t = dot(xi, eta);
      if (kernel.compactly_supported() && !(1.0 - t < kernel.support_height())) return;
      acc += kernel.apply(xi, eta, t, w * field.values[q]);
    };
    if (truncate_to_support)
      detail::for_each_cap_node(g, xi, kernel.support_height(), body);
    else
      detail::for_each_node(g, body);
    out[p] = acc;
  });
  return out;
}

// Convenience overload: targets default to the grid nodes themselves.
inline VectorField convolve_tensor(const TensorKernelEvaluator& kernel, const VectorField& field,
                                   bool truncate_to_support = false) {
  if (!field.grid) throw precondition_error("convolve_tensor: field has no grid");
  const EquiangularGrid& g = *field.grid;
  std::vector<UnitVector> targets;
  targets.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) targets.push_back(UnitVector::assume_unit(g.node(i)));
  return VectorField(field.grid, convolve_tensor(kernel, field, targets, truncate_to_support));
}

}  // namespace sphsep
