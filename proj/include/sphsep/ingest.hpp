#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sphsep/quadrature.hpp"

namespace sphsep {

// One scattered measurement: position in degrees (geographic-style colatitude
// and longitude) plus a 3-vector sample in the ambient frame.
struct ScatteredRecord {
  double colat_deg = 0.0;
  double lon_deg = 0.0;
  double radius_km = 1.0;
  Vec3 value{};
};

struct ScatteredDataset {
  std::vector<ScatteredRecord> records;

  void validate() const {
    if (records.empty()) throw precondition_error("ScatteredDataset: no records");
    for (const ScatteredRecord& r : records) {
      if (!(r.colat_deg >= 0.0 && r.colat_deg <= 180.0))
        throw precondition_error("ScatteredDataset: colatitude outside [0, 180] deg");
      if (!std::isfinite(r.lon_deg))
        throw precondition_error("ScatteredDataset: non-finite longitude");
      if (!(r.radius_km > 0.0)) throw precondition_error("ScatteredDataset: radius must be positive");
      if (!(std::isfinite(r.value.x) && std::isfinite(r.value.y) && std::isfinite(r.value.z)))
        throw precondition_error("ScatteredDataset: non-finite sample");
    }
  }
};

struct IngestConfig {
  double bin_deg = 2.5;     // diameter of the averaging cell around each node
  double huber_c = 1.345;   // clipping constant of the weight function
  int max_iterations = 50;
  double tolerance = 1e-8;  // relative change stopping rule
};

namespace detail {

inline double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + n / 2;
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Robust location estimate of a 1-D sample: iteratively reweighted mean with
// clipped weights w = min(1, c sigma / |residual|), scale sigma from the
// normalized median absolute deviation.  A zero MAD degenerates to averaging
// the samples that sit exactly at the median.
inline double huber_estimate(std::span<const double> samples, const IngestConfig& cfg = {}) {
  if (samples.empty()) throw precondition_error("huber_estimate: empty sample");
  if (samples.size() == 1) return samples[0];

  std::vector<double> work(samples.begin(), samples.end());
  const double med = detail::median_inplace(work);
  for (std::size_t i = 0; i < samples.size(); ++i) work[i] = std::abs(samples[i] - med);
  const double mad = detail::median_inplace(work);
  const double sigma = 1.4826 * mad;

  if (sigma == 0.0) {
    double acc = 0.0;
    std::size_t cnt = 0;
    for (double v : samples)
      if (v == med) {
        acc += v;
        ++cnt;
      }
    return cnt > 0 ? acc / cnt : med;
  }

  double mu = med;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    double wsum = 0.0, vsum = 0.0;
    for (double v : samples) {
      const double r = std::abs(v - mu);
      const double w = r == 0.0 ? 1.0 : std::min(1.0, cfg.huber_c * sigma / r);
      wsum += w;
      vsum += w * v;
    }
    const double next = vsum / wsum;
    const bool done = std::abs(next - mu) <= cfg.tolerance * std::max(1.0, std::abs(next));
    mu = next;
    if (done) break;
  }
  return mu;
}

struct IngestResult {
  VectorField field;
  std::vector<std::uint8_t> filled;  // 1 where the cell was empty and interpolated
  int n_empty = 0;
};

// Bins scattered records into node-centred cells of the given angular
// diameter and Huber-averages each cell per component.  Empty cells are
// filled by inverse-distance interpolation from the nearest occupied ring of
// lattice neighbours and flagged in the result.
inline IngestResult ingest(const ScatteredDataset& data, GridPtr grid,
                           const IngestConfig& cfg = {}) {
  data.validate();
  if (!grid) throw precondition_error("ingest: null grid");
  if (!(cfg.bin_deg > 0.0)) throw precondition_error("ingest: bin diameter must be positive");

  const EquiangularGrid& g = *grid;
  const double half = cfg.bin_deg / 2.0;

  // records sorted by colatitude for fast per-ring windowing
  std::vector<std::size_t> order(data.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.records[a].colat_deg < data.records[b].colat_deg;
  });
  std::vector<double> sorted_colat(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    sorted_colat[i] = data.records[order[i]].colat_deg;

  IngestResult out;
  out.field = VectorField::zeros(grid);
  out.filled.assign(g.size(), 0);

  std::vector<double> comp[3];
  for (int j = 0; j < g.n_lat(); ++j) {
    const double node_colat = g.colatitude(j) * 180.0 / pi;
    const auto lo = std::lower_bound(sorted_colat.begin(), sorted_colat.end(), node_colat - half);
    const auto hi = std::upper_bound(sorted_colat.begin(), sorted_colat.end(), node_colat + half);
    const std::size_t i_lo = lo - sorted_colat.begin();
    const std::size_t i_hi = hi - sorted_colat.begin();

    for (int i = 0; i < g.n_lon(); ++i) {
      const double node_lon = g.longitude(i) * 180.0 / pi;
      for (auto& v : comp) v.clear();
      for (std::size_t s = i_lo; s < i_hi; ++s) {
        const ScatteredRecord& r = data.records[order[s]];
        double dlon = std::fmod(std::abs(r.lon_deg - node_lon), 360.0);
        if (dlon > 180.0) dlon = 360.0 - dlon;
        if (dlon > half) continue;
        comp[0].push_back(r.value.x);
        comp[1].push_back(r.value.y);
        comp[2].push_back(r.value.z);
      }
      const std::size_t p = g.node_index(j, i);
      if (comp[0].empty()) {
        out.filled[p] = 1;
        ++out.n_empty;
      } else {
        out.field.values[p] = Vec3{huber_estimate(comp[0], cfg), huber_estimate(comp[1], cfg),
                                   huber_estimate(comp[2], cfg)};
      }
    }
  }

  if (out.n_empty == static_cast<int>(g.size()))
    throw precondition_error("ingest: every cell is empty for bin diameter " +
                             std::to_string(cfg.bin_deg) + " deg");

  if (out.n_empty > 0) {
    // Expand lattice rings around each empty node until occupied cells appear,
    // then average them with inverse-arc-distance weights.
    for (int j = 0; j < g.n_lat(); ++j)
      for (int i = 0; i < g.n_lon(); ++i) {
        const std::size_t p = g.node_index(j, i);
        if (!out.filled[p]) continue;
        const Vec3 xi = g.node(p);
        const int max_r = std::max(g.n_lat(), g.n_lon() / 2);
        Vec3 acc{};
        double wsum = 0.0;
        for (int radius = 1; radius <= max_r && wsum == 0.0; ++radius) {
          for (int dj = -radius; dj <= radius; ++dj) {
            const int jj = j + dj;
            if (jj < 0 || jj >= g.n_lat()) continue;
            for (int di = -radius; di <= radius; ++di) {
              if (std::max(std::abs(dj), std::abs(di)) != radius) continue;  // ring only
              const int ii = ((i + di) % g.n_lon() + g.n_lon()) % g.n_lon();
              const std::size_t q = g.node_index(jj, ii);
              if (out.filled[q]) continue;
              const double t = std::clamp(dot(xi, g.node(q)), -1.0, 1.0);
              const double w = 1.0 / std::max(std::acos(t), 1e-12);
              acc += w * out.field.values[q];
              wsum += w;
            }
          }
        }
        if (wsum > 0.0) out.field.values[p] = (1.0 / wsum) * acc;
      }
  }
  return out;
}

}  // namespace sphsep
