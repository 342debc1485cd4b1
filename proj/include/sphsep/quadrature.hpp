#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "sphsep/legendre.hpp"
#include "sphsep/linalg.hpp"

namespace sphsep {

// Equiangular product grid with half-step colatitude offset (poles excluded):
//   theta_j = (j + 1/2) pi / n_lat,  j = 0..n_lat-1   (rings, north to south)
//   phi_i   = 2 pi i / n_lon,        i = 0..n_lon-1
// Ring weights are chosen so that zonal polynomials integrate exactly through
// degree n_lat - 1; combined with the uniform longitude rule the grid
// integrates spherical polynomials exactly through the declared degree.
class EquiangularGrid {
 public:
  EquiangularGrid(int n_lat, int n_lon, double radius);

  int n_lat() const { return n_lat_; }
  int n_lon() const { return n_lon_; }
  double radius() const { return radius_; }
  int declared_degree() const { return std::min(n_lat_, n_lon_) - 1; }
  std::size_t size() const { return static_cast<std::size_t>(n_lat_) * n_lon_; }

  double colatitude(int ring) const { return colat_[ring]; }
  double longitude(int col) const { return lon_[col]; }
  // Quadrature weight shared by every node of a ring (ring rule x 2pi/n_lon).
  double ring_weight(int ring) const { return ring_weight_[ring]; }

  std::size_t node_index(int ring, int col) const {
    return static_cast<std::size_t>(ring) * n_lon_ + col;
  }
  const Vec3& node(std::size_t idx) const { return nodes_[idx]; }
  const Vec3& node(int ring, int col) const { return nodes_[node_index(ring, col)]; }
  const std::vector<Vec3>& nodes() const { return nodes_; }

  double node_weight(std::size_t idx) const { return ring_weight_[idx / n_lon_]; }

  bool same_layout(const EquiangularGrid& o) const {
    return n_lat_ == o.n_lat_ && n_lon_ == o.n_lon_ && radius_ == o.radius_;
  }

 private:
  int n_lat_, n_lon_;
  double radius_;
  std::vector<double> colat_, lon_, ring_weight_;
  std::vector<Vec3> nodes_;
};

inline EquiangularGrid::EquiangularGrid(int n_lat, int n_lon, double radius)
    : n_lat_(n_lat), n_lon_(n_lon), radius_(radius) {
  if (n_lat < 2 || n_lon < 4)
    throw precondition_error("EquiangularGrid: need at least 2 rings and 4 columns");
  if (!(radius > 0.0)) throw precondition_error("EquiangularGrid: radius must be positive");

  colat_.resize(n_lat);
  lon_.resize(n_lon);
  for (int j = 0; j < n_lat; ++j) colat_[j] = (j + 0.5) * pi / n_lat;
  for (int i = 0; i < n_lon; ++i) lon_[i] = two_pi * i / n_lon;

  // Solve sum_j v_j P_l(t_j) = 2 delta_{l0}, l = 0..n_lat-1 for the ring rule.
  // The t_j are Chebyshev-type nodes, so the Vandermonde-in-P system is well
  // conditioned and the resulting weights come out positive.
  const std::size_t n = static_cast<std::size_t>(n_lat);
  std::vector<double> a(n * n), rhs(n, 0.0), pcol(n);
  for (std::size_t j = 0; j < n; ++j) {
    legendre_sequence(n_lat - 1, std::cos(colat_[j]), pcol);
    for (std::size_t l = 0; l < n; ++l) a[l * n + j] = pcol[l];
  }
  rhs[0] = 2.0;
  const std::vector<double> v = solve_dense(std::move(a), std::move(rhs));

  ring_weight_.resize(n_lat);
  for (int j = 0; j < n_lat; ++j) ring_weight_[j] = v[j] * two_pi / n_lon;

  nodes_.resize(size());
  for (int j = 0; j < n_lat; ++j) {
    const double st = std::sin(colat_[j]), ct = std::cos(colat_[j]);
    for (int i = 0; i < n_lon; ++i)
      nodes_[node_index(j, i)] = Vec3{st * std::cos(lon_[i]), st * std::sin(lon_[i]), ct};
  }
}

using GridPtr = std::shared_ptr<const EquiangularGrid>;

inline GridPtr make_grid(int n_lat, int n_lon, double radius = 1.0) {
  return std::make_shared<const EquiangularGrid>(n_lat, n_lon, radius);
}

namespace detail {
inline void check_field_sizes(const GridPtr& grid, std::size_t n_values) {
  if (!grid) throw precondition_error("field: null grid");
  if (n_values != grid->size())
    throw precondition_error("field: value count " + std::to_string(n_values) +
                             " does not match grid size " + std::to_string(grid->size()));
}
}  // namespace detail

// Scalar samples on a shared grid, row-major with latitude as the outer index.
struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    detail::check_field_sizes(grid, values.size());
  }
  static ScalarField zeros(GridPtr g) {
    ScalarField f;
    f.values.assign(g->size(), 0.0);
    f.grid = std::move(g);
    return f;
  }
};

// Vector samples on a shared grid (components in the ambient frame).
struct VectorField {
  GridPtr grid;
  std::vector<Vec3> values;

  VectorField() = default;
  VectorField(GridPtr g, std::vector<Vec3> v) : grid(std::move(g)), values(std::move(v)) {
    detail::check_field_sizes(grid, values.size());
  }
  static VectorField zeros(GridPtr g) {
    VectorField f;
    f.values.assign(g->size(), Vec3{});
    f.grid = std::move(g);
    return f;
  }
};

inline double integrate(const ScalarField& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.grid->node_weight(i) * f.values[i];
  return acc;
}

template <class Fn>
double integrate(const EquiangularGrid& grid, Fn&& fn) {
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    acc += grid.node_weight(i) * fn(UnitVector::assume_unit(grid.node(i)));
  return acc;
}

inline double dot(const ScalarField& a, const ScalarField& b) {
  if (!a.grid->same_layout(*b.grid)) throw precondition_error("dot: grids differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    acc += a.grid->node_weight(i) * a.values[i] * b.values[i];
  return acc;
}

inline double sup_norm(const VectorField& f) {
  double r = 0.0;
  for (const Vec3& v : f.values) r = std::max(r, norm(v));
  return r;
}

inline double sup_distance(const VectorField& a, const VectorField& b) {
  if (a.values.size() != b.values.size()) throw precondition_error("sup_distance: size mismatch");
  double r = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) r = std::max(r, norm(a.values[i] - b.values[i]));
  return r;
}

}  // namespace sphsep
