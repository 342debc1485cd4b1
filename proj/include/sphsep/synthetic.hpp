#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "sphsep/harmonics.hpp"
#include "sphsep/multiscale.hpp"
#include "sphsep/quadrature.hpp"

namespace sphsep {

// One basis term of a synthetic field: amplitude times the orthonormal tilde
// harmonic of the given component/degree/order.
struct SyntheticTerm {
  int component = 1;  // 1 internal, 2 external, 3 toroidal
  int n = 1;
  int k = 1;
  double amplitude = 1.0;
};

struct SyntheticSpec {
  std::vector<SyntheticTerm> terms;
  double radius = 1.0;

  void validate() const {
    if (!(radius > 0.0)) throw precondition_error("SyntheticSpec: radius must be positive");
    for (const SyntheticTerm& t : terms) {
      if (t.component < 1 || t.component > 3)
        throw precondition_error("SyntheticSpec: component must be 1, 2, or 3");
      HarmonicIndex{t.n, t.k}.validate();
      if (!std::isfinite(t.amplitude))
        throw precondition_error("SyntheticSpec: amplitude must be finite");
      // inadmissible degree/component pairs throw here
      normalization_constant({VshBasis::tilde, t.component}, t.n);
    }
  }

  static SourcePart part_of(int component) {
    switch (component) {
      case 1: return SourcePart::internal;
      case 2: return SourcePart::external;
      default: return SourcePart::toroidal;
    }
  }
};

inline Vec3 synthetic_eval(const SyntheticSpec& spec, const UnitVector& xi) {
  Vec3 acc{};
  for (const SyntheticTerm& t : spec.terms)
    acc += t.amplitude * vsh_eval({VshBasis::tilde, t.component}, {t.n, t.k}, xi);
  return acc;
}

// Sampled synthetic field with its exact per-part ground truth.
struct SyntheticField {
  SyntheticSpec spec;
  VectorField total;
  PartFields truth;
};

inline SyntheticField make_field(const SyntheticSpec& spec, GridPtr grid) {
  spec.validate();
  if (!grid) throw precondition_error("make_field: null grid");

  SyntheticField out;
  out.spec = spec;
  out.total = VectorField::zeros(grid);
  out.truth = PartFields(grid);
  detail::parallel_for(grid->size(), [&](std::size_t p) {
    const UnitVector xi = UnitVector::assume_unit(grid->node(p));
    Vec3 parts[3] = {};
    for (const SyntheticTerm& t : spec.terms)
      parts[t.component - 1] +=
          t.amplitude * vsh_eval({VshBasis::tilde, t.component}, {t.n, t.k}, xi);
    out.truth.internal.values[p] = parts[0];
    out.truth.external.values[p] = parts[1];
    out.truth.toroidal.values[p] = parts[2];
    out.total.values[p] = parts[0] + parts[1] + parts[2];
  });
  return out;
}

// Dense coefficient table over the tilde basis: component i in 1..3, degree
// n <= lmax, order label k in 1..2n+1 stored at flat index n^2 + k - 1.
struct SpectralCoefficients {
  int lmax = 0;
  std::array<std::vector<double>, 3> c;

  static std::size_t flat(int n, int k) { return static_cast<std::size_t>(n) * n + k - 1; }

  double coeff(int component, int n, int k) const {
    if (component < 1 || component > 3 || n < 0 || n > lmax || k < 1 || k > 2 * n + 1)
      throw precondition_error("SpectralCoefficients: index out of range");
    return c[component - 1][flat(n, k)];
  }

  double sum_of_squares() const {
    double acc = 0.0;
    for (const auto& v : c)
      for (double x : v) acc += x * x;
    return acc;
  }
};

// Brute-force projection of a sampled field onto the orthonormal tilde basis.
// Trustworthy when the field is band-limited well inside the grid's exactness
// range, hence the declared-degree precondition.
inline SpectralCoefficients spectral_oracle(const VectorField& f, int lmax) {
  if (!f.grid) throw precondition_error("spectral_oracle: field has no grid");
  if (lmax < 0) throw precondition_error("spectral_oracle: lmax must be >= 0");
  if (f.grid->declared_degree() < 2 * lmax)
    throw precondition_error("spectral_oracle: grid exact to degree " +
                             std::to_string(f.grid->declared_degree()) +
                             ", need at least " + std::to_string(2 * lmax));

  const EquiangularGrid& g = *f.grid;
  SpectralCoefficients out;
  out.lmax = lmax;
  const std::size_t per = static_cast<std::size_t>(lmax + 1) * (lmax + 1);
  for (auto& v : out.c) v.assign(per, 0.0);

  // flat list of admissible (component, n, k) jobs, parallelized
  struct Job { int component, n, k; };
  std::vector<Job> jobs;
  for (int component = 1; component <= 3; ++component)
    for (int n = (component == 1 ? 0 : 1); n <= lmax; ++n)
      for (int k = 1; k <= 2 * n + 1; ++k) jobs.push_back({component, n, k});

  detail::parallel_for(jobs.size(), [&](std::size_t ji) {
    const Job job = jobs[ji];
    const VshKind kind{VshBasis::tilde, job.component};
    const HarmonicIndex idx{job.n, job.k};
    double acc = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q)
      acc += g.node_weight(q) *
             dot(f.values[q], vsh_eval(kind, idx, UnitVector::assume_unit(g.node(q))));
    out.c[job.component - 1][SpectralCoefficients::flat(job.n, job.k)] = acc;
  });
  return out;
}

// Reconstructs one part (or, with all three, the whole field) from oracle
// coefficients on the given grid.
inline VectorField reconstruct_part(const SpectralCoefficients& coeffs, SourcePart part,
                                    GridPtr grid) {
  if (!grid) throw precondition_error("reconstruct_part: null grid");
  const int component = part == SourcePart::internal ? 1 : (part == SourcePart::external ? 2 : 3);
  VectorField out = VectorField::zeros(grid);
  detail::parallel_for(grid->size(), [&](std::size_t p) {
    const UnitVector xi = UnitVector::assume_unit(grid->node(p));
    Vec3 acc{};
    for (int n = (component == 1 ? 0 : 1); n <= coeffs.lmax; ++n)
      for (int k = 1; k <= 2 * n + 1; ++k) {
        const double c = coeffs.c[component - 1][SpectralCoefficients::flat(n, k)];
        if (c != 0.0) acc += c * vsh_eval({VshBasis::tilde, component}, {n, k}, xi);
      }
    out.values[p] = acc;
  });
  return out;
}

}  // namespace sphsep
