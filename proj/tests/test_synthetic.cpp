#include <catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "field_helpers.hpp"
#include "sphsep/synthetic.hpp"
#include "test_util.hpp"

using namespace sphsep;
using Catch::Approx;

TEST_CASE("Single-term field samples the basis exactly", "[synthetic]") {
  auto grid = make_grid(24, 24);
  const SyntheticSpec spec{{{2, 3, 2, 1.0}}, 1.0};
  const SyntheticField f = make_field(spec, grid);
  const VectorField direct = field_helpers::vsh_field(grid, {VshBasis::tilde, 2}, {3, 2});
  REQUIRE(sup_distance(f.total, direct) == 0.0);
  REQUIRE(sup_distance(f.truth.external, direct) == 0.0);
  REQUIRE(sup_norm(f.truth.internal) == 0.0);
  REQUIRE(sup_norm(f.truth.toroidal) == 0.0);

  // Pointwise evaluation agrees with the sampled field.
  for (std::size_t i = 0; i < grid->size(); i += 37) {
    const auto xi = UnitVector::assume_unit(grid->node(i));
    REQUIRE(norm(synthetic_eval(spec, xi) - f.total.values[i]) == 0.0);
  }
}

TEST_CASE("Generated fields have vanishing radial mean", "[synthetic]") {
  auto grid = make_grid(20, 20);
  const SyntheticSpec spec{{{1, 2, 1, 1.0}, {2, 3, 2, -0.7}, {3, 4, 3, 2.2}}, 1.0};
  const SyntheticField f = make_field(spec, grid);
  REQUIRE(std::abs(radial_mean(f.total)) < 1e-10);
  REQUIRE(std::abs(radial_mean(f.truth.internal)) < 1e-10);
  REQUIRE(std::abs(radial_mean(f.truth.external)) < 1e-10);
  REQUIRE(std::abs(radial_mean(f.truth.toroidal)) < 1e-14);
}

TEST_CASE("Toroidal terms are tangential", "[synthetic]") {
  auto grid = make_grid(12, 16);
  const SyntheticField f = make_field({{{3, 5, 4, 1.5}}, 1.0}, grid);
  for (std::size_t i = 0; i < grid->size(); ++i)
    REQUIRE(std::abs(dot(grid->node(i), f.total.values[i])) < 1e-12);
}

TEST_CASE("Oracle recovers the coefficients of a basis field", "[synthetic]") {
  auto grid = make_grid(16, 16);
  const SyntheticField f = make_field({{{2, 3, 2, 1.0}}, 1.0}, grid);
  const SpectralCoefficients coeffs = spectral_oracle(f.total, 5);
  REQUIRE(coeffs.lmax == 5);
  for (int component = 1; component <= 3; ++component)
    for (int n = (component == 1 ? 0 : 1); n <= 5; ++n)
      for (int k = 1; k <= 2 * n + 1; ++k) {
        const double expected = (component == 2 && n == 3 && k == 2) ? 1.0 : 0.0;
        REQUIRE(coeffs.coeff(component, n, k) == Approx(expected).margin(1e-8));
      }
}

TEST_CASE("Oracle is linear over a mixed field", "[synthetic]") {
  auto grid = make_grid(16, 16);
  const SyntheticSpec spec{{{1, 2, 3, 2.0}, {3, 4, 1, -0.5}}, 1.0};
  const SyntheticField f = make_field(spec, grid);
  const SpectralCoefficients coeffs = spectral_oracle(f.total, 5);
  REQUIRE(coeffs.coeff(1, 2, 3) == Approx(2.0).margin(1e-8));
  REQUIRE(coeffs.coeff(3, 4, 1) == Approx(-0.5).margin(1e-8));
  REQUIRE(coeffs.coeff(2, 2, 3) == Approx(0.0).margin(1e-8));
  REQUIRE(coeffs.coeff(1, 4, 1) == Approx(0.0).margin(1e-8));

  // Parseval: the coefficient energy equals the quadrature energy equals the
  // sum of squared amplitudes.
  const double amp2 = 2.0 * 2.0 + 0.5 * 0.5;
  REQUIRE(coeffs.sum_of_squares() == Approx(amp2).margin(1e-8));
  double quad = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vec3& v = f.total.values[i];
    quad += grid->node_weight(i) * dot(v, v);
  }
  REQUIRE(quad == Approx(amp2).margin(1e-8));
}

TEST_CASE("Oracle of the zero field is zero", "[synthetic]") {
  auto grid = make_grid(16, 16);
  const SpectralCoefficients coeffs = spectral_oracle(VectorField::zeros(grid), 4);
  REQUIRE(coeffs.sum_of_squares() == 0.0);
}

TEST_CASE("Reconstruction matches the ground truth per part", "[synthetic]") {
  auto grid = make_grid(16, 16);
  const SyntheticSpec spec{{{1, 2, 1, 1.0}, {2, 3, 2, 0.8}, {3, 4, 3, -1.1}}, 1.0};
  const SyntheticField f = make_field(spec, grid);
  const SpectralCoefficients coeffs = spectral_oracle(f.total, 5);
  for (SourcePart part : {SourcePart::internal, SourcePart::external, SourcePart::toroidal}) {
    const VectorField rec = reconstruct_part(coeffs, part, grid);
    REQUIRE(sup_distance(rec, f.truth.of(part)) < 1e-8);
  }
}

TEST_CASE("Insufficient grid degree is rejected", "[synthetic]") {
  auto grid = make_grid(16, 16);  // exact to degree 15
  const VectorField f = VectorField::zeros(grid);
  REQUIRE_NOTHROW(spectral_oracle(f, 7));
  REQUIRE_THROWS_AS(spectral_oracle(f, 8), precondition_error);
  REQUIRE_THROWS_AS(spectral_oracle(f, -1), precondition_error);
  REQUIRE_THROWS_AS(spectral_oracle(VectorField{}, 2), precondition_error);
}

TEST_CASE("Synthetic spec validation", "[synthetic]") {
  auto grid = make_grid(8, 8);
  REQUIRE_THROWS_AS(make_field({{{0, 2, 1, 1.0}}, 1.0}, grid), precondition_error);
  REQUIRE_THROWS_AS(make_field({{{4, 2, 1, 1.0}}, 1.0}, grid), precondition_error);
  // Tangential components need degree at least one.
  REQUIRE_THROWS_AS(make_field({{{2, 0, 1, 1.0}}, 1.0}, grid), precondition_error);
  REQUIRE_THROWS_AS(make_field({{{3, 0, 1, 1.0}}, 1.0}, grid), precondition_error);
  REQUIRE_NOTHROW(make_field({{{1, 0, 1, 1.0}}, 1.0}, grid));
  // Order label outside 1..2n+1.
  REQUIRE_THROWS_AS(make_field({{{1, 2, 6, 1.0}}, 1.0}, grid), precondition_error);
  REQUIRE_THROWS_AS(make_field({{{1, 2, 0, 1.0}}, 1.0}, grid), precondition_error);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(make_field({{{1, 2, 1, nan}}, 1.0}, grid), precondition_error);
  REQUIRE_THROWS_AS(make_field({{{1, 2, 1, 1.0}}, 0.0}, grid), precondition_error);
  REQUIRE_THROWS_AS(make_field({{{1, 2, 1, 1.0}}, 1.0}, nullptr), precondition_error);

  const SpectralCoefficients empty{2, {}};
  REQUIRE_THROWS_AS(empty.coeff(4, 1, 1), precondition_error);
  REQUIRE_THROWS_AS(empty.coeff(1, 3, 1), precondition_error);
  REQUIRE_THROWS_AS(empty.coeff(1, 1, 4), precondition_error);
}
