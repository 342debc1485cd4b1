#include <catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "sphsep/legendre.hpp"
#include "test_util.hpp"

using namespace sphsep;

TEST_CASE("Legendre polynomial values", "[legendre]") {
  CHECK(legendre_eval(0, 0.3) == 1.0);
  CHECK(legendre_eval(1, 0.3) == 0.3);
  CHECK(legendre_eval(4, 1.0) == Catch::Approx(1.0).margin(1e-14));
  CHECK(legendre_eval(2, 0.5) == Catch::Approx(0.5 * (3 * 0.25 - 1)).margin(1e-15));
  CHECK(legendre_eval(7, -1.0) == Catch::Approx(-1.0).margin(1e-14));
}

TEST_CASE("Legendre values stay bounded by one", "[legendre]") {
  std::uniform_real_distribution<double> ts(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double t = ts(test_util::rng());
    for (int n : {1, 3, 10, 30, 100}) CHECK(std::abs(legendre_eval(n, t)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("Legendre sequence agrees with single evaluation", "[legendre]") {
  std::vector<double> seq(21);
  legendre_sequence(20, 0.37, seq);
  for (int n = 0; n <= 20; ++n) CHECK(seq[n] == Catch::Approx(legendre_eval(n, 0.37)).margin(1e-15));
  std::vector<double> wrong(5);
  CHECK_THROWS_AS(legendre_sequence(20, 0.0, wrong), precondition_error);
}

TEST_CASE("Legendre derivative closed cases", "[legendre]") {
  CHECK(legendre_deriv(1, 0.5) == 1.0);
  CHECK(legendre_deriv(2, 0.0) == 0.0);
  CHECK(legendre_deriv(3, 0.5) == Catch::Approx(0.5 * (15.0 * 0.25 - 3.0)).margin(1e-15));
}

TEST_CASE("Legendre derivative matches central differences", "[legendre]") {
  const double h = 1e-5;
  for (int n : {2, 5, 9, 14}) {
    for (double t : {-0.8, -0.3, 0.4, 0.9}) {
      const double fd = (legendre_eval(n, t + h) - legendre_eval(n, t - h)) / (2 * h);
      const double an = legendre_deriv(n, t);
      CHECK(an == Catch::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("Legendre domain errors", "[legendre]") {
  CHECK_THROWS_AS(legendre_eval(3, 1.0 + 1e-9), precondition_error);
  CHECK_THROWS_AS(legendre_eval(3, -1.1), precondition_error);
  CHECK_THROWS_AS(legendre_eval(-1, 0.0), precondition_error);
  CHECK_THROWS_AS(legendre_deriv(2, 1.5), precondition_error);
  CHECK_THROWS_AS(legendre_deriv(2, 1.0), precondition_error);
  CHECK_THROWS_AS(legendre_deriv(2, -1.0), precondition_error);
}
