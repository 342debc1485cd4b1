#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sphsep/errors.hpp"

namespace sphsep {

namespace detail {
inline void check_legendre_args(int n, double t) {
  if (n < 0) throw precondition_error("legendre: degree must be >= 0");
  if (!(t >= -1.0 && t <= 1.0)) throw precondition_error("legendre: argument outside [-1, 1]");
}
}  // namespace detail

// Legendre polynomials P_0..P_nmax at t via the three-term recurrence.
// out must have nmax + 1 slots.
inline void legendre_sequence(int nmax, double t, std::span<double> out) {
  detail::check_legendre_args(nmax, t);
  if (out.size() != static_cast<std::size_t>(nmax) + 1)
    throw precondition_error("legendre_sequence: output span has wrong length");
  out[0] = 1.0;
  if (nmax == 0) return;
  out[1] = t;
  for (int n = 2; n <= nmax; ++n)
    out[n] = ((2 * n - 1) * t * out[n - 1] - (n - 1) * out[n - 2]) / n;
}

inline double legendre_eval(int n, double t) {
  detail::check_legendre_args(n, t);
  double pm1 = 1.0;
  if (n == 0) return pm1;
  double p = t;
  for (int k = 2; k <= n; ++k) {
    const double pn = ((2 * k - 1) * t * p - (k - 1) * pm1) / k;
    pm1 = p;
    p = pn;
  }
  return p;
}

// dP_n/dt on the open interval; the 1 - t^2 denominator rules out t = +-1.
inline double legendre_deriv(int n, double t) {
  detail::check_legendre_args(n, t);
  if (t == 1.0 || t == -1.0)
    throw precondition_error("legendre_deriv: t must lie strictly inside (-1, 1)");
  if (n == 0) return 0.0;
  // (1-t^2) P_n' = n (P_{n-1} - t P_n)
  double pm1 = 1.0, p = t;
  for (int k = 2; k <= n; ++k) {
    const double pn = ((2 * k - 1) * t * p - (k - 1) * pm1) / k;
    pm1 = p;
    p = pn;
  }
  return n * (pm1 - t * p) / (1.0 - t * t);
}

}  // namespace sphsep
