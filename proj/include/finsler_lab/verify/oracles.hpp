#pragma once

// Reference computations that share no code path with the library routines
// they check.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "finsler_lab/cosmology.hpp"
#include "finsler_lab/quadrature.hpp"
#include "finsler_lab/series.hpp"
#include "finsler_lab/types.hpp"

namespace finsler::verify::oracle {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

namespace detail {

using Poly = std::vector<Rational>;  // Poly[k] = coefficient of xi^k, untruncated

inline Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline Poly add(Poly a, const Poly& b, const Rational& s = 1) {
  if (a.size() < b.size()) a.resize(b.size(), Rational(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
  return a;
}

inline Poly shift(const Poly& a) {
  Poly out(a.size() + 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) out[i + 1] = a[i];
  return out;
}

inline Poly deriv(const Poly& a) {
  Poly out(std::max<std::size_t>(a.size(), 2) - 1, Rational(0));
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * Rational(i);
  return out;
}

/// Full residual polynomial of xi(1-3P^2)P' + 2P(1-P^2) - 3xi(1-P^2)^2.
inline Poly residual(const Poly& P) {
  const Poly one{Rational(1)};
  const Poly P2 = mul(P, P);
  const Poly w = add(one, P2, -1);
  Poly r = shift(mul(add(one, P2, -3), deriv(P)));
  r = add(r, mul(P, w), 2);
  r = add(r, shift(mul(w, w)), -3);
  return r;
}

}  // namespace detail

/// Series coefficients by trial substitution: the residual coefficient of
/// xi^k is affine in a_k, so evaluating it at a_k = 0 and a_k = 1 fixes a_k.
inline std::vector<Rational> series_coefficients(std::size_t order) {
  detail::Poly P(order + 1, Rational(0));
  for (std::size_t k = 1; k <= order; ++k) {
    P[k] = 0;
    const Rational r0 = detail::residual(P)[k];
    P[k] = 1;
    const Rational r1 = detail::residual(P)[k];
    P[k] = -r0 / (r1 - r0);
  }
  return {P.begin() + 1, P.end()};
}

/// omega_n by the recursion omega_n = 2 pi / n omega_{n-2}.
inline double unit_ball_volume(std::size_t n) {
  double w = (n % 2 == 0) ? 1.0 : 2.0;
  for (std::size_t k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2) w *= 2.0 * std::numbers::pi / double(k);
  return w;
}

/// B B^T + n I with B uniform in [-1, 1].
inline Matrix random_spd(std::size_t n, std::mt19937_64& rng) {
  Matrix b(n), g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = uniform(rng, -1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = i == j ? double(n) : 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b(i, k) * b(j, k);
      g(i, j) = s;
    }
  return g;
}

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Hit-or-miss volume of {x^0 > 0, s = sqrt(x0^2 - |x|^2) real, s + q0 x^0 <= 1}
/// in the box [0, 1/q0] x [-1/q0, 1/q0]^3.
inline McEstimate regularized_volume_mc(double q0, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double top = 1.0 / q0;
  const double box = top * std::pow(2.0 * top, 3);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = uniform(rng, 0.0, top);
    const double a = uniform(rng, -top, top), b = uniform(rng, -top, top), c = uniform(rng, -top, top);
    const double s2 = t * t - a * a - b * b - c * c;
    if (s2 >= 0.0 && std::sqrt(s2) + q0 * t <= 1.0) ++hits;
  }
  const double p = double(hits) / double(samples);
  return {box * p, box * std::sqrt(p * (1.0 - p) / double(samples))};
}

/// x^0 elapsed while a body moves radially from r0 to r1: int dr / phi(gamma r).
inline double cosmo_elapsed_time(const CosmoSolution& sol, double r0, double r1, double tol = 1e-13) {
  const double g = sol.parameters().gamma;
  return adaptive_simpson([&](double r) { return 1.0 / sol.phi(g * r); }, r0, r1, tol).value;
}

}  // namespace finsler::verify::oracle
