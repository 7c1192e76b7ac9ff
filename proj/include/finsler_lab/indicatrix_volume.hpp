#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string_view>

#include "finsler_lab/core_geometry.hpp"
#include "finsler_lab/error.hpp"
#include "finsler_lab/quadrature.hpp"
#include "finsler_lab/types.hpp"

namespace finsler {

enum class VolumeMethod { closed_form, scaling_law, quadrature };

constexpr std::string_view to_string(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::closed_form: return "closed_form";
    case VolumeMethod::scaling_law: return "scaling_law";
    case VolumeMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

struct VolumeResult {
  double value = 0.0;
  VolumeMethod method = VolumeMethod::closed_form;
  double error_estimate = 0.0;

  bool infinite() const noexcept { return std::isinf(value); }
};

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(std::size_t n) {
  const double h = 0.5 * double(n);
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

/// Euclidean volume of {xi : g_ij xi^i xi^j <= 1} = omega_n / sqrt(det g).
inline VolumeResult ellipsoid_volume(const Matrix& g) {
  const std::size_t n = g.size();
  require(n >= 1, ErrorCode::InvalidArgument, "empty matrix");
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(g(i, j)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::abs(g(i, j) - g(j, i)) <= 1e-12 * scale, ErrorCode::NotPositiveDefinite,
              "matrix is not symmetric");
  // Cholesky; det g is the squared product of the pivots.
  Matrix l(n);
  double log_det = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = g(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    require(d > 0.0, ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    log_det += 2.0 * std::log(l(j, j));
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return {unit_ball_volume(n) * std::exp(-0.5 * log_det), VolumeMethod::closed_form, 0.0};
}

/// 3-volume of the xi^0 = t slice of the regularized body: the ball of radius t
/// minus the ball where sqrt(t^2 - r^2) + q0 t > 1.
inline double regularized_slice_volume(double q0, double t) {
  const double outer = t * t * t;
  const double w = 1.0 - q0 * t;
  const double inner2 = t * t - w * w;
  const double inner = inner2 > 0.0 ? inner2 * std::sqrt(inner2) : 0.0;
  return 4.0 * std::numbers::pi / 3.0 * std::max(outer - inner, 0.0);
}

/// 4-volume of {xi in the forward cone : sqrt(eta(xi, xi)) + q0 xi^0 <= 1}.
/// Slices are integrated over xi^0 in two panels split at 1/(1+q0), where the
/// hollow core of the slice opens.
inline VolumeResult regularized_hyperboloid_volume(double q0, double rel_tol = 1e-9) {
  require(q0 > 0.0, ErrorCode::NonpositiveQ0, "q0 must be positive");
  const double split = 1.0 / (1.0 + q0);
  const double top = 1.0 / q0;
  auto slice = [q0](double t) { return regularized_slice_volume(q0, t); };

  // First panel: full balls, integral of (4 pi / 3) t^3.
  const double solid = std::numbers::pi / 3.0 * std::pow(split, 4);
  const double shell_guess = (top - split) * slice(0.5 * (split + top));
  const double abs_tol = rel_tol * std::max(solid + shell_guess, std::numeric_limits<double>::min());
  const QuadratureResult a = adaptive_simpson(slice, 0.0, split, 0.5 * abs_tol);
  const QuadratureResult b = adaptive_simpson(slice, split, top, 0.5 * abs_tol);
  return {a.value + b.value, VolumeMethod::quadrature, a.error_estimate + b.error_estimate};
}

namespace detail {

/// kappa = 1 normalization of each family.
inline VolumeResult base_volume(const SpaceSpec& spec) {
  return std::visit(overloaded{
                        [](const EuclideanConformal& e) {
                          return VolumeResult{unit_ball_volume(e.n), VolumeMethod::closed_form, 0.0};
                        },
                        [](const PseudoEuclideanConformal&) { return VolumeResult{1.0, VolumeMethod::closed_form, 0.0}; },
                        [](const BerwaldMooreConformal&) { return VolumeResult{1.0, VolumeMethod::closed_form, 0.0}; },
                        [](const RegularizedHyperboloid& r) { return regularized_hyperboloid_volume(r.q0); },
                    },
                    spec.kind);
}

}  // namespace detail

/// Indicatrix volume at x: the kappa = 1 volume scaled by 1/kappa^n, since the
/// indicatrix at x is the flat one shrunk by 1/kappa(x).
inline VolumeResult conformal_indicatrix_volume(const SpaceSpec& spec, const Point& x) {
  const double kappa = kappa_at(spec, x);
  const VolumeResult base = detail::base_volume(spec);
  const double scale = std::pow(kappa, -double(spec.dimension()));
  const VolumeMethod method =
      std::holds_alternative<RegularizedHyperboloid>(spec.kind) ? VolumeMethod::quadrature : VolumeMethod::scaling_law;
  return {base.value * scale, method, base.error_estimate * scale};
}

/// Volume of the indicatrix body as a Euclidean set, without any assigned
/// normalization. Non-compact indicatrices (pseudo, Berwald-Moore) give +inf.
inline VolumeResult raw_indicatrix_volume(const SpaceSpec& spec, const Point& x) {
  const double kappa = kappa_at(spec, x);
  if (std::holds_alternative<PseudoEuclideanConformal>(spec.kind) ||
      std::holds_alternative<BerwaldMooreConformal>(spec.kind))
    return {std::numeric_limits<double>::infinity(), VolumeMethod::closed_form, 0.0};
  if (const auto* e = std::get_if<EuclideanConformal>(&spec.kind)) {
    Matrix g = Matrix::identity(e->n);
    for (std::size_t i = 0; i < e->n; ++i) g(i, i) = kappa * kappa;
    return ellipsoid_volume(g);
  }
  return conformal_indicatrix_volume(spec, x);
}

enum class VolumeMode {
  /// Scaling-law volume, finite for every family.
  assigned,
  /// Raw Euclidean volume; infinite for the unregularized pseudo families.
  raw,
};

/// Lagrangian density V_base / V_ind(x); equals kappa^n for the conformal
/// families.
inline double lagrangian_from_volume(const SpaceSpec& spec, const Point& x, VolumeMode mode = VolumeMode::assigned) {
  const VolumeResult v =
      mode == VolumeMode::raw ? raw_indicatrix_volume(spec, x) : conformal_indicatrix_volume(spec, x);
  require(!v.infinite(), ErrorCode::InfiniteVolume, "indicatrix volume is infinite");
  require(v.value > 0.0, ErrorCode::InfiniteVolume, "indicatrix volume is not positive");
  if (std::holds_alternative<RegularizedHyperboloid>(spec.kind)) return 1.0 / v.value;
  return detail::base_volume(spec).value / v.value;
}

}  // namespace finsler
