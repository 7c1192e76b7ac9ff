#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "finsler_lab/core_geometry.hpp"
#include "finsler_lab/error.hpp"
#include "finsler_lab/types.hpp"

namespace finsler {

enum class FormKind {
  /// (sum dS_i^2)^(n/2)
  EuclideanPower,
  /// (eta^ij dS_i dS_j)^(n/2), signature (+,-,...,-)
  PseudoPower,
  /// rho^(n-1) |S'|^n, arguments (rho, S')
  RadialReduced,
  /// r^2 (S_0^2 - S_r^2)^2, arguments (r, S_0, S_r); coordinates (x0, r)
  SphericalReduced,
  /// dS_1 dS_2 dS_3 dS_4
  BerwaldMooreProduct,
  /// s^3 S'^4, arguments (s, S')
  BerwaldMooreRadial,
};

constexpr std::string_view to_string(FormKind k) {
  switch (k) {
    case FormKind::EuclideanPower: return "EuclideanPower";
    case FormKind::PseudoPower: return "PseudoPower";
    case FormKind::RadialReduced: return "RadialReduced";
    case FormKind::SphericalReduced: return "SphericalReduced";
    case FormKind::BerwaldMooreProduct: return "BerwaldMooreProduct";
    case FormKind::BerwaldMooreRadial: return "BerwaldMooreRadial";
  }
  return "unknown";
}

struct LagrangianForm {
  FormKind kind = FormKind::EuclideanPower;
  std::size_t n = 4;

  static LagrangianForm euclidean(std::size_t n) { return make(FormKind::EuclideanPower, n); }
  static LagrangianForm pseudo(std::size_t n) { return make(FormKind::PseudoPower, n); }
  static LagrangianForm radial(std::size_t n) { return make(FormKind::RadialReduced, n); }
  static LagrangianForm spherical() { return make(FormKind::SphericalReduced, 4); }
  static LagrangianForm berwald_moore() { return make(FormKind::BerwaldMooreProduct, 4); }
  static LagrangianForm berwald_moore_radial() { return make(FormKind::BerwaldMooreRadial, 4); }

  /// Number of lattice axes the form's field lives on.
  std::size_t grid_rank() const {
    switch (kind) {
      case FormKind::EuclideanPower:
      case FormKind::PseudoPower: return n;
      case FormKind::BerwaldMooreProduct: return 4;
      case FormKind::SphericalReduced: return 2;
      case FormKind::RadialReduced:
      case FormKind::BerwaldMooreRadial: return 1;
    }
    return n;
  }

 private:
  static LagrangianForm make(FormKind k, std::size_t n) {
    require(n >= 2, ErrorCode::InvalidArgument, "dimension must be >= 2");
    return {k, n};
  }
};

namespace detail {

inline double ipow(double base, std::size_t e) {
  double r = 1.0;
  while (e) {
    if (e & 1U) r *= base;
    base *= base;
    e >>= 1U;
  }
  return r;
}

/// base^(half_exponent / 2) with an integer numerator; negative bases are
/// allowed only for even numerators.
inline double half_power(double base, long twice_exponent) {
  if (twice_exponent == 0) return 1.0;
  if (twice_exponent % 2 == 0) {
    const long e = twice_exponent / 2;
    return e > 0 ? ipow(base, std::size_t(e)) : 1.0 / ipow(base, std::size_t(-e));
  }
  require(base >= 0.0, ErrorCode::NegativeBase, "half-integer power of a negative quadratic form");
  return std::pow(base, 0.5 * double(twice_exponent));
}

/// sign(v) |v|^p
inline double signed_power(double v, std::size_t p) {
  const double m = ipow(std::abs(v), p);
  return v < 0.0 ? -m : m;
}

}  // namespace detail

/// Lagrangian density. Full-gradient forms take dS; reduced forms take their
/// argument tuple as documented on FormKind.
inline double lagrangian_density(const LagrangianForm& form, std::span<const double> args) {
  const auto need = [&](std::size_t k) {
    require(args.size() == k, ErrorCode::InvalidArgument,
            std::string(to_string(form.kind)) + " expects " + std::to_string(k) + " arguments");
  };
  switch (form.kind) {
    case FormKind::EuclideanPower:
      need(form.n);
      return detail::half_power(dot(args, args), long(form.n));
    case FormKind::PseudoPower:
      need(form.n);
      return detail::half_power(minkowski_square(args), long(form.n));
    case FormKind::RadialReduced:
      need(2);
      return detail::ipow(args[0], form.n - 1) * detail::ipow(std::abs(args[1]), form.n);
    case FormKind::SphericalReduced: {
      need(3);
      const double q = args[1] * args[1] - args[2] * args[2];
      return args[0] * args[0] * q * q;
    }
    case FormKind::BerwaldMooreProduct:
      need(4);
      return args[0] * args[1] * args[2] * args[3];
    case FormKind::BerwaldMooreRadial:
      need(2);
      return detail::ipow(args[0], 3) * detail::ipow(args[1], 4);
  }
  return 0.0;
}

inline double lagrangian_density(const LagrangianForm& form, const Covector& grad) {
  return lagrangian_density(form, grad.view());
}

/// Component `axis` of the field-equation flux at coordinates `at` and
/// gradient `g` (derivatives along the form's own lattice axes). The field
/// equation is sum_i d/dx^i F_i = 0. Constant prefactors of dL/d(dS_i) are
/// dropped, so these are the brackets exactly as they appear in the radial,
/// power and product field equations.
inline double field_flux(const LagrangianForm& form, std::span<const double> at, std::span<const double> g,
                         std::size_t axis) {
  switch (form.kind) {
    case FormKind::EuclideanPower:
      return g[axis] * detail::half_power(dot(g, g), long(form.n) - 2);
    case FormKind::PseudoPower:
      return minkowski_sign(axis) * g[axis] * detail::half_power(minkowski_square(g), long(form.n) - 2);
    case FormKind::BerwaldMooreProduct: {
      double p = 1.0;
      for (std::size_t k = 0; k < 4; ++k)
        if (k != axis) p *= g[k];
      return p;
    }
    case FormKind::RadialReduced:
      // |S'|^(n-1) carries the sign of S' so the flux is d/dS' of |S'|^n / n.
      return detail::ipow(at[0], form.n - 1) * detail::signed_power(g[0], form.n - 1);
    case FormKind::BerwaldMooreRadial:
      return at[0] * g[0];
    case FormKind::SphericalReduced: {
      const double r2 = at[1] * at[1];
      const double q = g[0] * g[0] - g[1] * g[1];
      return axis == 0 ? r2 * g[0] * q : -r2 * g[1] * q;
    }
  }
  return 0.0;
}

/// d F_axis / d g_j for the full-gradient forms.
inline double field_flux_jacobian(const LagrangianForm& form, std::span<const double> g, std::size_t axis,
                                  std::size_t j) {
  const double delta = axis == j ? 1.0 : 0.0;
  switch (form.kind) {
    case FormKind::EuclideanPower: {
      const double q = dot(g, g);
      const long e2 = long(form.n) - 2;
      const double chain = e2 == 0 ? 0.0 : double(e2) * g[axis] * g[j] * detail::half_power(q, e2 - 2);
      return delta * detail::half_power(q, e2) + chain;
    }
    case FormKind::PseudoPower: {
      const double q = minkowski_square(g);
      const long e2 = long(form.n) - 2;
      const double si = minkowski_sign(axis), sj = minkowski_sign(j);
      const double chain = e2 == 0 ? 0.0 : double(e2) * si * g[axis] * sj * g[j] * detail::half_power(q, e2 - 2);
      return si * delta * detail::half_power(q, e2) + chain;
    }
    case FormKind::BerwaldMooreProduct: {
      if (axis == j) return 0.0;
      double p = 1.0;
      for (std::size_t k = 0; k < 4; ++k)
        if (k != axis && k != j) p *= g[k];
      return p;
    }
    default:
      fail(ErrorCode::InvalidArgument, "flux jacobian is defined for full-gradient forms only");
  }
}

struct ResidualNorms {
  double max_abs = 0.0;
  /// Root-mean-square over the evaluated points.
  double l2 = 0.0;
  std::size_t count = 0;
};

struct ResidualLattice {
  /// Same layout as the input grid; boundary nodes hold 0 and are excluded
  /// from the norms.
  std::vector<double> values;
  std::vector<bool> interior;
  ResidualNorms norms;
};

namespace detail {

inline ResidualNorms accumulate_norms(const std::vector<double>& values, const std::vector<bool>& mask) {
  ResidualNorms n;
  double sum2 = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!mask[k]) continue;
    n.max_abs = std::max(n.max_abs, std::abs(values[k]));
    sum2 += values[k] * values[k];
    ++n.count;
  }
  n.l2 = n.count ? std::sqrt(sum2 / double(n.count)) : 0.0;
  return n;
}

}  // namespace detail

/// Divergence-form residual sum_i (F_i(x + h_i/2) - F_i(x - h_i/2)) / h_i on
/// interior nodes. The normal gradient component at a half node is the
/// one-sided difference across it; tangential components average the central
/// differences of the two adjacent nodes. Second order in h.
inline ResidualLattice euler_lagrange_residual(const LagrangianForm& form, const GridSampled& field) {
  const std::size_t rank = field.rank();
  require(rank == form.grid_rank(), ErrorCode::InvalidArgument,
          std::string(to_string(form.kind)) + " needs a rank-" + std::to_string(form.grid_rank()) + " lattice");
  for (std::size_t k = 0; k < rank; ++k)
    require(field.dims()[k] >= 5, ErrorCode::GridTooSmall, "lattice needs at least 5 points per axis");

  const auto& v = field.values();
  const auto& h = field.spacing();
  ResidualLattice out;
  out.values.assign(v.size(), 0.0);
  out.interior.assign(v.size(), false);

  std::vector<double> g(rank), at(rank);
  auto central = [&](std::size_t node, std::size_t axis) {
    const std::size_t s = field.stride(axis);
    return (v[node + s] - v[node - s]) / (2.0 * h[axis]);
  };

  for (std::size_t flat = 0; flat < v.size(); ++flat) {
    const auto idx = field.unflatten(flat);
    if (!field.is_interior(idx)) continue;
    const Point x = field.node(flat);
    double div = 0.0;
    for (std::size_t i = 0; i < rank; ++i) {
      const std::size_t si = field.stride(i);
      double flux[2];
      for (int side = 0; side < 2; ++side) {
        const std::size_t lo = side == 0 ? flat : flat - si;
        const std::size_t hi = lo + si;
        for (std::size_t j = 0; j < rank; ++j) {
          at[j] = x[j];
          if (j == i)
            g[j] = (v[hi] - v[lo]) / h[i];
          else
            g[j] = 0.5 * (central(lo, j) + central(hi, j));
        }
        at[i] = x[i] + (side == 0 ? 0.5 : -0.5) * h[i];
        flux[side] = field_flux(form, at, g, i);
      }
      div += (flux[0] - flux[1]) / h[i];
    }
    out.values[flat] = div;
    out.interior[flat] = true;
  }
  out.norms = detail::accumulate_norms(out.values, out.interior);
  return out;
}

/// Pointwise residual of a full-gradient form, by fourth-order central
/// differences of the flux field F(dS(x)).
inline double pointwise_residual_flux(const LagrangianForm& form, const FieldSpec& field, const Point& x,
                                      double step = 1e-3) {
  const std::size_t n = x.size();
  std::vector<double> none;
  double div = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = step * (1.0 + std::abs(x[i]));
    auto flux_at = [&](double offset) {
      Point y = x;
      y[i] += offset;
      const Covector g = field_gradient(field, y);
      return field_flux(form, none, g.view(), i);
    };
    div += (-flux_at(2 * h) + 8 * flux_at(h) - 8 * flux_at(-h) + flux_at(-2 * h)) / (12 * h);
  }
  return div;
}

/// Pointwise residual of a full-gradient form by the chain rule:
/// sum_ij dF_i/dg_j * d^2 S / dx^j dx^i, with the field's own Hessian.
inline double pointwise_residual_expanded(const LagrangianForm& form, const FieldSpec& field, const Point& x) {
  const Covector g = field_gradient(field, x);
  const Matrix hess = field_hessian(field, x);
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) r += field_flux_jacobian(form, g.view(), i, j) * hess(j, i);
  return r;
}

// ---------------------------------------------------------------------------
// Radial reductions
// ---------------------------------------------------------------------------

/// Arbitrary S(rho) for the radial field equation; derivatives by differencing.
struct RadialCustom {
  std::function<double(double)> S;
  /// true: Berwald-Moore radial equation d/ds[s S'] = 0.
  bool berwald_moore = false;
};

using RadialFamily = std::variant<RadialLog, IntervalLog, BerwaldMooreLog, RadialCustom>;

/// d/drho [rho^(n-1) sign(S') |S'|^(n-1)] for RadialLog / IntervalLog (rho = r
/// or s), d/ds [s S'] for BerwaldMooreLog.
inline double radial_residual(const RadialFamily& family, std::size_t n, double rho) {
  require(rho > 0.0, ErrorCode::NonpositiveRadius, "radial variable must be positive");
  require(n >= 2, ErrorCode::InvalidArgument, "dimension must be >= 2");
  auto power_law = [n, rho](double d1, double d2) {
    // d/drho of rho^(n-1) sign(d1)|d1|^(n-1), expanded by the product rule.
    const double a = double(n - 1) * detail::ipow(rho, n - 2) * detail::signed_power(d1, n - 1);
    const double b = detail::ipow(rho, n - 1) * double(n - 1) * detail::ipow(std::abs(d1), n - 2) * d2;
    return a + b;
  };
  return std::visit(detail::overloaded{
                        [&](const RadialLog& f) { return power_law(f.C / rho, -f.C / (rho * rho)); },
                        [&](const IntervalLog& f) { return power_law(f.C / rho, -f.C / (rho * rho)); },
                        [&](const BerwaldMooreLog& f) {
                          const double d1 = f.S0 / rho, d2 = -f.S0 / (rho * rho);
                          return d1 + rho * d2;
                        },
                        [&](const RadialCustom& f) {
                          const double h = 1e-4 * rho, d = 1e-5 * rho;
                          auto deriv = [&](double t) { return (f.S(t + d) - f.S(t - d)) / (2.0 * d); };
                          auto flux = [&](double t) {
                            return f.berwald_moore ? t * deriv(t)
                                                   : detail::ipow(t, n - 1) * detail::signed_power(deriv(t), n - 1);
                          };
                          return (flux(rho + h) - flux(rho - h)) / (2.0 * h);
                        },
                    },
                    family);
}

// ---------------------------------------------------------------------------
// Two-dimensional degenerations and the eikonal form
// ---------------------------------------------------------------------------

enum class LinearOperator { laplace, wave };

struct DegenerationReport {
  ResidualNorms linear;
  ResidualNorms nonlinear;
};

/// Five-point Laplace (S_xx + S_yy) or wave (S_00 - S_11) residual, plus the
/// n = 2 Euler-Lagrange residual of the matching power form for comparison.
inline DegenerationReport two_dim_degeneration_check(const GridSampled& field, LinearOperator op) {
  require(field.rank() == 2, ErrorCode::InvalidArgument, "two-dimensional lattice required");
  for (std::size_t k = 0; k < 2; ++k)
    require(field.dims()[k] >= 5, ErrorCode::GridTooSmall, "lattice needs at least 5 points per axis");
  const auto& v = field.values();
  const auto& h = field.spacing();
  std::vector<double> lin(v.size(), 0.0);
  std::vector<bool> mask(v.size(), false);
  const double sign = op == LinearOperator::laplace ? 1.0 : -1.0;
  for (std::size_t flat = 0; flat < v.size(); ++flat) {
    if (!field.is_interior(field.unflatten(flat))) continue;
    const std::size_t s0 = field.stride(0), s1 = field.stride(1);
    const double d00 = (v[flat + s0] - 2.0 * v[flat] + v[flat - s0]) / (h[0] * h[0]);
    const double d11 = (v[flat + s1] - 2.0 * v[flat] + v[flat - s1]) / (h[1] * h[1]);
    lin[flat] = d00 + sign * d11;
    mask[flat] = true;
  }
  DegenerationReport rep;
  rep.linear = detail::accumulate_norms(lin, mask);
  const LagrangianForm form = op == LinearOperator::laplace ? LagrangianForm::euclidean(2) : LagrangianForm::pseudo(2);
  rep.nonlinear = euler_lagrange_residual(form, field).norms;
  return rep;
}

/// eta^ij dS_i dS_j: zero for eikonal fields, constant for the wave reduction.
inline double eikonal_residual(const FieldSpec& field, const Point& x) {
  const Covector g = field_gradient(field, x);
  return minkowski_square(g.view());
}

// ---------------------------------------------------------------------------
// Metric assembled from scalar fields
// ---------------------------------------------------------------------------

struct MetricAssembly {
  std::vector<FieldSpec> fields;
  std::vector<int> signs;
};

struct AssembledMetric {
  Matrix g;
  double det = 0.0;
};

/// g_ij = sum_a eps_a df_a/dx^i df_a/dx^j. Rank is at most N, so det = 0 for N < n.
inline AssembledMetric assemble_metric(const MetricAssembly& assembly, const Point& x) {
  require(!assembly.fields.empty(), ErrorCode::InvalidArgument, "need at least one field");
  require(assembly.fields.size() == assembly.signs.size(), ErrorCode::InvalidArgument,
          "one sign per field required");
  const std::size_t n = x.size();
  AssembledMetric out{Matrix(n), 0.0};
  for (std::size_t a = 0; a < assembly.fields.size(); ++a) {
    const int eps = assembly.signs[a];
    require(eps == 1 || eps == -1, ErrorCode::InvalidArgument, "signs must be +1 or -1");
    const Covector df = field_gradient(assembly.fields[a], x);
    require(df.size() == n, ErrorCode::InvalidArgument, "field gradient rank mismatch");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        out.g(i, j) += eps * df[i] * df[j];
        out.g(j, i) = out.g(i, j);
      }
  }
  out.det = determinant(out.g);
  return out;
}

}  // namespace finsler
