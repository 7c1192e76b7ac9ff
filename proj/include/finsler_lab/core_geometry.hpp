#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "finsler_lab/error.hpp"
#include "finsler_lab/types.hpp"

namespace finsler {

// ---------------------------------------------------------------------------
// Scalar fields S(x)
// ---------------------------------------------------------------------------

/// S = C ln(r / r0), r the Euclidean radius over all n coordinates.
struct RadialLog {
  double C = 1.0;
  double r0 = 1.0;
};

/// S = C ln(s / s0), s the Minkowski interval sqrt(x0^2 - |x|^2).
struct IntervalLog {
  double C = 1.0;
  double s0 = 1.0;
};

/// S = S0 ln(s / s0) with s = (xi1 xi2 xi3 xi4)^(1/4) in the isotropic basis.
struct BerwaldMooreLog {
  double S0 = 1.0;
  double s0 = 1.0;
};

/// One-dimensional profile phi(xi) together with its derivative and its
/// running integral from 0. Supplied by the cosmology solver.
struct ScalarProfile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> integral;
};

/// S = S0 exp(-gamma x0) psi(gamma r), psi = exp(int_0^{gamma r} phi),
/// r the spatial radius of (x1, x2, x3).
struct CosmoExp {
  double S0 = 1.0;
  double gamma = 1.0;
  ScalarProfile phi;
};

/// Field given by callables. A missing gradient or hessian is filled in by
/// central differences with step `fd_step`.
struct CustomField {
  std::function<double(const Point&)> value;
  std::function<Covector(const Point&)> gradient;
  std::function<Matrix(const Point&)> hessian;
  double fd_step = 1e-5;
};

/// Regular lattice of S values. Storage is shared and immutable, so copies
/// are cheap. The last axis varies fastest.
class GridSampled {
 public:
  GridSampled(std::vector<double> origin, std::vector<double> spacing, std::vector<std::size_t> dims,
              std::vector<double> values) {
    Data d{std::move(origin), std::move(spacing), std::move(dims), std::move(values), {}};
    require(!d.dims.empty() && d.origin.size() == d.dims.size() && d.spacing.size() == d.dims.size(),
            ErrorCode::InvalidArgument, "grid origin/spacing/dims rank mismatch");
    std::size_t total = 1;
    for (std::size_t k = 0; k < d.dims.size(); ++k) {
      require(d.spacing[k] > 0.0, ErrorCode::InvalidArgument, "grid spacing must be positive");
      total *= d.dims[k];
    }
    require(total == d.values.size(), ErrorCode::InvalidArgument, "grid value count mismatch");
    d.strides.assign(d.dims.size(), 1);
    for (std::size_t k = d.dims.size() - 1; k > 0; --k) d.strides[k - 1] = d.strides[k] * d.dims[k];
    data_ = std::make_shared<const Data>(std::move(d));
  }

  std::size_t rank() const noexcept { return data_->dims.size(); }
  const std::vector<std::size_t>& dims() const noexcept { return data_->dims; }
  const std::vector<double>& spacing() const noexcept { return data_->spacing; }
  const std::vector<double>& origin() const noexcept { return data_->origin; }
  const std::vector<double>& values() const noexcept { return data_->values; }
  std::size_t stride(std::size_t axis) const { return data_->strides[axis]; }
  std::size_t size() const noexcept { return data_->values.size(); }

  double at(std::size_t flat) const { return data_->values[flat]; }

  std::vector<std::size_t> unflatten(std::size_t flat) const {
    std::vector<std::size_t> idx(rank());
    for (std::size_t k = 0; k < rank(); ++k) {
      idx[k] = flat / data_->strides[k];
      flat %= data_->strides[k];
    }
    return idx;
  }

  Point node(std::size_t flat) const {
    const auto idx = unflatten(flat);
    Point p(rank());
    for (std::size_t k = 0; k < rank(); ++k) p[k] = data_->origin[k] + double(idx[k]) * data_->spacing[k];
    return p;
  }

  bool is_interior(const std::vector<std::size_t>& idx) const {
    for (std::size_t k = 0; k < rank(); ++k)
      if (idx[k] == 0 || idx[k] + 1 >= data_->dims[k]) return false;
    return true;
  }

  /// Flat index of the lattice node at x. Throws if x is not a node.
  std::size_t locate(const Point& x) const {
    require(x.size() == rank(), ErrorCode::InvalidArgument, "point rank does not match grid");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < rank(); ++k) {
      const double u = (x[k] - data_->origin[k]) / data_->spacing[k];
      const double r = std::round(u);
      require(std::abs(u - r) <= 1e-6, ErrorCode::InvalidArgument, "point is not a lattice node");
      require(r >= 0.0 && r < double(data_->dims[k]), ErrorCode::BoundaryPoint, "point outside grid");
      flat += std::size_t(r) * data_->strides[k];
    }
    return flat;
  }

  /// Second-order central-difference gradient at an interior node.
  Covector gradient_at(std::size_t flat) const {
    require(is_interior(unflatten(flat)), ErrorCode::BoundaryPoint, "gradient requested on grid boundary");
    Covector g(rank());
    for (std::size_t k = 0; k < rank(); ++k) {
      const std::size_t s = data_->strides[k];
      g[k] = (data_->values[flat + s] - data_->values[flat - s]) / (2.0 * data_->spacing[k]);
    }
    return g;
  }

  Matrix hessian_at(std::size_t flat) const {
    require(is_interior(unflatten(flat)), ErrorCode::BoundaryPoint, "hessian requested on grid boundary");
    const auto& v = data_->values;
    Matrix h(rank());
    for (std::size_t a = 0; a < rank(); ++a) {
      const std::size_t sa = data_->strides[a];
      const double ha = data_->spacing[a];
      h(a, a) = (v[flat + sa] - 2.0 * v[flat] + v[flat - sa]) / (ha * ha);
      for (std::size_t b = a + 1; b < rank(); ++b) {
        const std::size_t sb = data_->strides[b];
        const double hb = data_->spacing[b];
        const double m = (v[flat + sa + sb] - v[flat + sa - sb] - v[flat - sa + sb] + v[flat - sa - sb]) /
                         (4.0 * ha * hb);
        h(a, b) = m;
        h(b, a) = m;
      }
    }
    return h;
  }

 private:
  struct Data {
    std::vector<double> origin;
    std::vector<double> spacing;
    std::vector<std::size_t> dims;
    std::vector<double> values;
    std::vector<std::size_t> strides;
  };
  std::shared_ptr<const Data> data_;
};

using FieldSpec = std::variant<RadialLog, IntervalLog, BerwaldMooreLog, CosmoExp, GridSampled, CustomField>;

/// Samples `fn` on the lattice origin + i*spacing, i < dims.
template <class Fn>
GridSampled sample_field(Fn&& fn, std::vector<double> origin, std::vector<double> spacing,
                         std::vector<std::size_t> dims) {
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<double> values(total);
  const std::size_t rank = dims.size();
  std::vector<std::size_t> idx(rank, 0);
  Point p(rank);
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (std::size_t k = 0; k < rank; ++k) p[k] = origin[k] + double(idx[k]) * spacing[k];
    values[flat] = fn(p);
    for (std::size_t k = rank; k-- > 0;) {
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
    }
  }
  return GridSampled(std::move(origin), std::move(spacing), std::move(dims), std::move(values));
}

namespace detail {

inline double spatial_radius(const Point& x) {
  double r2 = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) r2 += x[i] * x[i];
  return std::sqrt(r2);
}

inline double interval_of(const Point& x) {
  const double q = minkowski_square(x.view());
  require(x[0] > 0.0 && q > 0.0, ErrorCode::InadmissibleDirection,
          "IntervalLog needs a point inside the open forward cone");
  return std::sqrt(q);
}

inline Covector fd_gradient(const std::function<double(const Point&)>& f, const Point& x, double h) {
  Covector g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    Point a = x, b = x;
    const double step = h * (1.0 + std::abs(x[k]));
    a[k] += step;
    b[k] -= step;
    g[k] = (f(a) - f(b)) / (2.0 * step);
  }
  return g;
}

inline Matrix fd_hessian_from_gradient(const std::function<Covector(const Point&)>& grad, const Point& x,
                                       double h) {
  const std::size_t n = x.size();
  Matrix m(n);
  for (std::size_t k = 0; k < n; ++k) {
    Point a = x, b = x;
    const double step = h * (1.0 + std::abs(x[k]));
    a[k] += step;
    b[k] -= step;
    const Covector ga = grad(a), gb = grad(b);
    for (std::size_t i = 0; i < n; ++i) m(i, k) = (ga[i] - gb[i]) / (2.0 * step);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) m(i, k) = m(k, i) = 0.5 * (m(i, k) + m(k, i));
  return m;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

inline double field_value(const FieldSpec& field, const Point& x) {
  return std::visit(
      detail::overloaded{
          [&](const RadialLog& f) {
            const double r = euclidean_norm(x.view());
            require(r > 0.0, ErrorCode::NonpositiveRadius, "RadialLog at the origin");
            return f.C * std::log(r / f.r0);
          },
          [&](const IntervalLog& f) { return f.C * std::log(detail::interval_of(x) / f.s0); },
          [&](const BerwaldMooreLog& f) {
            require(x.size() == 4, ErrorCode::InvalidArgument, "Berwald-Moore field needs 4 coordinates");
            double lsum = 0.0;
            for (double v : x) {
              require(v > 0.0, ErrorCode::InadmissibleDirection, "Berwald-Moore field needs xi^i > 0");
              lsum += std::log(v);
            }
            return f.S0 * (0.25 * lsum - std::log(f.s0));
          },
          [&](const CosmoExp& f) {
            const double r = detail::spatial_radius(x);
            return f.S0 * std::exp(-f.gamma * x[0] + f.phi.integral(f.gamma * r));
          },
          [&](const GridSampled& g) { return g.at(g.locate(x)); },
          [&](const CustomField& f) { return f.value(x); },
      },
      field);
}

inline Covector field_gradient(const FieldSpec& field, const Point& x) {
  return std::visit(
      detail::overloaded{
          [&](const RadialLog& f) {
            const double r2 = dot(x.view(), x.view());
            require(r2 > 0.0, ErrorCode::NonpositiveRadius, "RadialLog at the origin");
            Covector g(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = f.C * x[i] / r2;
            return g;
          },
          [&](const IntervalLog& f) {
            const double s = detail::interval_of(x);
            Covector g(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = f.C * minkowski_sign(i) * x[i] / (s * s);
            return g;
          },
          [&](const BerwaldMooreLog& f) {
            require(x.size() == 4, ErrorCode::InvalidArgument, "Berwald-Moore field needs 4 coordinates");
            Covector g(4);
            for (std::size_t i = 0; i < 4; ++i) {
              require(x[i] > 0.0, ErrorCode::InadmissibleDirection, "Berwald-Moore field needs xi^i > 0");
              g[i] = f.S0 / (4.0 * x[i]);
            }
            return g;
          },
          [&](const CosmoExp& f) {
            const double S = field_value(field, x);
            const double r = detail::spatial_radius(x);
            Covector g(x.size());
            g[0] = -f.gamma * S;
            if (r > 0.0) {
              const double radial = S * f.gamma * f.phi.value(f.gamma * r);
              for (std::size_t i = 1; i < x.size(); ++i) g[i] = radial * x[i] / r;
            }
            return g;
          },
          [&](const GridSampled& g) { return g.gradient_at(g.locate(x)); },
          [&](const CustomField& f) {
            return f.gradient ? f.gradient(x) : detail::fd_gradient(f.value, x, f.fd_step);
          },
      },
      field);
}

inline Matrix field_hessian(const FieldSpec& field, const Point& x) {
  const std::size_t n = x.size();
  return std::visit(
      detail::overloaded{
          [&](const RadialLog& f) {
            const double r2 = dot(x.view(), x.view());
            require(r2 > 0.0, ErrorCode::NonpositiveRadius, "RadialLog at the origin");
            Matrix h(n);
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < n; ++j)
                h(i, j) = f.C * ((i == j ? 1.0 : 0.0) / r2 - 2.0 * x[i] * x[j] / (r2 * r2));
            return h;
          },
          [&](const IntervalLog& f) {
            const double s = detail::interval_of(x);
            const double s2 = s * s;
            Matrix h(n);
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < n; ++j) {
                const double xi = minkowski_sign(i) * x[i], xj = minkowski_sign(j) * x[j];
                h(i, j) = f.C * ((i == j ? minkowski_sign(i) : 0.0) / s2 - 2.0 * xi * xj / (s2 * s2));
              }
            return h;
          },
          [&](const BerwaldMooreLog& f) {
            Matrix h(4);
            for (std::size_t i = 0; i < 4; ++i) {
              require(x[i] > 0.0, ErrorCode::InadmissibleDirection, "Berwald-Moore field needs xi^i > 0");
              h(i, i) = -f.S0 / (4.0 * x[i] * x[i]);
            }
            return h;
          },
          [&](const CosmoExp& f) {
            const double S = field_value(field, x);
            const double r = detail::spatial_radius(x);
            const double g = f.gamma;
            Matrix h(n);
            h(0, 0) = g * g * S;
            const double xi = g * r;
            // phi(xi)/r and phi'(xi) tend to gamma and 1 at the origin.
            const double phi = f.phi.value(xi);
            const double phi_over_r = r > 1e-8 / g ? phi / r : g;
            const double dphi = f.phi.derivative(xi);
            for (std::size_t a = 1; a < n; ++a) {
              const double ua = r > 0.0 ? x[a] / r : 0.0;
              h(0, a) = h(a, 0) = -g * S * g * phi * ua;
              for (std::size_t b = 1; b < n; ++b) {
                const double ub = r > 0.0 ? x[b] / r : 0.0;
                h(a, b) = S * g * (g * phi * phi * ua * ub + g * dphi * ua * ub +
                                   phi_over_r * ((a == b ? 1.0 : 0.0) - ua * ub));
              }
            }
            return h;
          },
          [&](const GridSampled& g) { return g.hessian_at(g.locate(x)); },
          [&](const CustomField& f) {
            if (f.hessian) return f.hessian(x);
            std::function<Covector(const Point&)> grad = f.gradient;
            if (!grad) grad = [&f](const Point& p) { return detail::fd_gradient(f.value, p, f.fd_step); };
            return detail::fd_hessian_from_gradient(grad, x, f.gradient ? f.fd_step : std::sqrt(f.fd_step));
          },
      },
      field);
}

// ---------------------------------------------------------------------------
// Spaces
// ---------------------------------------------------------------------------

struct EuclideanConformal {
  std::size_t n = 2;
};
/// Signature (+,-,...,-).
struct PseudoEuclideanConformal {
  std::size_t n = 4;
};
/// n = 4, isotropic basis.
struct BerwaldMooreConformal {};
/// L = s + q0 dx^0 on the closed forward cone, n = 4.
struct RegularizedHyperboloid {
  double q0 = 1.0;
};

using SpaceKind = std::variant<EuclideanConformal, PseudoEuclideanConformal, BerwaldMooreConformal,
                               RegularizedHyperboloid>;

struct ConstantKappa {
  double value = 1.0;
};
/// kappa derived from a field through the Hamilton-Jacobi relation of the space.
struct KappaFromField {
  std::shared_ptr<const FieldSpec> field;
};
struct KappaFunction {
  std::function<double(const Point&)> fn;
};
using KappaSource = std::variant<ConstantKappa, KappaFromField, KappaFunction>;

struct SpaceSpec {
  SpaceKind kind;
  KappaSource kappa_source = ConstantKappa{};

  static SpaceSpec euclidean(std::size_t n, KappaSource k = ConstantKappa{}) {
    require(n >= 2, ErrorCode::InvalidArgument, "dimension must be >= 2");
    return {EuclideanConformal{n}, std::move(k)};
  }
  static SpaceSpec pseudo_euclidean(std::size_t n, KappaSource k = ConstantKappa{}) {
    require(n >= 2, ErrorCode::InvalidArgument, "dimension must be >= 2");
    return {PseudoEuclideanConformal{n}, std::move(k)};
  }
  static SpaceSpec berwald_moore(KappaSource k = ConstantKappa{}) { return {BerwaldMooreConformal{}, std::move(k)}; }
  static SpaceSpec regularized_hyperboloid(double q0, KappaSource k = ConstantKappa{}) {
    require(q0 > 0.0, ErrorCode::NonpositiveQ0, "q0 must be positive");
    return {RegularizedHyperboloid{q0}, std::move(k)};
  }

  std::size_t dimension() const {
    return std::visit(detail::overloaded{
                          [](const EuclideanConformal& e) { return e.n; },
                          [](const PseudoEuclideanConformal& p) { return p.n; },
                          [](const BerwaldMooreConformal&) { return std::size_t{4}; },
                          [](const RegularizedHyperboloid&) { return std::size_t{4}; },
                      },
                      kind);
  }
};

inline KappaSource kappa_of(FieldSpec field) {
  return KappaFromField{std::make_shared<const FieldSpec>(std::move(field))};
}

/// Left side of the space's Hamilton-Jacobi equation at gradient p:
/// sum p^2 (Euclidean), eta^ij p_i p_j (pseudo), prod p_i (Berwald-Moore).
inline double hamilton_jacobi_form(const SpaceKind& kind, const Covector& p) {
  return std::visit(detail::overloaded{
                        [&](const EuclideanConformal&) { return dot(p.view(), p.view()); },
                        [&](const PseudoEuclideanConformal&) { return minkowski_square(p.view()); },
                        [&](const BerwaldMooreConformal&) {
                          return std::accumulate(p.begin(), p.end(), 1.0, std::multiplies<>());
                        },
                        [&](const RegularizedHyperboloid&) { return minkowski_square(p.view()); },
                    },
                    kind);
}

/// Conformal factor implied by a field: sqrt of the HJ form, or 4 * (prod dS)^(1/4)
/// in the Berwald-Moore case.
inline double kappa_from_field(const SpaceSpec& spec, const FieldSpec& field, const Point& x) {
  require(!std::holds_alternative<RegularizedHyperboloid>(spec.kind), ErrorCode::InvalidArgument,
          "kappa_from_field is defined for the conformal families only");
  const Covector p = field_gradient(field, x);
  const double form = hamilton_jacobi_form(spec.kind, p);
  if (std::holds_alternative<BerwaldMooreConformal>(spec.kind)) {
    require(form > 0.0, ErrorCode::SpacelikeGradient, "gradient product is not positive");
    return 4.0 * std::pow(form, 0.25);
  }
  if (std::holds_alternative<PseudoEuclideanConformal>(spec.kind))
    require(form > 0.0, ErrorCode::SpacelikeGradient, "gradient is not timelike");
  else
    require(form > 0.0, ErrorCode::NonpositiveKappa, "gradient vanishes");
  return std::sqrt(form);
}

inline double kappa_at(const SpaceSpec& spec, const Point& x) {
  const double k = std::visit(detail::overloaded{
                                  [](const ConstantKappa& c) { return c.value; },
                                  [&](const KappaFromField& f) { return kappa_from_field(spec, *f.field, x); },
                                  [&](const KappaFunction& f) { return f.fn(x); },
                              },
                              spec.kappa_source);
  require(k > 0.0 && std::isfinite(k), ErrorCode::NonpositiveKappa, "conformal factor must be positive");
  return k;
}

namespace detail {

inline void check_rank(const SpaceSpec& spec, std::size_t got) {
  require(got == spec.dimension(), ErrorCode::InvalidArgument,
          "expected " + std::to_string(spec.dimension()) + " components, got " + std::to_string(got));
}

/// Minkowski interval of a closed-forward-cone vector; light-like gives 0.
inline double forward_interval(const Direction& dx) {
  require(dx[0] >= 0.0, ErrorCode::InadmissibleDirection, "dx^0 must be non-negative");
  double q = minkowski_square(dx.view());
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * dx[0] * dx[0];
  require(q >= -tol, ErrorCode::InadmissibleDirection, "direction outside the forward cone");
  return std::sqrt(std::max(q, 0.0));
}

inline double berwald_moore_root(const Direction& dx) {
  double prod = 1.0;
  for (double v : dx) {
    require(v > 0.0, ErrorCode::InadmissibleDirection, "Berwald-Moore directions need all components > 0");
    prod *= v;
  }
  return std::pow(prod, 0.25);
}

}  // namespace detail

/// Length element ds = L(dx; x). Homogeneous of degree 1 in dx.
inline double metric_function(const SpaceSpec& spec, const Point& x, const Direction& dx) {
  detail::check_rank(spec, dx.size());
  const double kappa = kappa_at(spec, x);
  return std::visit(detail::overloaded{
                        [&](const EuclideanConformal&) { return kappa * euclidean_norm(dx.view()); },
                        [&](const PseudoEuclideanConformal&) { return kappa * detail::forward_interval(dx); },
                        [&](const BerwaldMooreConformal&) { return kappa * detail::berwald_moore_root(dx); },
                        [&](const RegularizedHyperboloid& r) {
                          return kappa * (detail::forward_interval(dx) + r.q0 * dx[0]);
                        },
                    },
                    spec.kind);
}

/// p_i = dL/d(dx^i). Degree-0 homogeneous in dx.
inline Covector generalized_momenta(const SpaceSpec& spec, const Point& x, const Direction& dx) {
  detail::check_rank(spec, dx.size());
  const double kappa = kappa_at(spec, x);
  const std::size_t n = dx.size();
  Covector p(n);
  std::visit(detail::overloaded{
                 [&](const EuclideanConformal&) {
                   const double len = euclidean_norm(dx.view());
                   require(len > 0.0, ErrorCode::ZeroDirection, "zero direction");
                   for (std::size_t i = 0; i < n; ++i) p[i] = kappa * dx[i] / len;
                 },
                 [&](const PseudoEuclideanConformal&) {
                   const double s = detail::forward_interval(dx);
                   require(s > 0.0, ErrorCode::ZeroDirection, "light-like or zero direction has no momenta");
                   for (std::size_t i = 0; i < n; ++i) p[i] = minkowski_sign(i) * kappa * dx[i] / s;
                 },
                 [&](const BerwaldMooreConformal&) {
                   const double root = detail::berwald_moore_root(dx);
                   for (std::size_t i = 0; i < n; ++i) p[i] = 0.25 * kappa * root / dx[i];
                 },
                 [&](const RegularizedHyperboloid& r) {
                   const double s = detail::forward_interval(dx);
                   require(s > 0.0, ErrorCode::ZeroDirection, "light-like or zero direction has no momenta");
                   for (std::size_t i = 0; i < n; ++i) p[i] = minkowski_sign(i) * kappa * dx[i] / s;
                   p[0] += kappa * r.q0;
                 },
             },
             spec.kind);
  return p;
}

/// LHS - RHS of the figuratrix equation; zero iff p is a momentum of the space.
inline double tangential_indicatrix_residual(const SpaceSpec& spec, const Point& x, const Covector& p) {
  detail::check_rank(spec, p.size());
  const double kappa = kappa_at(spec, x);
  return std::visit(detail::overloaded{
                        [&](const EuclideanConformal&) { return dot(p.view(), p.view()) - kappa * kappa; },
                        [&](const PseudoEuclideanConformal&) { return minkowski_square(p.view()) - kappa * kappa; },
                        [&](const BerwaldMooreConformal&) {
                          const double k4 = kappa * kappa * kappa * kappa;
                          return p[0] * p[1] * p[2] * p[3] - k4 / 256.0;
                        },
                        [&](const RegularizedHyperboloid& r) {
                          Covector shifted = p;
                          shifted[0] -= kappa * r.q0;
                          return minkowski_square(shifted.view()) - kappa * kappa;
                        },
                    },
                    spec.kind);
}

/// L(xi; x) - 1; its zero set is the indicatrix.
inline double indicatrix_residual(const SpaceSpec& spec, const Point& x, const Direction& xi) {
  return metric_function(spec, x, xi) - 1.0;
}

/// Quadratic form of xi minus 1/kappa^2 (Euclidean and pseudo families).
inline double indicatrix_quadratic_residual(const SpaceSpec& spec, const Point& x, const Direction& xi) {
  detail::check_rank(spec, xi.size());
  const double kappa = kappa_at(spec, x);
  if (std::holds_alternative<EuclideanConformal>(spec.kind))
    return dot(xi.view(), xi.view()) - 1.0 / (kappa * kappa);
  if (std::holds_alternative<PseudoEuclideanConformal>(spec.kind))
    return minkowski_square(xi.view()) - 1.0 / (kappa * kappa);
  if (std::holds_alternative<BerwaldMooreConformal>(spec.kind))
    return xi[0] * xi[1] * xi[2] * xi[3] - 1.0 / std::pow(kappa, 4);
  fail(ErrorCode::InvalidArgument, "no quadratic indicatrix for the regularized hyperboloid");
}

/// HJ left side minus kappa^2 (kappa^4 / 4^4 for Berwald-Moore), with kappa
/// taken from spec.kappa_source.
inline double hamilton_jacobi_residual(const SpaceSpec& spec, const FieldSpec& field, const Point& x) {
  const Covector p = field_gradient(field, x);
  detail::check_rank(spec, p.size());
  const double kappa = kappa_at(spec, x);
  if (const auto* r = std::get_if<RegularizedHyperboloid>(&spec.kind)) {
    Covector shifted = p;
    shifted[0] -= kappa * r->q0;
    return minkowski_square(shifted.view()) - kappa * kappa;
  }
  const double lhs = hamilton_jacobi_form(spec.kind, p);
  if (std::holds_alternative<BerwaldMooreConformal>(spec.kind)) return lhs - std::pow(kappa, 4) / 256.0;
  return lhs - kappa * kappa;
}

}  // namespace finsler
