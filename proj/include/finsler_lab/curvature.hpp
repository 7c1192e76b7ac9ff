#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include "finsler_lab/core_geometry.hpp"
#include "finsler_lab/error.hpp"
#include "finsler_lab/types.hpp"

namespace finsler {

/// Spacetime dimension of the conformal curvature chain; the flat metric is
/// eta = diag(+1, -1, -1, -1).
inline constexpr std::size_t kSpacetimeDim = 4;

using Vector4 = std::array<double, kSpacetimeDim>;
using Tensor2 = std::array<Vector4, kSpacetimeDim>;
using Tensor3 = std::array<Tensor2, kSpacetimeDim>;
using Tensor4 = std::array<Tensor3, kSpacetimeDim>;

/// Value, gradient and Hessian of the conformal exponent a = ln(kappa^2) at a point.
struct ExponentJet {
  double a = 0.0;
  Vector4 da{};
  Tensor2 dda{};
};

/// The exponent a(x) = ln kappa^2(x) of g = kappa^2 eta together with a
/// derivative provider (closed form, or central differences of kappa).
class ConformalExponentField {
 public:
  using JetFn = std::function<ExponentJet(const Point&)>;

  ConformalExponentField(std::string name, JetFn jet) : name_(std::move(name)), jet_(std::move(jet)) {}

  /// a = const.
  static ConformalExponentField constant(double a0) {
    return {"constant", [a0](const Point&) { return ExponentJet{a0, {}, {}}; }};
  }

  /// kappa = exp(beta x^0), a = 2 beta x^0.
  static ConformalExponentField exponential_time(double beta) {
    return {"exponential_time", [beta](const Point& x) {
              ExponentJet j;
              j.a = 2.0 * beta * x[0];
              j.da[0] = 2.0 * beta;
              return j;
            }};
  }

  /// kappa = |C| / s, s the Minkowski interval; a = ln(C^2 / s^2).
  static ConformalExponentField interval_log(double C) {
    return {"interval_log", [C](const Point& x) {
              const double s2 = minkowski_square(x.view());
              require(x[0] > 0.0 && s2 > 0.0, ErrorCode::DerivativeUnavailable, "point outside the forward cone");
              ExponentJet j;
              j.a = std::log(C * C / s2);
              for (std::size_t i = 0; i < kSpacetimeDim; ++i) {
                const double xi = minkowski_sign(i) * x[i];
                j.da[i] = -2.0 * xi / s2;
                for (std::size_t k = 0; k < kSpacetimeDim; ++k) {
                  const double xk = minkowski_sign(k) * x[k];
                  j.dda[i][k] = (i == k ? -2.0 * minkowski_sign(i) / s2 : 0.0) + 4.0 * xi * xk / (s2 * s2);
                }
              }
              return j;
            }};
  }

  /// kappa = |C| / rho, rho the Euclidean norm of all four coordinates.
  static ConformalExponentField radial_log(double C) {
    return {"radial_log", [C](const Point& x) {
              const double r2 = dot(x.view(), x.view());
              require(r2 > 0.0, ErrorCode::DerivativeUnavailable, "radial factor undefined at the origin");
              ExponentJet j;
              j.a = std::log(C * C / r2);
              for (std::size_t i = 0; i < kSpacetimeDim; ++i) {
                j.da[i] = -2.0 * x[i] / r2;
                for (std::size_t k = 0; k < kSpacetimeDim; ++k)
                  j.dda[i][k] = (i == k ? -2.0 / r2 : 0.0) + 4.0 * x[i] * x[k] / (r2 * r2);
              }
              return j;
            }};
  }

  /// Central differences of a = ln kappa^2 with step rel_step * (1 + |x^i|).
  static ConformalExponentField from_kappa(std::function<double(const Point&)> kappa, double rel_step = 1e-4) {
    return {"finite_difference", [kappa = std::move(kappa), rel_step](const Point& x) {
              auto a = [&](const Point& p) {
                const double k = kappa(p);
                require(k > 0.0 && std::isfinite(k), ErrorCode::DerivativeUnavailable, "kappa must be positive");
                return std::log(k * k);
              };
              ExponentJet j;
              j.a = a(x);
              Vector4 h;
              for (std::size_t i = 0; i < kSpacetimeDim; ++i) h[i] = rel_step * (1.0 + std::abs(x[i]));
              auto shifted = [&](std::size_t i, double si, std::size_t k, double sk) {
                Point p = x;
                p[i] += si * h[i];
                p[k] += sk * h[k];
                return a(p);
              };
              for (std::size_t i = 0; i < kSpacetimeDim; ++i) {
                Point p = x, m = x;
                p[i] += h[i];
                m[i] -= h[i];
                const double ap = a(p), am = a(m);
                j.da[i] = (ap - am) / (2.0 * h[i]);
                j.dda[i][i] = (ap - 2.0 * j.a + am) / (h[i] * h[i]);
                for (std::size_t k = 0; k < i; ++k) {
                  const double v = (shifted(i, 1, k, 1) - shifted(i, 1, k, -1) - shifted(i, -1, k, 1) +
                                    shifted(i, -1, k, -1)) /
                                   (4.0 * h[i] * h[k]);
                  j.dda[i][k] = j.dda[k][i] = v;
                }
              }
              return j;
            }};
  }

  const std::string& name() const noexcept { return name_; }

  ExponentJet jet(const Point& x) const {
    require(x.size() == kSpacetimeDim, ErrorCode::InvalidArgument, "curvature points have 4 coordinates");
    require(bool(jet_), ErrorCode::DerivativeUnavailable, "no derivative provider");
    ExponentJet j = jet_(x);
    bool finite = std::isfinite(j.a);
    for (std::size_t i = 0; i < kSpacetimeDim; ++i) {
      finite = finite && std::isfinite(j.da[i]);
      for (std::size_t k = 0; k < kSpacetimeDim; ++k) finite = finite && std::isfinite(j.dda[i][k]);
    }
    require(finite, ErrorCode::DerivativeUnavailable, "non-finite derivative of the conformal exponent");
    return j;
  }

  double kappa(const Point& x) const { return std::exp(0.5 * jet(x).a); }

 private:
  std::string name_;
  JetFn jet_;
};

namespace detail {

inline double eta(std::size_t i, std::size_t k) { return i == k ? minkowski_sign(i) : 0.0; }
inline double kron(std::size_t i, std::size_t k) { return i == k ? 1.0 : 0.0; }

/// eta^{is} v_s (eta is its own inverse).
inline Vector4 raise(const Vector4& v) {
  Vector4 out;
  for (std::size_t i = 0; i < kSpacetimeDim; ++i) out[i] = minkowski_sign(i) * v[i];
  return out;
}

inline double eta_contract(const Vector4& u, const Vector4& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < kSpacetimeDim; ++i) s += minkowski_sign(i) * u[i] * v[i];
  return s;
}

inline double eta_trace(const Tensor2& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < kSpacetimeDim; ++i) s += minkowski_sign(i) * t[i][i];
  return s;
}

}  // namespace detail

/// Gamma^i_kl = (a_l d^i_k + a_k d^i_l - eta^is a_s eta_kl) / 2.
inline Tensor3 christoffel(const ConformalExponentField& field, const Point& x) {
  using namespace detail;
  const ExponentJet j = field.jet(x);
  const Vector4 up = raise(j.da);
  Tensor3 g{};
  for (std::size_t i = 0; i < kSpacetimeDim; ++i)
    for (std::size_t k = 0; k < kSpacetimeDim; ++k)
      for (std::size_t l = 0; l < kSpacetimeDim; ++l)
        g[i][k][l] = 0.5 * (j.da[l] * kron(i, k) + j.da[k] * kron(i, l) - up[i] * eta(k, l));
  return g;
}

/// R^i_klm of g = e^a eta, term by term as the closed-form conformal
/// expression: a second-derivative bracket over 2 and a quadratic bracket over 4.
inline Tensor4 riemann(const ConformalExponentField& field, const Point& x) {
  using namespace detail;
  const ExponentJet j = field.jet(x);
  const Vector4& d = j.da;
  const Tensor2& dd = j.dda;
  const Vector4 up = raise(d);
  Tensor2 dd_up{};  // eta^is a_{ls}, indexed [l][i]
  for (std::size_t l = 0; l < kSpacetimeDim; ++l) dd_up[l] = raise(dd[l]);
  const double sq = eta_contract(d, d);

  Tensor4 r{};
  for (std::size_t i = 0; i < kSpacetimeDim; ++i)
    for (std::size_t k = 0; k < kSpacetimeDim; ++k)
      for (std::size_t l = 0; l < kSpacetimeDim; ++l)
        for (std::size_t m = 0; m < kSpacetimeDim; ++m) {
          const double second = dd[l][k] * kron(i, m) - dd[k][m] * kron(i, l) - dd_up[l][i] * eta(k, m) +
                                dd_up[m][i] * eta(k, l);
          const double quad = d[m] * d[k] * kron(i, l) - d[l] * d[k] * kron(i, m) - sq * kron(i, l) * eta(k, m) +
                              d[l] * eta(k, m) * up[i] + sq * kron(i, m) * eta(k, l) - d[m] * eta(k, l) * up[i];
          r[i][k][l][m] = 0.5 * second + 0.25 * quad;
        }
  return r;
}

/// R_km = (-2 a_km - (box a) eta_km + a_k a_m - (da.da) eta_km) / 2, the
/// contraction R^l_klm.
inline Tensor2 ricci(const ConformalExponentField& field, const Point& x) {
  using namespace detail;
  const ExponentJet j = field.jet(x);
  const double box = eta_trace(j.dda);
  const double sq = eta_contract(j.da, j.da);
  Tensor2 r{};
  for (std::size_t k = 0; k < kSpacetimeDim; ++k)
    for (std::size_t m = 0; m < kSpacetimeDim; ++m)
      r[k][m] = 0.5 * (-2.0 * j.dda[k][m] - box * eta(k, m) + j.da[k] * j.da[m] - sq * eta(k, m));
  return r;
}

/// R = g^km R_km = kappa^-2 eta^km R_km.
inline double scalar_curvature(const ConformalExponentField& field, const Point& x) {
  const double kappa2 = std::exp(field.jet(x).a);
  return detail::eta_trace(ricci(field, x)) / kappa2;
}

/// The explicit closed form -3 kappa^-2 (2 box a + da.da) that is commonly
/// quoted for R. It equals twice the trace of R_km; kept for the diagnostic.
inline double scalar_curvature_quoted(const ConformalExponentField& field, const Point& x) {
  const ExponentJet j = field.jet(x);
  return -3.0 * std::exp(-j.a) * (2.0 * detail::eta_trace(j.dda) + detail::eta_contract(j.da, j.da));
}

struct ScalarCurvatureDiagnostic {
  double traced = 0.0;  // kappa^-2 eta^km R_km
  double quoted = 0.0;  // explicit closed form
  double ratio = 0.0;   // quoted / traced
};

inline ScalarCurvatureDiagnostic scalar_curvature_diagnostic(const ConformalExponentField& field, const Point& x) {
  ScalarCurvatureDiagnostic d;
  d.traced = scalar_curvature(field, x);
  d.quoted = scalar_curvature_quoted(field, x);
  d.ratio = d.quoted / d.traced;
  return d;
}

struct StressEnergy {
  Tensor2 T{};      // T_km
  double trace = 0.0;  // kappa^-2 eta^km T_km
};

/// T_km = factor (R_km - kappa^2 eta_km R / 2), factor = c^4 / (8 pi k).
inline StressEnergy stress_energy(const ConformalExponentField& field, const Point& x, double factor = 1.0) {
  const double kappa2 = std::exp(field.jet(x).a);
  const Tensor2 ric = ricci(field, x);
  const double R = detail::eta_trace(ric) / kappa2;
  StressEnergy out;
  for (std::size_t k = 0; k < kSpacetimeDim; ++k)
    for (std::size_t m = 0; m < kSpacetimeDim; ++m)
      out.T[k][m] = factor * (ric[k][m] - 0.5 * kappa2 * detail::eta(k, m) * R);
  out.trace = detail::eta_trace(out.T) / kappa2;
  return out;
}

/// Canonical tensor of L = Q^2, Q = eta^rs S_r S_s:
/// T^k_m = 4 eta^ks S_s S_m Q - delta^k_m Q^2. Indexed [k][m].
inline Tensor2 full_stress_energy(const Vector4& dS) {
  const double Q = detail::eta_contract(dS, dS);
  const Vector4 up = detail::raise(dS);
  Tensor2 t{};
  for (std::size_t k = 0; k < kSpacetimeDim; ++k)
    for (std::size_t m = 0; m < kSpacetimeDim; ++m) t[k][m] = 4.0 * up[k] * dS[m] * Q - detail::kron(k, m) * Q * Q;
  return t;
}

inline Tensor2 full_stress_energy(const FieldSpec& S, const Point& x) {
  const Covector g = field_gradient(S, x);
  require(g.size() == kSpacetimeDim, ErrorCode::DerivativeUnavailable, "need a 4-gradient");
  return full_stress_energy(Vector4{g[0], g[1], g[2], g[3]});
}

inline double mixed_trace(const Tensor2& t) {
  double s = 0.0;
  for (std::size_t k = 0; k < kSpacetimeDim; ++k) s += t[k][k];
  return s;
}

/// Every tensor of the chain at one point.
struct TensorBundle {
  Point x;
  double kappa = 0.0;
  double coupling = 1.0;
  Tensor3 christoffel{};
  Tensor4 riemann{};
  Tensor2 ricci{};
  double scalar = 0.0;
  Tensor2 stress{};
  double stress_trace = 0.0;
};

inline TensorBundle curvature_bundle(const ConformalExponentField& field, const Point& x, double coupling = 1.0) {
  TensorBundle b;
  b.x = x;
  b.kappa = field.kappa(x);
  b.coupling = coupling;
  b.christoffel = christoffel(field, x);
  b.riemann = riemann(field, x);
  b.ricci = ricci(field, x);
  b.scalar = scalar_curvature(field, x);
  const StressEnergy se = stress_energy(field, x, coupling);
  b.stress = se.T;
  b.stress_trace = se.trace;
  return b;
}

// ---------------------------------------------------------------------------
// Independent route: textbook curvature of an arbitrary sampled metric
// ---------------------------------------------------------------------------

using MetricFn = std::function<Tensor2(const Point&)>;

namespace detail {

inline Tensor2 inverse4(const Tensor2& g) {
  Matrix m(kSpacetimeDim), inv;
  for (std::size_t i = 0; i < kSpacetimeDim; ++i)
    for (std::size_t k = 0; k < kSpacetimeDim; ++k) m(i, k) = g[i][k];
  require(invert(m, inv), ErrorCode::SingularMetric, "metric is not invertible");
  Tensor2 out{};
  for (std::size_t i = 0; i < kSpacetimeDim; ++i)
    for (std::size_t k = 0; k < kSpacetimeDim; ++k) out[i][k] = inv(i, k);
  return out;
}

/// Gamma^i_kl at y from central differences of g with step h.
inline Tensor3 oracle_christoffel(const MetricFn& metric, const Point& y, double h) {
  std::array<Tensor2, kSpacetimeDim> dg{};  // dg[l][s][k] = d_l g_sk
  for (std::size_t l = 0; l < kSpacetimeDim; ++l) {
    Point p = y, m = y;
    p[l] += h;
    m[l] -= h;
    const Tensor2 gp = metric(p), gm = metric(m);
    for (std::size_t s = 0; s < kSpacetimeDim; ++s)
      for (std::size_t k = 0; k < kSpacetimeDim; ++k) dg[l][s][k] = (gp[s][k] - gm[s][k]) / (2.0 * h);
  }
  const Tensor2 ginv = inverse4(metric(y));
  Tensor3 gam{};
  for (std::size_t i = 0; i < kSpacetimeDim; ++i)
    for (std::size_t k = 0; k < kSpacetimeDim; ++k)
      for (std::size_t l = 0; l < kSpacetimeDim; ++l) {
        double v = 0.0;
        for (std::size_t s = 0; s < kSpacetimeDim; ++s) v += ginv[i][s] * (dg[l][s][k] + dg[k][s][l] - dg[s][k][l]);
        gam[i][k][l] = 0.5 * v;
      }
  return gam;
}

}  // namespace detail

/// Curvature of g(x) by finite differences on the lattice x + h * (integer
/// offsets), with R^i_klm = d_l G^i_km - d_m G^i_kl + G^i_ln G^n_km - G^i_mn G^n_kl
/// and R_km = R^l_klm. Second order in h. The stress tensor uses
/// T_km = coupling (R_km - g_km R / 2). `kappa` is filled with sqrt|g_00|.
inline TensorBundle generic_oracle_curvature(const MetricFn& metric, const Point& x, double h,
                                             double coupling = 1.0) {
  require(x.size() == kSpacetimeDim, ErrorCode::InvalidArgument, "curvature points have 4 coordinates");
  require(h > 0.0, ErrorCode::InvalidArgument, "lattice spacing must be positive");
  const Tensor2 g = metric(x);
  const Tensor2 ginv = detail::inverse4(g);

  TensorBundle b;
  b.x = x;
  b.kappa = std::sqrt(std::abs(g[0][0]));
  b.coupling = coupling;
  b.christoffel = detail::oracle_christoffel(metric, x, h);

  std::array<Tensor3, kSpacetimeDim> dgam{};  // dgam[l] = d_l Gamma
  for (std::size_t l = 0; l < kSpacetimeDim; ++l) {
    Point p = x, m = x;
    p[l] += h;
    m[l] -= h;
    const Tensor3 gp = detail::oracle_christoffel(metric, p, h);
    const Tensor3 gm = detail::oracle_christoffel(metric, m, h);
    for (std::size_t i = 0; i < kSpacetimeDim; ++i)
      for (std::size_t k = 0; k < kSpacetimeDim; ++k)
        for (std::size_t q = 0; q < kSpacetimeDim; ++q) dgam[l][i][k][q] = (gp[i][k][q] - gm[i][k][q]) / (2.0 * h);
  }

  const Tensor3& G = b.christoffel;
  for (std::size_t i = 0; i < kSpacetimeDim; ++i)
    for (std::size_t k = 0; k < kSpacetimeDim; ++k)
      for (std::size_t l = 0; l < kSpacetimeDim; ++l)
        for (std::size_t m = 0; m < kSpacetimeDim; ++m) {
          double v = dgam[l][i][k][m] - dgam[m][i][k][l];
          for (std::size_t n = 0; n < kSpacetimeDim; ++n) v += G[i][l][n] * G[n][k][m] - G[i][m][n] * G[n][k][l];
          b.riemann[i][k][l][m] = v;
        }

  for (std::size_t k = 0; k < kSpacetimeDim; ++k)
    for (std::size_t m = 0; m < kSpacetimeDim; ++m) {
      double v = 0.0;
      for (std::size_t l = 0; l < kSpacetimeDim; ++l) v += b.riemann[l][k][l][m];
      b.ricci[k][m] = v;
    }

  double R = 0.0;
  for (std::size_t k = 0; k < kSpacetimeDim; ++k)
    for (std::size_t m = 0; m < kSpacetimeDim; ++m) R += ginv[k][m] * b.ricci[k][m];
  b.scalar = R;

  for (std::size_t k = 0; k < kSpacetimeDim; ++k)
    for (std::size_t m = 0; m < kSpacetimeDim; ++m) b.stress[k][m] = coupling * (b.ricci[k][m] - 0.5 * g[k][m] * R);
  double T = 0.0;
  for (std::size_t k = 0; k < kSpacetimeDim; ++k)
    for (std::size_t m = 0; m < kSpacetimeDim; ++m) T += ginv[k][m] * b.stress[k][m];
  b.stress_trace = T;
  return b;
}

/// g = kappa^2 eta for a conformal exponent field, as a metric callable.
inline MetricFn conformal_metric(const ConformalExponentField& field) {
  return [field](const Point& x) {
    const double k2 = std::exp(field.jet(x).a);
    Tensor2 g{};
    for (std::size_t i = 0; i < kSpacetimeDim; ++i) g[i][i] = k2 * minkowski_sign(i);
    return g;
  };
}

}  // namespace finsler
