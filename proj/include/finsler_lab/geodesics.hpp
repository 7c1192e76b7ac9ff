#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "finsler_lab/core_geometry.hpp"
#include "finsler_lab/cosmology.hpp"
#include "finsler_lab/error.hpp"
#include "finsler_lab/types.hpp"

namespace finsler {

/// How the scalar lambda(x) in the congruence flow is chosen.
struct LambdaChoice {
  enum Kind { unit, reducing_choice, custom };
  Kind kind = reducing_choice;
  std::function<double(const Point&)> fn;  // used when kind == custom

  static LambdaChoice one() { return {unit, {}}; }
  static LambdaChoice reducing() { return {reducing_choice, {}}; }
  static LambdaChoice from(std::function<double(const Point&)> f) { return {custom, std::move(f)}; }
};

struct FlowSpec {
  SpaceSpec space;
  FieldSpec field;
  LambdaChoice lambda = LambdaChoice::reducing();
};

/// The lambda that reduces the flow of a closed-form field to dx/dtau = x,
/// signed so that x^0 increases:
///   RadialLog        r^2 / C
///   IntervalLog      s^2 / C
///   BerwaldMooreLog  64 xi1 xi2 xi3 xi4 / S0^3
///   CosmoExp         -1 / (gamma S)   (gives dx^0/dtau = 1 instead)
inline double reducing_lambda(const FieldSpec& field, const Point& x) {
  return std::visit(
      detail::overloaded{
          [&](const RadialLog& f) { return dot(x.view(), x.view()) / f.C; },
          [&](const IntervalLog& f) { return minkowski_square(x.view()) / f.C; },
          [&](const BerwaldMooreLog& f) {
            double p = 1.0;
            for (std::size_t i = 0; i < x.size(); ++i) p *= x[i];
            return 64.0 * p / (f.S0 * f.S0 * f.S0);
          },
          [&](const CosmoExp& f) { return -1.0 / (f.gamma * field_value(field, x)); },
          [&](const auto&) -> double {
            fail(ErrorCode::InvalidArgument, "no reference lambda for this field family");
          },
      },
      field);
}

inline double flow_lambda(const FlowSpec& flow, const Point& x) {
  double l = 1.0;
  switch (flow.lambda.kind) {
    case LambdaChoice::unit:
      break;
    case LambdaChoice::reducing_choice:
      l = reducing_lambda(flow.field, x);
      break;
    case LambdaChoice::custom:
      require(bool(flow.lambda.fn), ErrorCode::InvalidArgument, "custom lambda without a function");
      l = flow.lambda.fn(x);
      break;
  }
  require(l != 0.0 && std::isfinite(l), ErrorCode::ZeroLambda, "lambda must be finite and nonzero");
  return l;
}

/// dx/dtau of the normal congruence: lambda grad S in Euclidean spaces,
/// lambda eta^ik d_k S in pseudo-Euclidean ones, and
/// lambda (prod_k d_k S) / d_i S in the Berwald-Moore space.
inline Direction congruence_velocity(const FlowSpec& flow, const Point& x) {
  detail::check_rank(flow.space, x.size());
  const Covector g = field_gradient(flow.field, x);
  const double lam = flow_lambda(flow, x);
  Direction v(x.size());
  std::visit(detail::overloaded{
                 [&](const EuclideanConformal&) {
                   for (std::size_t i = 0; i < x.size(); ++i) v[i] = lam * g[i];
                 },
                 [&](const PseudoEuclideanConformal&) {
                   for (std::size_t i = 0; i < x.size(); ++i) v[i] = lam * minkowski_sign(i) * g[i];
                 },
                 [&](const BerwaldMooreConformal&) {
                   double prod = 1.0;
                   for (std::size_t i = 0; i < 4; ++i) prod *= g[i];
                   for (std::size_t i = 0; i < 4; ++i) {
                     require(g[i] != 0.0, ErrorCode::DerivativeUnavailable, "vanishing gradient component");
                     v[i] = lam * prod / g[i];
                   }
                 },
                 [&](const RegularizedHyperboloid&) {
                   fail(ErrorCode::InvalidArgument, "no congruence flow defined for the regularized space");
                 },
             },
             flow.space.kind);
  return v;
}

struct Trajectory {
  std::vector<double> tau;
  std::vector<Point> x;
  /// True when x^0 increased along the whole trajectory.
  bool future_directed = true;
  std::size_t rejected = 0;

  std::size_t size() const noexcept { return tau.size(); }
};

namespace detail {

using Vec = std::vector<double>;

inline Vec axpy(const Vec& y, double a, const Vec& k) {
  Vec out = y;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += a * k[i];
  return out;
}

template <class F>
Vec rk4_step(F& f, double t, const Vec& y, double h) {
  const Vec k1 = f(t, y);
  const Vec k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
  const Vec k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
  const Vec k4 = f(t + h, axpy(y, h, k3));
  Vec out = y;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

struct Rk4Run {
  std::vector<double> t;
  std::vector<Vec> y;
  std::size_t rejected = 0;
};

/// Classical RK4 with step-doubling error control (one h step against two
/// h/2 steps, Richardson-corrected). Errors are mixed abs/rel with `tol`.
template <class F>
Rk4Run rk4_adaptive(F&& f, double t0, Vec y0, double t1, double tol, std::size_t max_steps = 1000000) {
  require(t1 > t0, ErrorCode::InvalidArgument, "integration span must be increasing");
  require(tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  Rk4Run run;
  run.t.push_back(t0);
  run.y.push_back(y0);
  double t = t0;
  Vec y = std::move(y0);
  double h = std::min(0.01, t1 - t0);
  for (std::size_t step = 0; t < t1; ++step) {
    require(step < max_steps, ErrorCode::ToleranceNotMet, "step budget exhausted");
    require(h > 1e-14 * std::max(1.0, std::abs(t)), ErrorCode::ToleranceNotMet, "step size underflow");
    const bool last = t + h >= t1;
    if (last) h = t1 - t;
    const Vec big = rk4_step(f, t, y, h);
    const Vec half = rk4_step(f, t, y, 0.5 * h);
    const Vec fine = rk4_step(f, t + 0.5 * h, half, 0.5 * h);
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(fine[i])));
      err = std::max(err, std::abs(fine[i] - big[i]) / 15.0 / sc);
    }
    if (!std::isfinite(err) || err > 1.0) {
      h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      ++run.rejected;
      continue;
    }
    Vec next = fine;
    for (std::size_t i = 0; i < y.size(); ++i) next[i] += (fine[i] - big[i]) / 15.0;
    t = last ? t1 : t + h;
    y = std::move(next);
    run.t.push_back(t);
    run.y.push_back(y);
    h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
  }
  return run;
}

/// Domain errors raised while evaluating the flow become LeftDomain.
template <class F>
auto guard_domain(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::InadmissibleDirection:
      case ErrorCode::NonpositiveRadius:
      case ErrorCode::BoundaryPoint:
      case ErrorCode::OutOfRange:
      case ErrorCode::NegativeBase:
      case ErrorCode::ZeroLambda:
        fail(ErrorCode::LeftDomain, std::string("trajectory left the domain: ") + e.what());
      default:
        throw;
    }
  }
}

inline Trajectory to_trajectory(const Rk4Run& run, std::size_t time_index) {
  Trajectory tr;
  tr.tau = run.t;
  tr.rejected = run.rejected;
  tr.x.reserve(run.y.size());
  for (const auto& y : run.y) tr.x.emplace_back(y);
  for (std::size_t k = 1; k < tr.x.size(); ++k)
    if (tr.x[k][time_index] <= tr.x[k - 1][time_index]) tr.future_directed = false;
  return tr;
}

}  // namespace detail

/// Integrates dx/dtau = congruence_velocity over tau in [tau0, tau1].
inline Trajectory integrate_flow(const FlowSpec& flow, const Point& x_start, double tau0, double tau1,
                                 double tol = 1e-11) {
  auto rhs = [&](double, const detail::Vec& y) {
    return detail::guard_domain([&] { return congruence_velocity(flow, Point(y)).values(); });
  };
  return detail::to_trajectory(detail::rk4_adaptive(rhs, tau0, x_start.values(), tau1, tol), 0);
}

/// max_k |x_k - (x_k . d) d| / |x_k| with d the unit direction of the last
/// sample. Samples at the origin are skipped.
inline double straightness_deviation(const Trajectory& traj) {
  require(traj.size() >= 3, ErrorCode::TooFewSamples, "need at least 3 samples");
  const Point& ref = traj.x.back();
  const double rn = euclidean_norm(ref.view());
  require(rn > 0.0, ErrorCode::InvalidArgument, "last sample at the origin");
  double dev = 0.0;
  for (const Point& p : traj.x) {
    const double pn = euclidean_norm(p.view());
    if (pn == 0.0) continue;
    const double along = dot(p.view(), ref.view()) / rn;
    double perp2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = p[i] - along * ref[i] / rn;
      perp2 += d * d;
    }
    dev = std::max(dev, std::sqrt(perp2) / pn);
  }
  return dev;
}

/// C^mu = x^mu / x^0 at a point.
inline std::vector<double> ray_constants(const Point& x) {
  require(x[0] != 0.0, ErrorCode::InvalidArgument, "x^0 must be nonzero");
  std::vector<double> c;
  for (std::size_t i = 1; i < x.size(); ++i) c.push_back(x[i] / x[0]);
  return c;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

/// Least-squares fit s = slope x^0 + intercept of the Minkowski interval along
/// a trajectory.
inline LinearFit interval_fit(const Trajectory& traj) {
  require(traj.size() >= 3, ErrorCode::TooFewSamples, "need at least 3 samples");
  const double n = double(traj.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> s(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double q = minkowski_square(traj.x[k].view());
    require(q >= 0.0, ErrorCode::LeftDomain, "sample outside the light cone");
    s[k] = std::sqrt(q);
    const double t = traj.x[k][0];
    sx += t;
    sy += s[k];
    sxx += t * t;
    sxy += t * s[k];
  }
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  for (std::size_t k = 0; k < traj.size(); ++k)
    fit.max_residual = std::max(fit.max_residual, std::abs(s[k] - fit.slope * traj.x[k][0] - fit.intercept));
  return fit;
}

/// max over samples and components of |x^i / T - x_0^i / T_0|, where
/// T = sum_i x^i (the Berwald-Moore time variable).
inline double time_fraction_drift(const Trajectory& traj) {
  require(traj.size() >= 1, ErrorCode::TooFewSamples, "empty trajectory");
  auto sum = [](const Point& p) {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
  };
  const Point& a = traj.x.front();
  const double t0 = sum(a);
  double drift = 0.0;
  for (const Point& p : traj.x) {
    const double t = sum(p);
    for (std::size_t i = 0; i < p.size(); ++i) drift = std::max(drift, std::abs(p[i] / t - a[i] / t0));
  }
  return drift;
}

/// max over samples of |x^mu / r - x_0^mu / r_0| for the spatial components.
inline double spatial_direction_drift(const Trajectory& traj) {
  require(traj.size() >= 1, ErrorCode::TooFewSamples, "empty trajectory");
  const Point& a = traj.x.front();
  const double ra = detail::spatial_radius(a);
  require(ra > 0.0, ErrorCode::NonpositiveRadius, "start at r = 0 has no direction");
  double drift = 0.0;
  for (const Point& p : traj.x) {
    const double r = detail::spatial_radius(p);
    for (std::size_t i = 1; i < p.size(); ++i) drift = std::max(drift, std::abs(p[i] / r - a[i] / ra));
  }
  return drift;
}

/// Body motion in the cosmological field: dx^mu/dx^0 = phi(gamma r) x^mu / r
/// with x^0 as the parameter. Samples are 4-points (x^0, x^1, x^2, x^3) and
/// tau = x^0.
inline Trajectory cosmo_trajectory(const CosmoSolution& sol, const Point& x_start, double x0_end,
                                   double tol = 1e-12) {
  require(x_start.size() == 4, ErrorCode::InvalidArgument, "cosmology points have 4 coordinates");
  const double gamma = sol.parameters().gamma;
  const double r0 = detail::spatial_radius(x_start);
  require(gamma * r0 <= sol.xi_end(), ErrorCode::LeftDomain, "start outside the resolved range");
  auto rhs = [&](double, const detail::Vec& y) {
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    detail::Vec v(3, 0.0);
    if (r == 0.0) return v;
    require(gamma * r <= sol.xi_end(), ErrorCode::LeftDomain, "trajectory left the resolved range");
    const double k = sol.phi(gamma * r) / r;
    for (std::size_t i = 0; i < 3; ++i) v[i] = k * y[i];
    return v;
  };
  const detail::Rk4Run run =
      detail::rk4_adaptive(rhs, x_start[0], {x_start[1], x_start[2], x_start[3]}, x0_end, tol);
  Trajectory tr;
  tr.tau = run.t;
  tr.rejected = run.rejected;
  for (std::size_t k = 0; k < run.t.size(); ++k) tr.x.push_back(Point{run.t[k], run.y[k][0], run.y[k][1], run.y[k][2]});
  return tr;
}

}  // namespace finsler
