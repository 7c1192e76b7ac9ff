#pragma once

// The acceptance checks, criterion by criterion. Both the `verify` CLI
// subcommand and the acceptance test binary run these.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "finsler_lab/core_geometry.hpp"
#include "finsler_lab/cosmology.hpp"
#include "finsler_lab/curvature.hpp"
#include "finsler_lab/field_theory.hpp"
#include "finsler_lab/geodesics.hpp"
#include "finsler_lab/indicatrix_volume.hpp"
#include "finsler_lab/series.hpp"
#include "finsler_lab/verify/oracles.hpp"

namespace finsler::verify {

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double reference = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  /// exact | oracle | reference | identity | companion
  std::string provenance;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

struct SuiteOptions {
  std::uint64_t seed = 42;
  std::size_t mc_samples = 10'000'000;
};

namespace detail {

inline Check compare(std::string name, double measured, double reference, double tol, std::string prov) {
  Check c{std::move(name), false, measured, reference, std::abs(measured - reference), tol, std::move(prov)};
  c.pass = std::isfinite(c.error) && c.error <= tol;
  return c;
}

/// Passes when `value <= tol`.
inline Check bound(std::string name, double value, double tol, std::string prov) {
  Check c{std::move(name), false, value, 0.0, value, tol, std::move(prov)};
  c.pass = std::isfinite(value) && value <= tol;
  return c;
}

/// Passes when `value >= floor`.
inline Check at_least(std::string name, double value, double floor, std::string prov) {
  Check c{std::move(name), false, value, floor, 0.0, floor, std::move(prov)};
  c.pass = std::isfinite(value) && value >= floor;
  return c;
}

inline Check flag(std::string name, bool ok, std::string prov) {
  return {std::move(name), ok, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : 1.0, 0.0, std::move(prov)};
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CriterionReport series_coefficients_check(const SuiteOptions&) {
  CriterionReport r{1, "series coefficients", {}};
  const SeriesExpansion s = phi_series(3);
  const Rational want[3] = {Rational(1), Rational(0), Rational(-1, 5)};
  for (std::size_t k = 0; k < 3; ++k)
    r.checks.push_back(detail::flag("a" + std::to_string(k + 1) + " == " + want[k].str(), s.coefficients[k] == want[k],
                                    "reference"));
  const auto ref = oracle::series_coefficients(11);
  const SeriesExpansion s11 = phi_series(11);
  bool same = true;
  for (std::size_t k = 0; k < 11; ++k) same = same && s11.coefficients[k] == ref[k];
  r.checks.push_back(detail::flag("order 11 matches trial-substitution oracle", same, "oracle"));
  return r;
}

inline CriterionReport hubble_check(const SuiteOptions&) {
  CriterionReport r{2, "hubble law", {}};
  const CosmoSolution sol = integrate_phi(0.5, 1e-10);
  const double H0 = sol.parameters().H0(), c = sol.parameters().c;
  const double r01 = 0.1 * c / H0;
  const double ratio = hubble(sol, r01) / H0;
  r.checks.push_back(detail::compare("integrated H/H0 at xi=0.1 vs 0.998", ratio, 0.998, 1e-6, "reference"));
  r.checks.push_back(
      detail::compare("quadratic law H/H0 at xi=0.1 vs 0.998", hubble_quadratic(H0, c, r01) / H0, 0.998, 1e-12, "reference"));
  r.checks.push_back(detail::flag("H(0) == H0", hubble(sol, 0.0) == H0, "reference"));
  // Fifth-order truncation of the exact series: 1 - xi^2/5 + 6/35 xi^4.
  const auto a = oracle::series_coefficients(5);
  const double series5 = 1.0 + a[2].convert_to<double>() * 0.01 + a[4].convert_to<double>() * 1e-4;
  r.checks.push_back(detail::compare("integrated H/H0 at xi=0.1 vs 5th-order series", ratio, series5, 1e-6, "companion"));
  return r;
}

inline CriterionReport singularity_check(const SuiteOptions&) {
  CriterionReport r{3, "singular point", {}};
  StepControl pi;  // default PI controller
  StepControl plain;
  plain.beta = 0.0;
  plain.safety = 0.8;
  const CosmoSolution a = integrate_phi(10.0, 1e-10, pi);
  const CosmoSolution b = integrate_phi(10.0, 1e-10, plain);
  r.checks.push_back(detail::flag("halts at a singular point (PI control)", a.singular_xi().has_value(), "identity"));
  r.checks.push_back(detail::flag("halts at a singular point (I control)", b.singular_xi().has_value(), "identity"));
  if (!a.singular_xi() || !b.singular_xi()) return r;
  const double inv = 1.0 / std::sqrt(3.0);
  r.checks.push_back(detail::compare("phi(xi*) vs 1/sqrt(3)", a.phi(*a.singular_xi()), inv, 1e-6, "reference"));
  r.checks.push_back(detail::compare("xi* across step controls", *a.singular_xi(), *b.singular_xi(), 1e-6, "identity"));
  r.checks.push_back(detail::bound("scaled field residual", a.residual_norm(), 1e-8, "identity"));
  return r;
}

namespace detail {

/// Observed orders log2(e_k / e_{k+1}) of a refinement sequence.
inline double min_order(const std::vector<double>& errs) {
  double m = INFINITY;
  for (std::size_t k = 0; k + 1 < errs.size(); ++k) m = std::min(m, std::log2(errs[k] / errs[k + 1]));
  return m;
}

inline GridSampled cube_grid(const FieldSpec& f, std::size_t rank, double lo, double hi, std::size_t n,
                             double lo0 = NAN, double hi0 = NAN) {
  std::vector<double> origin(rank, lo), spacing(rank, (hi - lo) / double(n - 1));
  if (!std::isnan(lo0)) {
    origin[0] = lo0;
    spacing[0] = (hi0 - lo0) / double(n - 1);
  }
  return sample_field([&](const Point& x) { return field_value(f, x); }, origin, spacing,
                      std::vector<std::size_t>(rank, n));
}

/// Max |residual| over the nodes shared with the coarsest grid, so every
/// refinement level is compared at the same physical points.
inline double common_node_max(const ResidualLattice& res, const GridSampled& g, std::size_t coarse_n) {
  const std::size_t m = (g.dims()[0] - 1) / (coarse_n - 1);
  double worst = 0.0;
  for (std::size_t flat = 0; flat < res.values.size(); ++flat) {
    if (!res.interior[flat]) continue;
    const auto idx = g.unflatten(flat);
    if (std::all_of(idx.begin(), idx.end(), [m](std::size_t i) { return i % m == 0; }))
      worst = std::max(worst, std::abs(res.values[flat]));
  }
  return worst;
}

}  // namespace detail

inline CriterionReport closed_form_check(const SuiteOptions&) {
  CriterionReport r{4, "closed-form solutions", {}};
  const RadialLog rl{1.7, 1.0};
  const IntervalLog il{1.3, 1.0};
  const BerwaldMooreLog bm{2.0, 1.0};

  double worst = 0.0;
  for (double rho : {0.3, 1.0, 2.5, 7.0}) {
    for (std::size_t n : {2u, 3u, 4u, 5u}) {
      const double scale = std::pow(1.7, double(n - 1)) / rho;
      worst = std::max(worst, std::abs(radial_residual(rl, n, rho)) / scale);
      worst = std::max(worst, std::abs(radial_residual(il, n, rho)) * rho / std::pow(1.3, double(n - 1)));
    }
    worst = std::max(worst, std::abs(radial_residual(bm, 4, rho)) * rho / 2.0);
  }
  r.checks.push_back(detail::bound("radial residual, three families (relative)", worst, 1e-13, "reference"));

  std::vector<double> e_rl, e_il, e_bm;
  for (std::size_t n : {9u, 17u, 33u}) {
    const GridSampled g_rl = detail::cube_grid(rl, 3, 1.0, 2.0, n);
    const GridSampled g_il = detail::cube_grid(il, 3, 0.0, 1.0, n, 3.0, 4.0);
    e_rl.push_back(detail::common_node_max(euler_lagrange_residual(LagrangianForm::euclidean(3), g_rl), g_rl, 9));
    e_il.push_back(detail::common_node_max(euler_lagrange_residual(LagrangianForm::pseudo(3), g_il), g_il, 9));
  }
  for (std::size_t n : {5u, 9u, 17u})
    e_bm.push_back(
        euler_lagrange_residual(LagrangianForm::berwald_moore(), detail::cube_grid(bm, 4, 1.0, 2.0, n)).norms.max_abs);

  r.checks.push_back(detail::at_least("grid order, radial log (n=3, 9/17/33)", detail::min_order(e_rl), 1.9, "oracle"));
  r.checks.push_back(detail::at_least("grid order, interval log (n=3, 9/17/33)", detail::min_order(e_il), 1.9, "oracle"));
  r.checks.push_back(detail::bound("grid residual, Berwald-Moore log (exact, 5/9/17)",
                                   *std::max_element(e_bm.begin(), e_bm.end()), 1e-12, "oracle"));
  return r;
}

inline CriterionReport degeneration_check(const SuiteOptions&) {
  CriterionReport r{5, "degenerations", {}};
  auto grid2 = [](auto fn) {
    return sample_field([&](const Point& p) { return fn(p[0], p[1]); }, {-1.0, -1.0}, {1.0 / 16, 1.0 / 16}, {33, 33});
  };
  double lap = 0.0;
  for (const GridSampled& g : {grid2([](double x, double y) { return x * x - y * y; }),
                               grid2([](double x, double y) { return x * y + 3.0 * x - y; })})
    lap = std::max(lap, two_dim_degeneration_check(g, LinearOperator::laplace).linear.max_abs);
  r.checks.push_back(detail::bound("Laplace residual, harmonic polynomials on a lattice", lap, 1e-10, "reference"));

  // e^x cos y with exact derivatives through the n = 2 power form.
  CustomField harm{[](const Point& p) { return std::exp(p[0]) * std::cos(p[1]); },
                   [](const Point& p) {
                     return Covector{std::exp(p[0]) * std::cos(p[1]), -std::exp(p[0]) * std::sin(p[1])};
                   },
                   [](const Point& p) {
                     const double c = std::exp(p[0]) * std::cos(p[1]), s = std::exp(p[0]) * std::sin(p[1]);
                     Matrix h(2);
                     h(0, 0) = c;
                     h(0, 1) = h(1, 0) = -s;
                     h(1, 1) = -c;
                     return h;
                   },
                   1e-4};
  double harm_res = 0.0;
  for (const Point& p : {Point{0.1, 0.2}, Point{-0.7, 1.3}, Point{0.9, -2.0}})
    harm_res = std::max(harm_res, std::abs(pointwise_residual_expanded(LagrangianForm::euclidean(2), harm, p)));
  r.checks.push_back(detail::bound("n=2 field equation, analytic harmonic field", harm_res, 1e-12, "reference"));

  // Null plane wave and the null cone S = r - x^0: eta^ij S_i S_j = 0.
  CustomField plane{[](const Point& p) { return p[0] - p[1]; },
                    [](const Point&) { return Covector{1.0, 1.0, 0.0, 0.0}; },
                    [](const Point&) { return Matrix(4); }, 1e-4};
  CustomField cone{[](const Point& p) { return std::sqrt(p[1] * p[1] + p[2] * p[2] + p[3] * p[3]) - p[0]; },
                   [](const Point& p) {
                     const double rr = std::sqrt(p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
                     return Covector{-1.0, p[1] / rr, p[2] / rr, p[3] / rr};
                   },
                   [](const Point& p) {
                     const double rr = std::sqrt(p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
                     Matrix h(4);
                     for (std::size_t i = 1; i < 4; ++i)
                       for (std::size_t j = 1; j < 4; ++j)
                         h(i, j) = ((i == j ? 1.0 : 0.0) - p[i] * p[j] / (rr * rr)) / rr;
                     return h;
                   },
                   1e-4};
  double eik = 0.0;
  for (const Point& p : {Point{0.5, 0.3, -0.2, 0.7}, Point{2.0, -1.0, 0.5, 0.25}}) {
    eik = std::max(eik, std::abs(pointwise_residual_expanded(LagrangianForm::pseudo(4), plane, p)));
    eik = std::max(eik, std::abs(pointwise_residual_expanded(LagrangianForm::pseudo(4), cone, p)));
    eik = std::max(eik, std::abs(eikonal_residual(cone, p)));
  }
  const GridSampled wave = sample_field([](const Point& p) { return p[0] - p[1]; }, {0, 0, 0, 0},
                                        {0.25, 0.25, 0.25, 0.25}, {5, 5, 5, 5});
  eik = std::max(eik, euler_lagrange_residual(LagrangianForm::pseudo(4), wave).norms.max_abs);
  r.checks.push_back(detail::bound("n=4 field equation, eikonal fields", eik, 1e-12, "reference"));
  return r;
}

inline CriterionReport volume_check(const SuiteOptions& opt) {
  CriterionReport r{6, "indicatrix volumes", {}};
  std::mt19937_64 rng(opt.seed);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 5; ++n)
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix g = oracle::random_spd(n, rng);
      const double ref = oracle::unit_ball_volume(n) / std::sqrt(determinant(g));
      worst = std::max(worst, std::abs(ellipsoid_volume(g).value - ref) / ref);
    }
  r.checks.push_back(detail::bound("ellipsoid volume vs omega_n/sqrt(det g) (relative)", worst, 1e-12, "oracle"));

  double scaling = 0.0;
  auto kappa = [](const Point& x) { return 0.5 + x[0] * x[0] + std::exp(-x[1] * x[1]); };
  const std::vector<SpaceSpec> spaces{SpaceSpec::euclidean(3, KappaFunction{kappa}),
                                      SpaceSpec::pseudo_euclidean(4, KappaFunction{kappa}),
                                      SpaceSpec::berwald_moore(KappaFunction{kappa})};
  for (const SpaceSpec& sp : spaces) {
    const std::size_t n = sp.dimension();
    const double base = conformal_indicatrix_volume(sp, Point(n, 0.0)).value * std::pow(kappa(Point(n, 0.0)), double(n));
    for (int rep = 0; rep < 50; ++rep) {
      Point x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = oracle::uniform(rng, 0.1, 2.0);
      const double v = conformal_indicatrix_volume(sp, x).value * std::pow(kappa(x), double(n));
      scaling = std::max(scaling, std::abs(v - base) / base);
    }
  }
  r.checks.push_back(detail::bound("V kappa^n constant (relative)", scaling, 1e-12, "identity"));

  double prev = INFINITY;
  bool decreasing = true;
  for (double q0 : {0.25, 0.5, 1.0, 2.0}) {
    const double v = regularized_hyperboloid_volume(q0).value;
    const auto mc = oracle::regularized_volume_mc(q0, opt.mc_samples, opt.seed + std::uint64_t(q0 * 1000));
    Check c = detail::compare("V(q0=" + std::to_string(q0).substr(0, 4) + ") vs Monte Carlo (3 s.e.)", v, mc.mean,
                              3.0 * mc.standard_error, "oracle");
    r.checks.push_back(c);
    decreasing = decreasing && v < prev;
    prev = v;
  }
  for (double q0 = 0.1; q0 < 5.0; q0 += 0.1) {
    const double a = regularized_hyperboloid_volume(q0).value, b = regularized_hyperboloid_volume(q0 + 0.1).value;
    decreasing = decreasing && b < a;
  }
  r.checks.push_back(detail::flag("V(q0) strictly decreasing", decreasing, "reference"));
  return r;
}

namespace detail {

inline double bundle_error(const TensorBundle& a, const TensorBundle& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < kSpacetimeDim; ++i)
    for (std::size_t k = 0; k < kSpacetimeDim; ++k) {
      m = std::max(m, std::abs(a.ricci[i][k] - b.ricci[i][k]));
      for (std::size_t l = 0; l < kSpacetimeDim; ++l) {
        m = std::max(m, std::abs(a.christoffel[i][k][l] - b.christoffel[i][k][l]));
        for (std::size_t q = 0; q < kSpacetimeDim; ++q)
          m = std::max(m, std::abs(a.riemann[i][k][l][q] - b.riemann[i][k][l][q]));
      }
    }
  return std::max(m, std::abs(a.scalar - b.scalar));
}

}  // namespace detail

inline CriterionReport curvature_check(const SuiteOptions& opt) {
  CriterionReport r{7, "conformal curvature", {}};
  struct Family {
    ConformalExponentField field;
    Point x;
  };
  const std::vector<Family> families{{ConformalExponentField::exponential_time(0.7), Point{0.3, 0.2, -0.1, 0.4}},
                                     {ConformalExponentField::interval_log(1.5), Point{2.0, 0.5, 0.3, -0.2}},
                                     {ConformalExponentField::radial_log(2.0), Point{1.3, 0.4, -0.2, 0.3}}};
  double stress_plus_R = 0.0, ratio_err = 0.0;
  for (const auto& f : families) {
    const TensorBundle closed = curvature_bundle(f.field, f.x);
    const MetricFn g = conformal_metric(f.field);
    std::vector<double> errs;
    for (double h : {2e-2, 1e-2, 5e-3}) errs.push_back(detail::bundle_error(closed, generic_oracle_curvature(g, f.x, h)));
    r.checks.push_back(detail::at_least("oracle order, " + f.field.name(), detail::min_order(errs), 1.9, "oracle"));
    stress_plus_R = std::max(stress_plus_R, std::abs(closed.stress_trace + closed.coupling * closed.scalar) /
                              std::max(1.0, std::abs(closed.scalar)));
    ratio_err = std::max(ratio_err, std::abs(scalar_curvature_diagnostic(f.field, f.x).ratio - 2.0));
  }

  std::mt19937_64 rng(opt.seed);
  double trace = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Vector4 dS;
    for (double& v : dS) v = oracle::uniform(rng, -3.0, 3.0);
    const Tensor2 t = full_stress_energy(dS);
    double scale = 0.0;
    for (std::size_t i = 0; i < kSpacetimeDim; ++i) scale = std::max(scale, std::abs(t[i][i]));
    trace = std::max(trace, std::abs(mixed_trace(t)) / std::max(1.0, scale));
  }
  r.checks.push_back(detail::bound("full stress tensor trace, 1000 gradients (relative)", trace, 1e-13, "reference"));
  r.checks.push_back(detail::bound("T + factor R", stress_plus_R, 1e-10, "reference"));
  r.checks.push_back(detail::bound("quoted/traced scalar curvature ratio - 2", ratio_err, 1e-6, "identity"));
  return r;
}

inline CriterionReport geodesic_check(const SuiteOptions&) {
  CriterionReport r{8, "geodesic congruences", {}};
  const Point x0{1.0, 0.5, 0.3, 0.1};
  const FlowSpec radial{SpaceSpec::euclidean(4), RadialLog{1.7, 1.0}};
  const FlowSpec interval{SpaceSpec::pseudo_euclidean(4), IntervalLog{1.3, 1.0}};
  const FlowSpec bm{SpaceSpec::berwald_moore(), BerwaldMooreLog{2.0, 1.0}};

  double straight = 0.0;
  for (const FlowSpec* f : {&radial, &interval, &bm})
    straight = std::max(straight, straightness_deviation(integrate_flow(*f, x0, 0.0, 2.0, 1e-10)));
  r.checks.push_back(detail::bound("straightness, three flows", straight, 1e-9, "reference"));

  const Trajectory it = integrate_flow(interval, x0, 0.0, 2.0, 1e-10);
  const auto C = ray_constants(x0);
  double c2 = 0.0;
  for (double c : C) c2 += c * c;
  const LinearFit fit = interval_fit(it);
  r.checks.push_back(detail::compare("interval slope vs sqrt(1 - sum C^2)", fit.slope, std::sqrt(1.0 - c2), 1e-8, "reference"));
  r.checks.push_back(detail::bound("interval linear-fit residual", fit.max_residual, 1e-8, "reference"));
  r.checks.push_back(
      detail::bound("Berwald-Moore xi/x0 drift", time_fraction_drift(integrate_flow(bm, x0, 0.0, 2.0, 1e-10)), 1e-10,
                    "reference"));

  const CosmoSolution sol = integrate_phi(1.0, 1e-10);
  double drift = 0.0, quad = 0.0;
  for (const Point& start : {Point{0.0, 0.1, 0.05, 0.02}, Point{0.0, -0.03, 0.2, 0.1}, Point{0.5, 0.05, -0.05, 0.15}}) {
    const Trajectory t = cosmo_trajectory(sol, start, start[0] + 0.25);
    drift = std::max(drift, spatial_direction_drift(t));
    const double r0 = finsler::detail::spatial_radius(start);
    for (std::size_t k = 1; k < t.size(); ++k) {
      const double rk = finsler::detail::spatial_radius(t.x[k]);
      quad = std::max(quad, std::abs(oracle::cosmo_elapsed_time(sol, r0, rk) - (t.x[k][0] - start[0])));
    }
  }
  r.checks.push_back(detail::bound("cosmology ray direction drift", drift, 1e-10, "oracle"));
  r.checks.push_back(detail::bound("cosmology r(x0) vs 1-D quadrature", quad, 1e-8, "oracle"));
  return r;
}

using CriterionFn = std::function<CriterionReport(const SuiteOptions&)>;

inline std::vector<CriterionFn> criteria() {
  return {series_coefficients_check, hubble_check,   singularity_check, closed_form_check,
          degeneration_check,        volume_check,   curvature_check,   geodesic_check};
}

}  // namespace finsler::verify
