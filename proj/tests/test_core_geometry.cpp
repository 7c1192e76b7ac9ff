#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "finsler_lab/core_geometry.hpp"

using namespace finsler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected finsler::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("metric function of the base spaces") {
  const Point x0{0.0, 0.0};
  CHECK(metric_function(SpaceSpec::euclidean(2), x0, Direction{3, 4}) == 5.0);
  const Point x4(4, 0.0);
  CHECK(metric_function(SpaceSpec::pseudo_euclidean(4), x4, Direction{5, 3, 0, 0}) == 4.0);
  CHECK(metric_function(SpaceSpec::berwald_moore(), x4, Direction{1, 1, 1, 1}) == 1.0);
  // light-like direction on the closed cone
  CHECK(metric_function(SpaceSpec::pseudo_euclidean(4), x4, Direction{1, 1, 0, 0}) == 0.0);
  CHECK_THAT(metric_function(SpaceSpec::regularized_hyperboloid(0.5), x4, Direction{5, 3, 0, 0}), WithinAbs(6.5, 1e-15));
}

TEST_CASE("metric function rejects inadmissible directions") {
  const Point x4(4, 0.0);
  CHECK(code_of([&] { metric_function(SpaceSpec::pseudo_euclidean(4), x4, Direction{1, 2, 0, 0}); }) ==
        ErrorCode::InadmissibleDirection);
  CHECK(code_of([&] { metric_function(SpaceSpec::pseudo_euclidean(4), x4, Direction{-2, 1, 0, 0}); }) ==
        ErrorCode::InadmissibleDirection);
  CHECK(code_of([&] { metric_function(SpaceSpec::berwald_moore(), x4, Direction{1, 1, 0, 1}); }) ==
        ErrorCode::InadmissibleDirection);
  CHECK(code_of([&] {
          metric_function(SpaceSpec::euclidean(2, ConstantKappa{-1.0}), Point{0, 0}, Direction{1, 0});
        }) == ErrorCode::NonpositiveKappa);
  CHECK(code_of([] { SpaceSpec::regularized_hyperboloid(0.0); }) == ErrorCode::NonpositiveQ0);
  CHECK(code_of([] { SpaceSpec::euclidean(1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("generalized momenta") {
  const Covector pe = generalized_momenta(SpaceSpec::euclidean(2), Point{0, 0}, Direction{3, 4});
  CHECK_THAT(pe[0], WithinAbs(0.6, 1e-15));
  CHECK_THAT(pe[1], WithinAbs(0.8, 1e-15));

  const Point x4(4, 0.0);
  const Covector pp = generalized_momenta(SpaceSpec::pseudo_euclidean(4), x4, Direction{5, 3, 0, 0});
  CHECK_THAT(pp[0], WithinAbs(1.25, 1e-15));
  CHECK_THAT(pp[1], WithinAbs(-0.75, 1e-15));
  CHECK(pp[2] == 0.0);
  CHECK(pp[3] == 0.0);

  const Covector pb = generalized_momenta(SpaceSpec::berwald_moore(ConstantKappa{4.0}), x4, Direction{1, 1, 1, 1});
  for (double v : pb) CHECK_THAT(v, WithinAbs(1.0, 1e-15));

  CHECK(code_of([] { generalized_momenta(SpaceSpec::euclidean(2), Point{0, 0}, Direction{0, 0}); }) ==
        ErrorCode::ZeroDirection);
  CHECK(code_of([&] { generalized_momenta(SpaceSpec::pseudo_euclidean(4), x4, Direction{1, 1, 0, 0}); }) ==
        ErrorCode::ZeroDirection);
}

TEST_CASE("tangential indicatrix examples") {
  const Point x4(4, 0.0);
  CHECK(tangential_indicatrix_residual(SpaceSpec::pseudo_euclidean(4), x4, Covector{1, 0, 0, 0}) == 0.0);
  CHECK_THAT(tangential_indicatrix_residual(SpaceSpec::euclidean(2), Point{0, 0}, Covector{0.6, 0.8}),
             WithinAbs(0.0, 1e-15));
  CHECK(tangential_indicatrix_residual(SpaceSpec::berwald_moore(), x4, Covector{0.25, 0.25, 0.25, 0.25}) == 0.0);
}

TEST_CASE("indicatrix examples") {
  const Point x4(4, 0.0);
  CHECK(indicatrix_residual(SpaceSpec::pseudo_euclidean(4), x4, Direction{1, 0, 0, 0}) == 0.0);
  CHECK(indicatrix_residual(SpaceSpec::pseudo_euclidean(4, ConstantKappa{2.0}), x4, Direction{0.5, 0, 0, 0}) == 0.0);
  CHECK(indicatrix_quadratic_residual(SpaceSpec::pseudo_euclidean(4, ConstantKappa{2.0}), x4,
                                      Direction{0.5, 0, 0, 0}) == 0.0);
  CHECK(indicatrix_residual(SpaceSpec::berwald_moore(), x4, Direction{1, 1, 1, 1}) == 0.0);
}

TEST_CASE("homogeneity, momentum consistency and unit-vector reconstruction") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 2.0), s(-1.0, 1.0);
  auto kappa = [](const Point& x) { return 1.0 + 0.5 * std::sin(x[0]) * std::sin(x[0]); };
  const std::vector<SpaceSpec> spaces{
      SpaceSpec::euclidean(3, KappaFunction{kappa}), SpaceSpec::pseudo_euclidean(4, KappaFunction{kappa}),
      SpaceSpec::berwald_moore(KappaFunction{kappa}), SpaceSpec::regularized_hyperboloid(0.7, KappaFunction{kappa})};
  for (const SpaceSpec& sp : spaces) {
    const std::size_t n = sp.dimension();
    for (int rep = 0; rep < 200; ++rep) {
      Point x(n);
      Direction dx(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = s(rng);
      if (std::holds_alternative<BerwaldMooreConformal>(sp.kind)) {
        for (std::size_t i = 0; i < n; ++i) dx[i] = u(rng);
      } else if (std::holds_alternative<EuclideanConformal>(sp.kind)) {
        for (std::size_t i = 0; i < n; ++i) dx[i] = s(rng);
      } else {
        double r2 = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
          dx[i] = s(rng);
          r2 += dx[i] * dx[i];
        }
        dx[0] = std::sqrt(r2) + u(rng);
      }
      const double t = u(rng) * 3.0;
      Direction tdx = dx;
      for (double& v : tdx) v *= t;
      const double L = metric_function(sp, x, dx);
      CHECK_THAT(metric_function(sp, x, tdx), WithinRel(t * L, 1e-13));

      const Covector p = generalized_momenta(sp, x, dx);
      const Covector pt = generalized_momenta(sp, x, tdx);
      for (std::size_t i = 0; i < n; ++i) CHECK_THAT(pt[i], WithinAbs(p[i], 1e-12 * (1.0 + std::abs(p[i]))));
      CHECK_THAT(tangential_indicatrix_residual(sp, x, p), WithinAbs(0.0, 1e-12));

      Direction unit = dx;
      for (double& v : unit) v /= L;
      CHECK_THAT(indicatrix_residual(sp, x, unit), WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("Hamilton-Jacobi residual and kappa from closed-form fields") {
  const RadialLog rl{1.0, 1.0};
  const SpaceSpec e3 = SpaceSpec::euclidean(3, kappa_of(rl));
  CHECK_THAT(hamilton_jacobi_residual(e3, rl, Point{0.3, -1.2, 2.0}), WithinAbs(0.0, 1e-15));

  const IntervalLog il{1.0, 1.0};
  const Point x{2.0, 1.0, 0.0, 0.0};
  CHECK_THAT(hamilton_jacobi_form(PseudoEuclideanConformal{4}, field_gradient(il, x)), WithinAbs(1.0 / 3.0, 1e-15));
  CHECK_THAT(hamilton_jacobi_residual(SpaceSpec::pseudo_euclidean(4, kappa_of(il)), il, x), WithinAbs(0.0, 1e-15));
  // kappa = |C| / s supplied independently
  auto k_il = [](const Point& p) { return 1.0 / std::sqrt(minkowski_square(p.view())); };
  CHECK_THAT(hamilton_jacobi_residual(SpaceSpec::pseudo_euclidean(4, KappaFunction{k_il}), il, x),
             WithinAbs(0.0, 1e-15));

  const BerwaldMooreLog bm{1.0, 1.0};
  const Point xi{1, 2, 3, 4};
  const Covector g = field_gradient(bm, xi);
  CHECK_THAT(g[0] * g[1] * g[2] * g[3], WithinRel(1.0 / (256.0 * 24.0), 1e-14));
  auto k_bm = [](const Point& p) { return 1.0 / std::pow(p[0] * p[1] * p[2] * p[3], 0.25); };
  CHECK_THAT(hamilton_jacobi_residual(SpaceSpec::berwald_moore(KappaFunction{k_bm}), bm, xi), WithinAbs(0.0, 1e-17));

  CHECK_THAT(kappa_from_field(SpaceSpec::euclidean(3), RadialLog{2.0, 1.0}, Point{0.0, 0.0, 4.0}),
             WithinAbs(0.5, 1e-15));
  CHECK_THAT(kappa_from_field(SpaceSpec::pseudo_euclidean(4), il, x), WithinAbs(1.0 / std::sqrt(3.0), 1e-15));
  const double A = -3.0;
  // product 16, so s = 2
  CHECK_THAT(kappa_from_field(SpaceSpec::berwald_moore(), BerwaldMooreLog{A, 1.0}, Point{1, 2, 4, 2}),
             WithinRel(std::abs(A) / 2.0, 1e-14));
}

TEST_CASE("kappa_from_field error paths") {
  const Point spacelike{1.0, 2.0, 0.0, 0.0};
  CustomField f{[](const Point& p) { return p[1]; }, {}, {}, 1e-4};
  CHECK(code_of([&] { kappa_from_field(SpaceSpec::pseudo_euclidean(4), f, spacelike); }) ==
        ErrorCode::SpacelikeGradient);
  CHECK(code_of([&] { kappa_from_field(SpaceSpec::regularized_hyperboloid(1.0), f, spacelike); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("closed-form kappa matches the family formulas on random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const Point x{u(rng), u(rng), u(rng), u(rng)};
    const double r = euclidean_norm(x.view());
    CHECK_THAT(kappa_from_field(SpaceSpec::euclidean(4), RadialLog{1.3, 1.0}, x), WithinRel(1.3 / r, 1e-12));
    const Point y{x[0] + 6.0, x[1], x[2], x[3]};
    const double s = std::sqrt(minkowski_square(y.view()));
    CHECK_THAT(kappa_from_field(SpaceSpec::pseudo_euclidean(4), IntervalLog{-0.8, 1.0}, y), WithinRel(0.8 / s, 1e-12));
    const double sb = std::pow(x[0] * x[1] * x[2] * x[3], 0.25);
    CHECK_THAT(kappa_from_field(SpaceSpec::berwald_moore(), BerwaldMooreLog{2.5, 1.0}, x), WithinRel(2.5 / sb, 1e-12));
  }
}

TEST_CASE("grid-sampled kappa converges at second order") {
  const RadialLog rl{1.0, 1.0};
  const Point target{1.5, 1.5, 1.5};
  const double exact = kappa_from_field(SpaceSpec::euclidean(3), rl, target);
  std::vector<double> err;
  for (std::size_t n : {5u, 9u, 17u}) {
    const double h = 1.0 / double(n - 1);
    const GridSampled g = sample_field([&](const Point& p) { return field_value(rl, p); }, {1.0, 1.0, 1.0},
                                      {h, h, h}, {n, n, n});
    err.push_back(std::abs(kappa_from_field(SpaceSpec::euclidean(3), g, target) - exact));
  }
  CHECK(std::log2(err[0] / err[1]) > 1.9);
  CHECK(std::log2(err[1] / err[2]) > 1.9);
}

TEST_CASE("grid-sampled field access") {
  const GridSampled g =
      sample_field([](const Point& p) { return p[0] + 10.0 * p[1]; }, {0.0, 0.0}, {0.5, 0.25}, {5, 6});
  CHECK(g.rank() == 2);
  CHECK(g.at(g.locate(Point{1.0, 0.75})) == 1.0 + 7.5);
  const Covector grad = field_gradient(g, Point{1.0, 0.5});
  CHECK_THAT(grad[0], WithinAbs(1.0, 1e-14));
  CHECK_THAT(grad[1], WithinAbs(10.0, 1e-13));
  CHECK(code_of([&] { field_gradient(g, Point{0.0, 0.5}); }) == ErrorCode::BoundaryPoint);
}
