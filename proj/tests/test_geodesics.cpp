#include <catch_amalgamated.hpp>

#include <cmath>

#include "finsler_lab/geodesics.hpp"
#include "finsler_lab/verify/oracles.hpp"

using namespace finsler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected finsler::Error");
  return ErrorCode::InvalidArgument;
}

const Point kStart{1.0, 0.5, 0.3, 0.1};

std::vector<FlowSpec> reference_flows() {
  return {FlowSpec{SpaceSpec::euclidean(4), RadialLog{1.5, 1.0}},
          FlowSpec{SpaceSpec::pseudo_euclidean(4), IntervalLog{0.7, 1.0}},
          FlowSpec{SpaceSpec::berwald_moore(), BerwaldMooreLog{2.0, 1.0}}};
}

Trajectory ray(const Point& d, std::size_t n) {
  Trajectory t;
  for (std::size_t k = 1; k <= n; ++k) {
    Point p = d;
    for (double& v : p) v *= double(k);
    t.tau.push_back(double(k));
    t.x.push_back(p);
  }
  return t;
}

}  // namespace

TEST_CASE("reference lambda reduces the congruence to dx/dtau = x") {
  for (const FlowSpec& f : reference_flows()) {
    const Direction v = congruence_velocity(f, kStart);
    for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(v[i], WithinAbs(kStart[i], 1e-14));
  }
  const FlowSpec unit{SpaceSpec::euclidean(3), RadialLog{2.0, 1.0}, LambdaChoice::one()};
  const Direction v = congruence_velocity(unit, Point{3.0, 0.0, 4.0});
  CHECK_THAT(v[0], WithinAbs(2.0 * 3.0 / 25.0, 1e-15));
  CHECK_THAT(v[2], WithinAbs(2.0 * 4.0 / 25.0, 1e-15));
}

TEST_CASE("congruence velocity error paths") {
  const FlowSpec zero{SpaceSpec::euclidean(4), RadialLog{1.0, 1.0}, LambdaChoice::from([](const Point&) { return 0.0; })};
  CHECK(code_of([&] { congruence_velocity(zero, kStart); }) == ErrorCode::ZeroLambda);
  const FlowSpec custom{SpaceSpec::euclidean(4), CustomField{[](const Point& p) { return p[0]; }, {}, {}, 1e-5}};
  CHECK(code_of([&] { congruence_velocity(custom, kStart); }) == ErrorCode::InvalidArgument);
  const FlowSpec reg{SpaceSpec::regularized_hyperboloid(1.0), IntervalLog{1.0, 1.0}};
  CHECK(code_of([&] { congruence_velocity(reg, kStart); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("integrated flows follow the exponential ray") {
  for (const FlowSpec& f : reference_flows()) {
    const Trajectory t = integrate_flow(f, kStart, 0.0, 1.0);
    REQUIRE(t.size() >= 3);
    CHECK(t.tau.back() == 1.0);
    CHECK(t.future_directed);
    for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(t.x.back()[i], WithinAbs(kStart[i] * std::exp(1.0), 1e-10));

    const Trajectory t2 = integrate_flow(f, kStart, 0.0, 2.0);
    CHECK(straightness_deviation(t2) < 1e-9);
  }
}

TEST_CASE("straightness deviation") {
  CHECK(straightness_deviation(ray(Point{1.0, 2.0, -0.5}, 6)) < 1e-15);
  // unit direction, so the offset sample has norm 1
  Trajectory bent = ray(Point{0.6, 0.0, 0.8}, 6);
  bent.x[0][1] += 1e-3;
  CHECK(straightness_deviation(bent) >= 1e-4);
  CHECK(code_of([] { straightness_deviation(ray(Point{1.0, 1.0}, 2)); }) == ErrorCode::TooFewSamples);
}

TEST_CASE("interval grows linearly along the pseudo flow") {
  const FlowSpec f{SpaceSpec::pseudo_euclidean(4), IntervalLog{1.0, 1.0}};
  const Trajectory t = integrate_flow(f, kStart, 0.0, 2.0);
  const LinearFit fit = interval_fit(t);
  double c2 = 0.0;
  for (double c : ray_constants(kStart)) c2 += c * c;
  CHECK_THAT(fit.slope, WithinRel(std::sqrt(1.0 - c2), 1e-9));
  CHECK(std::abs(fit.intercept) < 1e-8);
  CHECK(fit.max_residual < 1e-8);
  const std::vector<double> rc = ray_constants(t.x.back());
  for (std::size_t i = 0; i < rc.size(); ++i) CHECK_THAT(rc[i], WithinAbs(kStart[i + 1], 1e-10));
}

TEST_CASE("Berwald-Moore time fractions are conserved") {
  const FlowSpec f{SpaceSpec::berwald_moore(), BerwaldMooreLog{1.0, 1.0}};
  const Trajectory t = integrate_flow(f, Point{0.4, 0.3, 0.2, 0.1}, 0.0, 1.5);
  CHECK(time_fraction_drift(t) < 1e-10);
}

TEST_CASE("leaving the forward cone is reported") {
  // lambda of the wrong sign drives x^0 down through the cone apex
  const FlowSpec f{SpaceSpec::pseudo_euclidean(4), IntervalLog{1.0, 1.0},
                   LambdaChoice::from([](const Point& x) { return -minkowski_square(x.view()) - 1.0; })};
  CHECK(code_of([&] { integrate_flow(f, kStart, 0.0, 50.0); }) == ErrorCode::LeftDomain);
}

TEST_CASE("cosmological body trajectories") {
  CosmoParameters p;
  p.gamma = 0.5;
  const CosmoSolution sol = integrate_phi(1.0, 1e-12, {}, p);

  const Point tiny{0.0, 1e-9, 0.0, 0.0};
  const Trajectory still = cosmo_trajectory(sol, tiny, 0.5);
  CHECK(std::abs(still.x.back()[1] - tiny[1]) < 1e-9);
  const Point origin{0.0, 0.0, 0.0, 0.0};
  CHECK(cosmo_trajectory(sol, origin, 1.0).x.back()[1] == 0.0);

  const Point start{0.0, 0.3, 0.2, -0.1};
  const Trajectory t = cosmo_trajectory(sol, start, 0.3);
  CHECK(spatial_direction_drift(t) < 1e-10);
  CHECK(t.tau.back() == 0.3);
  const double r0 = detail::spatial_radius(start), r1 = detail::spatial_radius(t.x.back());
  CHECK(r1 > r0);
  CHECK_THAT(verify::oracle::cosmo_elapsed_time(sol, r0, r1), WithinAbs(0.3, 1e-8));

  CHECK(code_of([&] { cosmo_trajectory(sol, start, 50.0); }) == ErrorCode::LeftDomain);
  CHECK(code_of([&] { cosmo_trajectory(sol, Point{0.0, 10.0, 0.0, 0.0}, 1.0); }) == ErrorCode::LeftDomain);
}
