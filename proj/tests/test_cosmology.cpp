#include <catch_amalgamated.hpp>

#include <cmath>

#include "finsler_lab/cosmology.hpp"
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

const CosmoSolution& solution() {
  static const CosmoSolution sol = integrate_phi(2.0, 1e-11);
  return sol;
}

}  // namespace

TEST_CASE("right-hand side of the phi equation") {
  CHECK(phi_rhs(1.0, 0.0) == 3.0);
  for (double xi : {0.1, 1.0, 7.0}) CHECK(phi_rhs(xi, 1.0) == 0.0);
  CHECK(code_of([] { phi_rhs(0.5, 1.0 / std::sqrt(3.0)); }) == ErrorCode::SingularDenominator);
  CHECK(code_of([] { phi_rhs(0.0, 0.1); }) == ErrorCode::OriginSingularity);
}

TEST_CASE("series coefficients") {
  const SeriesExpansion s1 = phi_series(1);
  REQUIRE(s1.order() == 1);
  CHECK(s1.coefficient_string(0) == "1");
  const SeriesExpansion s3 = phi_series(3);
  REQUIRE(s3.order() == 3);
  CHECK(s3.coefficients[0] == Rational(1));
  CHECK(s3.coefficients[1] == Rational(0));
  CHECK(s3.coefficients[2] == Rational(-1, 5));

  const SeriesExpansion s11 = phi_series(11);
  const std::vector<Rational> oracle = verify::oracle::series_coefficients(11);
  REQUIRE(oracle.size() == s11.coefficients.size());
  for (std::size_t k = 0; k < oracle.size(); ++k) {
    CHECK(s11.coefficients[k] == oracle[k]);
    // odd function: even powers vanish
    if (k % 2 == 1) CHECK(s11.coefficients[k] == Rational(0));
  }
  CHECK(phi_series(5).coefficients[4] == oracle[4]);
}

TEST_CASE("series and integrator agree near the origin") {
  const SeriesExpansion s = phi_series(11);
  for (int i = 1; i <= 100; ++i) {
    const double xi = 0.001 * i;
    CHECK_THAT(solution().phi(xi), WithinAbs(s.value(xi), 1e-8));
  }
}

TEST_CASE("integrated phi against the cubic truncation") {
  const double tol = 1e-9;
  const CosmoSolution sol = integrate_phi(0.2, tol);
  for (int i = 1; i <= 40; ++i) {
    const double xi = 0.005 * i;
    CHECK(std::abs(sol.phi(xi) - (xi - xi * xi * xi / 5.0)) <= std::max(10.0 * tol, std::pow(xi, 5)));
  }
}

TEST_CASE("phi increases up to the singular point") {
  const CosmoSolution& sol = solution();
  REQUIRE(sol.singular_xi().has_value());
  const double xs = *sol.singular_xi();
  CHECK_THAT(xs, WithinAbs(0.5848113, 1e-6));
  CHECK_THAT(sol.phi(xs), WithinAbs(1.0 / std::sqrt(3.0), 1e-6));
  CHECK(sol.xi_end() <= xs * (1.0 + 1e-12));
  double prev = sol.phi(0.0);
  CHECK(prev == 0.0);
  for (int i = 1; i <= 200; ++i) {
    const double xi = xs * i / 201.0;
    const double v = sol.phi(xi);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(code_of([&] { sol.phi(xs * 1.01); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { sol.phi(-0.1); }) == ErrorCode::OutOfRange);
}

TEST_CASE("integrate_phi argument checks") {
  CHECK(code_of([] { integrate_phi(0.0, 1e-8); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { integrate_phi(1.0, 1e-2); }) == ErrorCode::InvalidArgument);
  CosmoParameters bad;
  bad.S0 = -1.0;
  CHECK(code_of([&] { integrate_phi(1.0, 1e-8, {}, bad); }) == ErrorCode::NonpositiveKappa);
}

TEST_CASE("field equation residuals") {
  for (double tol : {1e-6, 1e-9}) {
    const CosmoSolution sol = integrate_phi(0.5, tol);
    for (const auto& n : sol.nodes()) {
      if (n.xi == 0.0) continue;
      CHECK(std::abs(cosmo_field_residual(sol, n.xi)) <= 100.0 * tol * (1.0 + n.xi * n.xi));
    }
  }
  for (double xi : {0.3, 1.0, 4.0}) CHECK(cosmo_flux_residual(xi, 1.0, 0.0) == 0.0);

  // cubic truncation leaves an O(xi^4) residual
  auto trunc = [](double xi) { return cosmo_flux_residual(xi, xi - xi * xi * xi / 5.0, 1.0 - 0.6 * xi * xi); };
  for (double xi : {0.04, 0.02, 0.01}) {
    CHECK(std::abs(trunc(xi)) <= 2.0 * std::pow(xi, 4));
    CHECK(std::abs(trunc(xi) / trunc(0.5 * xi)) > 12.0);
  }
}

TEST_CASE("psi, field and kappa") {
  CosmoParameters p;
  p.gamma = 0.7;
  p.S0 = 2.5;
  p.c = 3.0;
  const CosmoSolution sol = integrate_phi(1.0, 1e-10, {}, p);
  const PsiField z = psi_and_field(sol, 0.0, 0.0);
  CHECK(z.psi == 1.0);
  CHECK(z.S == p.S0);
  for (double x0 : {0.0, 0.4, 2.0})
    CHECK_THAT(psi_and_field(sol, x0, 0.0).kappa, WithinRel(p.gamma * p.S0 * std::exp(-p.gamma * x0), 1e-14));
  CHECK(code_of([&] { psi_and_field(sol, 0.0, -1.0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("Hubble law") {
  CosmoParameters p;
  p.gamma = 2.0;
  p.c = 5.0;
  const CosmoSolution sol = integrate_phi(1.0, 1e-11, {}, p);
  CHECK(hubble(sol, 0.0) == p.H0());
  const double r01 = 0.1 * p.c / p.H0();
  CHECK_THAT(hubble(sol, r01) / p.H0(), WithinAbs(0.998, 5e-5));
  CHECK_THAT(hubble_quadratic(p.H0(), p.c, r01) / p.H0(), WithinAbs(0.998, 1e-12));
  const double r05 = 0.5 * p.c / p.H0();
  CHECK_THAT(hubble(sol, r05), WithinRel(p.H0() * sol.phi(0.5) / 0.5, 1e-14));
  CHECK(code_of([&] { hubble(sol, -1.0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("body velocity") {
  CosmoParameters p;
  p.gamma = 0.5;
  p.c = 2.0;
  const CosmoSolution sol = integrate_phi(2.0, 1e-11, {}, p);
  CHECK(body_velocity(sol, 0.0) == 0.0);
  for (double r : {0.001, 0.01, 0.02}) {
    const double g = p.gamma * r;
    CHECK_THAT(body_velocity(sol, r), WithinAbs(p.c * g * (1.0 - g * g / 5.0), p.c * std::pow(g, 5) + 1e-13));
  }
  const double r_end = sol.xi_end() / p.gamma;
  for (int i = 0; i <= 50; ++i) CHECK(std::abs(body_velocity(sol, r_end * i / 50.0)) < p.c);
  CHECK(code_of([&] { body_velocity(sol, r_end * 1.1); }) == ErrorCode::OutOfRange);
}

TEST_CASE("cosmological field solves the pseudo Hamilton-Jacobi relation") {
  CosmoParameters p;
  p.gamma = 0.8;
  p.S0 = 1.5;
  const CosmoSolution sol = integrate_phi(1.0, 1e-12, {}, p);
  const FieldSpec field = cosmo_field(sol);
  auto kappa = [&sol](const Point& x) { return cosmo_kappa(sol, x); };
  const SpaceSpec space = SpaceSpec::pseudo_euclidean(4, KappaFunction{kappa});
  for (const Point& x : {Point{0.0, 0.1, 0.2, 0.1}, Point{0.5, 0.3, -0.2, 0.2}, Point{1.0, 0.0, 0.5, 0.1}}) {
    const double k = cosmo_kappa(sol, x);
    CHECK(std::abs(hamilton_jacobi_residual(space, field, x)) <= 1e-7 * k * k);
    CHECK_THAT(kappa_from_field(SpaceSpec::pseudo_euclidean(4), field, x), WithinRel(k, 1e-7));
  }
}
