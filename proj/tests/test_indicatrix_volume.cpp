#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "finsler_lab/indicatrix_volume.hpp"
#include "finsler_lab/quadrature.hpp"
#include "finsler_lab/verify/oracles.hpp"

using namespace finsler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
constexpr double pi = std::numbers::pi;

namespace {

Matrix diag(std::initializer_list<double> d) {
  Matrix m(d.size());
  std::size_t i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected finsler::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("ellipsoid volumes") {
  const VolumeResult v3 = ellipsoid_volume(Matrix::identity(3));
  CHECK_THAT(v3.value, WithinRel(4.0 * pi / 3.0, 1e-15));
  CHECK(v3.method == VolumeMethod::closed_form);
  CHECK(v3.error_estimate == 0.0);
  CHECK_THAT(ellipsoid_volume(diag({4, 1})).value, WithinRel(pi / 2.0, 1e-15));
  CHECK_THAT(ellipsoid_volume(Matrix::identity(4)).value, WithinRel(pi * pi / 2.0, 1e-15));
}

TEST_CASE("ellipsoid volume matches the recursive ball oracle on random SPD matrices") {
  std::mt19937_64 rng(3);
  for (std::size_t n = 2; n <= 6; ++n) {
    CHECK_THAT(unit_ball_volume(n), WithinRel(verify::oracle::unit_ball_volume(n), 1e-14));
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix g = verify::oracle::random_spd(n, rng);
      CHECK_THAT(ellipsoid_volume(g).value, WithinRel(unit_ball_volume(n) / std::sqrt(determinant(g)), 1e-11));
    }
  }
}

TEST_CASE("ellipsoid volume rejects indefinite or asymmetric input") {
  CHECK(code_of([] { ellipsoid_volume(diag({1, -1})); }) == ErrorCode::NotPositiveDefinite);
  CHECK(code_of([] { ellipsoid_volume(diag({1, 0})); }) == ErrorCode::NotPositiveDefinite);
  Matrix a = Matrix::identity(2);
  a(0, 1) = 0.5;
  CHECK(code_of([&] { ellipsoid_volume(a); }) == ErrorCode::NotPositiveDefinite);
}

TEST_CASE("conformal scaling of the indicatrix volume") {
  const Point x4(4, 0.0);
  const auto ratio = [&](const SpaceSpec& a, const SpaceSpec& b) {
    return conformal_indicatrix_volume(a, x4).value / conformal_indicatrix_volume(b, x4).value;
  };
  CHECK_THAT(ratio(SpaceSpec::pseudo_euclidean(4, ConstantKappa{2}), SpaceSpec::pseudo_euclidean(4)),
             WithinRel(1.0 / 16.0, 1e-15));
  CHECK_THAT(ratio(SpaceSpec::berwald_moore(ConstantKappa{2}), SpaceSpec::berwald_moore()),
             WithinRel(1.0 / 16.0, 1e-15));
  const VolumeResult e = conformal_indicatrix_volume(SpaceSpec::euclidean(3, ConstantKappa{2}), Point{0, 0, 0});
  CHECK_THAT(e.value, WithinRel(4.0 * pi / 3.0 / 8.0, 1e-15));
  CHECK(e.method == VolumeMethod::scaling_law);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  const double base = conformal_indicatrix_volume(SpaceSpec::euclidean(5), Point(5, 0.0)).value;
  for (int rep = 0; rep < 50; ++rep) {
    const double k = u(rng);
    const double v = conformal_indicatrix_volume(SpaceSpec::euclidean(5, ConstantKappa{k}), Point(5, 0.0)).value;
    CHECK_THAT(v * std::pow(k, 5), WithinRel(base, 1e-12));
  }
  CHECK(code_of([&] { conformal_indicatrix_volume(SpaceSpec::pseudo_euclidean(4, ConstantKappa{0.0}), x4); }) ==
        ErrorCode::NonpositiveKappa);
}

TEST_CASE("regularized hyperboloid volume") {
  // first panel: full 3-balls up to t = 1/2 at q0 = 1
  const QuadratureResult cone =
      adaptive_simpson([](double t) { return regularized_slice_volume(1.0, t); }, 0.0, 0.5, 1e-14);
  CHECK_THAT(cone.value, WithinRel(pi / 48.0, 1e-12));

  const VolumeResult v1 = regularized_hyperboloid_volume(1.0);
  CHECK(v1.method == VolumeMethod::quadrature);
  CHECK(v1.error_estimate >= 0.0);
  CHECK(v1.value > pi / 48.0);

  double prev = std::numeric_limits<double>::infinity();
  for (double q0 : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
    const double v = regularized_hyperboloid_volume(q0).value;
    CHECK(v < prev);
    prev = v;
  }
  CHECK(regularized_hyperboloid_volume(0.01).value > 1e3 * v1.value);
  CHECK(code_of([] { regularized_hyperboloid_volume(0.0); }) == ErrorCode::NonpositiveQ0);
  CHECK(code_of([] { regularized_hyperboloid_volume(-1.0); }) == ErrorCode::NonpositiveQ0);
}

TEST_CASE("regularized volume agrees with Monte Carlo at q0 = 1") {
  const verify::oracle::McEstimate mc = verify::oracle::regularized_volume_mc(1.0, 400000, 99);
  CHECK(std::abs(regularized_hyperboloid_volume(1.0).value - mc.mean) <= 4.0 * mc.standard_error);
}

TEST_CASE("Lagrangian from the indicatrix volume") {
  CHECK_THAT(lagrangian_from_volume(SpaceSpec::euclidean(3, ConstantKappa{2}), Point{0, 0, 0}), WithinRel(8.0, 1e-14));
  const Point x4(4, 0.0);
  CHECK_THAT(lagrangian_from_volume(SpaceSpec::pseudo_euclidean(4, ConstantKappa{3}), x4), WithinRel(81.0, 1e-14));
  CHECK_THAT(lagrangian_from_volume(SpaceSpec::regularized_hyperboloid(1.0), x4),
             WithinRel(1.0 / regularized_hyperboloid_volume(1.0).value, 1e-12));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int rep = 0; rep < 30; ++rep) {
    const double k = u(rng);
    CHECK_THAT(lagrangian_from_volume(SpaceSpec::euclidean(3, ConstantKappa{k}), Point{0, 0, 0}),
               WithinRel(k * k * k, 1e-12));
    CHECK_THAT(lagrangian_from_volume(SpaceSpec::pseudo_euclidean(4, ConstantKappa{k}), x4),
               WithinRel(std::pow(k, 4), 1e-12));
    CHECK_THAT(lagrangian_from_volume(SpaceSpec::berwald_moore(ConstantKappa{k}), x4), WithinRel(std::pow(k, 4), 1e-12));
  }
}

TEST_CASE("raw volume of a non-compact indicatrix is infinite") {
  const Point x4(4, 0.0);
  CHECK(raw_indicatrix_volume(SpaceSpec::pseudo_euclidean(4), x4).infinite());
  CHECK(raw_indicatrix_volume(SpaceSpec::berwald_moore(), x4).infinite());
  CHECK(code_of([&] { lagrangian_from_volume(SpaceSpec::pseudo_euclidean(4), x4, VolumeMode::raw); }) ==
        ErrorCode::InfiniteVolume);
  CHECK_THAT(lagrangian_from_volume(SpaceSpec::euclidean(3, ConstantKappa{2}), Point{0, 0, 0}, VolumeMode::raw),
             WithinRel(8.0, 1e-14));
}
