#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "finsler_lab/error.hpp"

namespace finsler {

using Rational = boost::multiprecision::cpp_rational;

/// Power series in xi truncated after xi^order, with exact coefficients.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::size_t order) : c_(order + 1, Rational(0)) {}

  static TruncatedSeries constant(std::size_t order, const Rational& v) {
    TruncatedSeries s(order);
    s.c_[0] = v;
    return s;
  }

  std::size_t order() const noexcept { return c_.size() - 1; }
  const Rational& operator[](std::size_t k) const { return c_[k]; }
  Rational& operator[](std::size_t k) { return c_[k]; }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }

  friend TruncatedSeries operator*(const Rational& s, TruncatedSeries a) {
    for (auto& v : a.c_) v *= s;
    return a;
  }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries out(a.order());
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; i + j < out.c_.size(); ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return out;
  }

  /// xi * s, truncated.
  TruncatedSeries times_xi() const {
    TruncatedSeries out(order());
    for (std::size_t k = 0; k + 1 < c_.size(); ++k) out.c_[k + 1] = c_[k];
    return out;
  }

  /// d/dxi; the top coefficient is lost to truncation and set to 0.
  TruncatedSeries derivative() const {
    TruncatedSeries out(order());
    for (std::size_t k = 1; k < c_.size(); ++k) out.c_[k - 1] = c_[k] * Rational(k);
    return out;
  }

 private:
  std::vector<Rational> c_;
};

/// Coefficients a_1..a_N of phi(xi) = sum a_k xi^k.
struct SeriesExpansion {
  std::vector<Rational> coefficients;

  std::size_t order() const noexcept { return coefficients.size(); }

  double value(double xi) const {
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * xi + coefficients[k].convert_to<double>();
    return acc * xi;
  }

  /// phi(xi) / xi without the cancellation of dividing a small value.
  double value_over_xi(double xi) const {
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * xi + coefficients[k].convert_to<double>();
    return acc;
  }

  double derivative(double xi) const {
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;)
      acc = acc * xi + double(k + 1) * coefficients[k].convert_to<double>();
    return acc;
  }

  /// int_0^xi phi.
  double integral(double xi) const {
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;)
      acc = acc * xi + coefficients[k].convert_to<double>() / double(k + 2);
    return acc * xi * xi;
  }

  std::string coefficient_string(std::size_t k) const { return coefficients.at(k).str(); }
};

/// Left side of the cosmological equation
///   xi (1 - 3 phi^2) phi' + 2 phi (1 - phi^2) - 3 xi (1 - phi^2)^2
/// for a truncated series phi.
inline TruncatedSeries cosmology_series_residual(const TruncatedSeries& phi) {
  const std::size_t N = phi.order();
  const TruncatedSeries one = TruncatedSeries::constant(N, Rational(1));
  const TruncatedSeries phi2 = phi * phi;
  const TruncatedSeries w = one - phi2;
  const TruncatedSeries a = ((one - Rational(3) * phi2) * phi.derivative()).times_xi();
  const TruncatedSeries b = Rational(2) * (phi * w);
  const TruncatedSeries c = Rational(3) * (w * w).times_xi();
  return a + b - c;
}

/// Power-series solution of the cosmological equation with phi(0) = 0, solved
/// order by order. At order k the coefficient a_k enters linearly as
/// (k + 2) a_k (from xi phi' and 2 phi); every other contribution involves
/// only lower coefficients.
inline SeriesExpansion phi_series(std::size_t order) {
  require(order >= 1, ErrorCode::InvalidArgument, "series order must be >= 1");
  // One extra slot so the derivative of the top coefficient is not truncated.
  TruncatedSeries phi(order + 1);
  for (std::size_t k = 1; k <= order; ++k) {
    phi[k] = 0;
    const TruncatedSeries r = cosmology_series_residual(phi);
    phi[k] = -r[k] / Rational(k + 2);
  }
  SeriesExpansion out;
  out.coefficients.reserve(order);
  for (std::size_t k = 1; k <= order; ++k) out.coefficients.push_back(phi[k]);
  return out;
}

}  // namespace finsler
