#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace finsler {

/// Coordinate tuple tagged by role, so a Point cannot be passed where a
/// Direction or a covector is expected.
template <class Tag>
class Coords {
 public:
  Coords() = default;
  Coords(std::initializer_list<double> values) : values_(values) {}
  explicit Coords(std::vector<double> values) : values_(std::move(values)) {}
  explicit Coords(std::size_t n, double fill = 0.0) : values_(n, fill) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> view() const noexcept { return values_; }
  std::span<double> view() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }
  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }

  friend bool operator==(const Coords&, const Coords&) = default;

 private:
  std::vector<double> values_;
};

/// Position in the base space. For pseudo spaces x^0 = c t.
using Point = Coords<struct PointTag>;
/// Tangent vector (dx, or a unit vector xi on the indicatrix).
using Direction = Coords<struct DirectionTag>;
/// Cotangent vector: generalized momenta or a field gradient dS.
using Covector = Coords<struct CovectorTag>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double euclidean_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// (+,-,...,-) quadratic form.
inline double minkowski_square(std::span<const double> a) {
  double q = a.empty() ? 0.0 : a[0] * a[0];
  for (std::size_t i = 1; i < a.size(); ++i) q -= a[i] * a[i];
  return q;
}

/// Diagonal of the flat metric with signature (+,-,...,-).
inline double minkowski_sign(std::size_t i) { return i == 0 ? 1.0 : -1.0; }

/// Dense row-major square matrix; dimensions here never exceed a handful.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
    data_.reserve(n_ * n_);
    for (const auto& row : rows)
      for (double v : row) data_.push_back(v);
    data_.resize(n_ * n_, 0.0);
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix minkowski(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = minkowski_sign(i);
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Determinant by partial-pivot LU on a copy.
inline double determinant(Matrix m) {
  const std::size_t n = m.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (m(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m(c, k), m(piv, k));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      for (std::size_t k = c; k < n; ++k) m(r, k) -= f * m(c, k);
    }
  }
  return det;
}

/// Gauss-Jordan inverse with partial pivoting; returns false if singular.
inline bool invert(const Matrix& a, Matrix& out) {
  const std::size_t n = a.size();
  Matrix m = a;
  out = Matrix::identity(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (std::abs(m(piv, c)) <= 1e-14 * scale) return false;
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(m(c, k), m(piv, k));
      std::swap(out(c, k), out(piv, k));
    }
    const double inv = 1.0 / m(c, c);
    for (std::size_t k = 0; k < n; ++k) {
      m(c, k) *= inv;
      out(c, k) *= inv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m(r, c);
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        m(r, k) -= f * m(c, k);
        out(r, k) -= f * out(c, k);
      }
    }
  }
  return true;
}

}  // namespace finsler
