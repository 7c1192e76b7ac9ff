#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "finsler_lab/core_geometry.hpp"
#include "finsler_lab/error.hpp"
#include "finsler_lab/ode.hpp"
#include "finsler_lab/series.hpp"

namespace finsler {

/// Below this xi the solution is taken from the power series; phi_rhs has a
/// removable singularity at xi = 0.
inline constexpr double kSeriesSwitchXi = 1e-3;
/// Integration stops once 1 - 3 phi^2 falls below this.
inline constexpr double kSingularEpsilon = 1e-6;
/// Below this value of 1 - 3 phi^2 the solver changes its independent
/// variable from xi to phi, where d xi / d phi stays regular.
inline constexpr double kPhiParameterSwitch = 1e-2;
inline constexpr std::size_t kBootstrapOrder = 11;

/// Right side of  xi (1 - 3 phi^2) phi' + 2 phi (1 - phi^2) - 3 xi (1 - phi^2)^2 = 0
/// solved for phi'.
inline double phi_rhs(double xi, double phi) {
  require(xi != 0.0, ErrorCode::OriginSingularity, "phi_rhs is singular at xi = 0");
  const double u = 1.0 - 3.0 * phi * phi;
  require(std::abs(u) >= kSingularEpsilon, ErrorCode::SingularDenominator, "1 - 3 phi^2 vanishes");
  const double w = 1.0 - phi * phi;
  return (3.0 * xi * w * w - 2.0 * phi * w) / (xi * u);
}

/// Flux form  d/dxi[xi^2 phi (1 - phi^2)] - 3 xi^2 (1 - phi^2)^2  for given phi, phi'.
inline double cosmo_flux_residual(double xi, double phi, double dphi) {
  const double w = 1.0 - phi * phi;
  return 2.0 * xi * phi * w + xi * xi * dphi * (1.0 - 3.0 * phi * phi) - 3.0 * xi * xi * w * w;
}

struct CosmoParameters {
  /// Inverse length; xi = gamma r.
  double gamma = 1.0;
  double S0 = 1.0;
  double c = 1.0;

  double H0() const { return c * gamma; }
};

/// Numerical solution phi(xi) from 0 up to min(xi_max, singular_xi). Immutable
/// once built; all queries are const.
class CosmoSolution {
 public:
  struct Node {
    double xi;
    double phi;
    double integral;  // int_0^xi phi
  };

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const CosmoParameters& parameters() const noexcept { return params_; }
  const SeriesExpansion& series() const noexcept { return series_; }
  std::optional<double> singular_xi() const noexcept { return singular_xi_; }
  /// Largest xi the solution covers.
  double xi_end() const noexcept { return nodes_.back().xi; }
  double residual_norm() const noexcept { return residual_norm_; }
  double rel_tol() const noexcept { return rel_tol_; }
  std::size_t rejected_steps() const noexcept { return rejected_; }

  double phi(double xi) const { return evaluate(xi).phi; }
  double dphi(double xi) const { return evaluate(xi).dphi; }
  double phi_integral(double xi) const { return evaluate(xi).integral; }

  /// phi(xi) / xi with the xi -> 0 limit 1.
  double phi_over_xi(double xi) const {
    check_range(xi);
    if (xi <= kSeriesSwitchXi) return series_.value_over_xi(xi);
    return phi(xi) / xi;
  }

  ScalarProfile profile() const {
    auto self = std::make_shared<const CosmoSolution>(*this);
    return {[self](double xi) { return self->phi(xi); }, [self](double xi) { return self->dphi(xi); },
            [self](double xi) { return self->phi_integral(xi); }};
  }

 private:
  friend CosmoSolution integrate_phi(double, double, const StepControl&, const CosmoParameters&);

  struct Eval {
    double phi, dphi, integral;
  };

  void check_range(double xi) const {
    require(xi >= 0.0 && xi <= xi_end() * (1.0 + 1e-15), ErrorCode::OutOfRange,
            "xi outside the resolved range [0, " + std::to_string(xi_end()) + "]");
  }

  Eval evaluate(double xi) const {
    check_range(xi);
    xi = std::min(xi, xi_end());
    if (xi <= kSeriesSwitchXi) return {series_.value(xi), series_.derivative(xi), series_.integral(xi)};
    if (xi < xi_phase1_end_ || phase2_.empty()) {
      const auto& seg = find_segment(phase1_, xi);
      const State<2> y = seg.value(xi), d = seg.derivative(xi);
      return {y[0], d[0], y[1]};
    }
    // Phase 2 stores xi(phi), I(phi); invert on the segment that brackets xi.
    auto it = std::find_if(phase2_.begin(), phase2_.end(),
                           [xi](const DenseSegment<2>& s) { return s.value(s.t_end)[0] >= xi; });
    if (it == phase2_.end()) it = std::prev(phase2_.end());
    double lo = it->t0, hi = it->t_end;
    for (int k = 0; k < 200 && hi - lo > 1e-16; ++k) {
      const double mid = 0.5 * (lo + hi);
      (it->value(mid)[0] < xi ? lo : hi) = mid;
    }
    const double p = 0.5 * (lo + hi);
    const State<2> y = it->value(p), d = it->derivative(p);
    return {p, 1.0 / d[0], y[1]};
  }

  CosmoParameters params_;
  SeriesExpansion series_;
  std::vector<Node> nodes_;
  std::vector<DenseSegment<2>> phase1_;  // t = xi, y = (phi, I)
  std::vector<DenseSegment<2>> phase2_;  // t = phi, y = (xi, I)
  double xi_phase1_end_ = 0.0;
  std::optional<double> singular_xi_;
  double residual_norm_ = 0.0;
  double rel_tol_ = 0.0;
  std::size_t rejected_ = 0;
};

/// Integrates phi from the series bootstrap at xi = 1e-3 with DOPRI5.
///
/// Near the singular set the solution has a vertical tangent, so once
/// 1 - 3 phi^2 < 1e-2 the solver switches to phi as the independent variable
/// and stops exactly where 1 - 3 phi^2 = 1e-6, recording singular_xi.
inline CosmoSolution integrate_phi(double xi_max, double rel_tol, const StepControl& control = {},
                                   const CosmoParameters& params = {}) {
  require(xi_max > 0.0, ErrorCode::InvalidArgument, "xi_max must be positive");
  require(rel_tol >= 1e-13 && rel_tol <= 1e-3, ErrorCode::InvalidArgument, "rel_tol must lie in [1e-13, 1e-3]");
  require(params.gamma > 0.0 && params.c > 0.0, ErrorCode::InvalidArgument, "gamma and c must be positive");
  require(params.S0 > 0.0, ErrorCode::NonpositiveKappa, "S0 must be positive so that kappa > 0");

  CosmoSolution sol;
  sol.params_ = params;
  sol.rel_tol_ = rel_tol;
  sol.series_ = phi_series(kBootstrapOrder);
  sol.nodes_.push_back({0.0, 0.0, 0.0});

  const double xs = std::min(kSeriesSwitchXi, xi_max);
  sol.nodes_.push_back({xs, sol.series_.value(xs), sol.series_.integral(xs)});
  sol.xi_phase1_end_ = xs;
  const double atol = rel_tol;

  if (xi_max > xs) {
    auto rhs_xi = [](double xi, const State<2>& y) -> State<2> {
      const double u = 1.0 - 3.0 * y[0] * y[0];
      if (u <= 0.0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
      const double w = 1.0 - y[0] * y[0];
      return {(3.0 * xi * w * w - 2.0 * y[0] * w) / (xi * u), y[0]};
    };
    auto near_singular = [](double, const State<2>& y) { return (1.0 - 3.0 * y[0] * y[0]) - kPhiParameterSwitch; };
    const OdeRun<2> run = integrate_dp5<2>(rhs_xi, xs, State<2>{sol.nodes_.back().phi, sol.nodes_.back().integral},
                                           xi_max, rel_tol, atol, control, near_singular);
    sol.rejected_ += run.rejected;
    sol.phase1_ = run.segments;
    for (std::size_t k = 1; k < run.t.size(); ++k) sol.nodes_.push_back({run.t[k], run.y[k][0], run.y[k][1]});
    sol.xi_phase1_end_ = run.t.back();

    if (run.stopped_by_event) {
      const CosmoSolution::Node start = sol.nodes_.back();
      const double phi_stop = std::sqrt((1.0 - kSingularEpsilon) / 3.0);
      auto rhs_phi = [](double phi, const State<2>& y) -> State<2> {
        const double xi = y[0];
        const double w = 1.0 - phi * phi;
        const double dxi = xi * (1.0 - 3.0 * phi * phi) / (3.0 * xi * w * w - 2.0 * phi * w);
        return {dxi, phi * dxi};
      };
      auto past_xi_max = [xi_max](double, const State<2>& y) { return xi_max - y[0]; };
      const OdeRun<2> run2 = integrate_dp5<2>(rhs_phi, start.phi, State<2>{start.xi, start.integral}, phi_stop,
                                              rel_tol, atol, control, past_xi_max);
      sol.rejected_ += run2.rejected;
      sol.phase2_ = run2.segments;
      for (std::size_t k = 1; k < run2.t.size(); ++k) sol.nodes_.push_back({run2.y[k][0], run2.t[k], run2.y[k][1]});
      if (!run2.stopped_by_event) sol.singular_xi_ = run2.y.back()[0];
    }
  }

  double worst = 0.0;
  for (const auto& n : sol.nodes_) {
    if (n.xi == 0.0) continue;
    const double psi = std::exp(n.integral);
    const CosmoSolution::Eval e = sol.evaluate(n.xi);
    worst = std::max(worst, psi * psi * psi * std::abs(cosmo_flux_residual(n.xi, e.phi, e.dphi)));
  }
  sol.residual_norm_ = worst;
  return sol;
}

/// Flux-form field-equation residual of the integrated solution at xi, using
/// the dense output for phi and phi'.
inline double cosmo_field_residual(const CosmoSolution& sol, double xi) {
  return cosmo_flux_residual(xi, sol.phi(xi), sol.dphi(xi));
}

struct PsiField {
  double psi;
  double S;
  double kappa;
};

/// psi = exp(int_0^{gamma r} phi), S = S0 exp(-gamma x0) psi,
/// kappa = gamma sqrt(1 - phi^2) S.
inline PsiField psi_and_field(const CosmoSolution& sol, double x0, double r) {
  require(r >= 0.0, ErrorCode::OutOfRange, "r must be non-negative");
  const auto& p = sol.parameters();
  const double xi = p.gamma * r;
  const double psi = std::exp(sol.phi_integral(xi));
  const double S = p.S0 * std::exp(-p.gamma * x0) * psi;
  const double phi = sol.phi(xi);
  return {psi, S, p.gamma * std::sqrt(1.0 - phi * phi) * S};
}

/// H(r) = H0 phi(H0 r / c) / (H0 r / c); H(0) = H0.
inline double hubble(const CosmoSolution& sol, double r) {
  require(r >= 0.0, ErrorCode::OutOfRange, "r must be non-negative");
  const auto& p = sol.parameters();
  const double xi = p.H0() * r / p.c;
  if (xi == 0.0) return p.H0();
  return p.H0() * sol.phi_over_xi(xi);
}

/// Small-distance Hubble law H0 (1 - (H0 r / c)^2 / 5).
inline double hubble_quadratic(double H0, double c, double r) {
  const double xi = H0 * r / c;
  return H0 * (1.0 - xi * xi / 5.0);
}

/// Radial velocity dr/dt = c phi(gamma r); |dr/dt| < c on the resolved range.
inline double body_velocity(const CosmoSolution& sol, double r) {
  require(r >= 0.0, ErrorCode::OutOfRange, "r must be non-negative");
  const auto& p = sol.parameters();
  return p.c * sol.phi(p.gamma * r);
}

/// The World function S = S0 exp(-gamma x0) psi(r) as a field.
inline CosmoExp cosmo_field(const CosmoSolution& sol) {
  return CosmoExp{sol.parameters().S0, sol.parameters().gamma, sol.profile()};
}

/// kappa(x) = gamma sqrt(1 - phi^2) S at a 4-point (x0, x1, x2, x3).
inline double cosmo_kappa(const CosmoSolution& sol, const Point& x) {
  double r2 = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) r2 += x[i] * x[i];
  return psi_and_field(sol, x[0], std::sqrt(r2)).kappa;
}

}  // namespace finsler
