#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

#include "finsler_lab/error.hpp"

namespace finsler {

template <std::size_t N>
using State = std::array<double, N>;

/// Step-size controller settings for the Dormand-Prince pair.
struct StepControl {
  double safety = 0.9;
  /// PI stabilisation exponent; 0 gives the plain I controller.
  double beta = 0.04;
  double max_growth = 10.0;
  double max_shrink = 0.2;
  double initial_step = 0.0;  // 0: chosen from the tolerance
  double min_step = 1e-14;
  std::size_t max_steps = 200000;
};

/// One accepted step with its quartic continuous extension (Hairer's DOPRI5
/// dense output). Valid on [t0, t_end], where t_end <= t0 + h when the step
/// was truncated at an event.
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  double t_end = 0.0;
  std::array<State<N>, 5> rc{};

  State<N> value(double t) const {
    const double th = (t - t0) / h, th1 = 1.0 - th;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    return y;
  }

  State<N> derivative(double t) const {
    const double th = (t - t0) / h, th1 = 1.0 - th;
    State<N> d;
    for (std::size_t i = 0; i < N; ++i) {
      const double c = rc[3][i] + th1 * rc[4][i];
      const double dc = -rc[4][i];
      const double b = rc[2][i] + th * c;
      const double db = c + th * dc;
      const double a = rc[1][i] + th1 * b;
      const double da = -b + th1 * db;
      d[i] = (a + th * da) / h;
    }
    return d;
  }
};

template <std::size_t N>
struct OdeRun {
  std::vector<DenseSegment<N>> segments;
  std::vector<double> t;        // accepted node times, starting with t0
  std::vector<State<N>> y;      // accepted node states
  std::size_t rejected = 0;
  bool stopped_by_event = false;
};

namespace detail::dp5 {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace detail::dp5

/// Dormand-Prince 5(4) with PI step control and dense output, from t0 to
/// t_end (t_end > t0).
///
/// `event(t, y)` returns a signed quantity; when it turns negative at the end
/// of an accepted step the crossing is located on the dense output by
/// bisection and integration stops there. Steps whose stages produce
/// non-finite derivatives are rejected and retried smaller.
template <std::size_t N, class Rhs, class Event>
OdeRun<N> integrate_dp5(Rhs&& f, double t0, State<N> y0, double t_end, double rtol, double atol,
                        const StepControl& ctl, Event&& event) {
  using namespace detail::dp5;
  OdeRun<N> run;
  run.t.push_back(t0);
  run.y.push_back(y0);

  auto combo = [](const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (const auto& [c, k] : terms)
      for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    return out;
  };
  auto finite = [](const State<N>& s) {
    return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
  };

  double t = t0;
  State<N> y = y0;
  State<N> k1 = f(t, y);
  require(finite(k1), ErrorCode::InvalidArgument, "non-finite derivative at the initial point");

  double h = ctl.initial_step;
  if (h <= 0.0) {
    double scale = 0.0, dnorm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = atol + rtol * std::abs(y[i]);
      scale += (y[i] / sc) * (y[i] / sc);
      dnorm += (k1[i] / sc) * (k1[i] / sc);
    }
    h = (scale < 1e-10 || dnorm < 1e-10) ? 1e-6 : 0.01 * std::sqrt(scale / dnorm);
    h = std::min(h, t_end - t0);
  }
  double facold = 1e-4;
  const double expo1 = 0.2 - ctl.beta * 0.75;

  for (std::size_t step = 0; t < t_end; ++step) {
    require(step < ctl.max_steps, ErrorCode::ToleranceNotMet, "step budget exhausted");
    require(h >= ctl.min_step * std::max(1.0, std::abs(t)), ErrorCode::ToleranceNotMet, "step size underflow");
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }
    const State<N> k2 = f(t + c2 * h, combo(y, h, {{a21, &k1}}));
    const State<N> k3 = f(t + c3 * h, combo(y, h, {{a31, &k1}, {a32, &k2}}));
    const State<N> k4 = f(t + c4 * h, combo(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State<N> k5 = f(t + c5 * h, combo(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State<N> k6 = f(t + h, combo(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State<N> y1 = combo(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const State<N> k7 = f(t + h, y1);

    double err = 0.0;
    bool ok = finite(k2) && finite(k3) && finite(k4) && finite(k5) && finite(k6) && finite(k7) && finite(y1);
    if (ok) {
      for (std::size_t i = 0; i < N; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / double(N));
      ok = std::isfinite(err);
    }
    if (!ok) {
      h *= 0.25;
      ++run.rejected;
      continue;
    }

    const double fac11 = std::pow(std::max(err, 1e-300), expo1);
    if (err > 1.0) {
      h /= std::min(1.0 / ctl.max_shrink, fac11 / ctl.safety);
      ++run.rejected;
      continue;
    }

    DenseSegment<N> seg;
    seg.t0 = t;
    seg.h = h;
    seg.t_end = t + h;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      seg.rc[0][i] = y[i];
      seg.rc[1][i] = ydiff;
      seg.rc[2][i] = bspl;
      seg.rc[3][i] = ydiff - h * k7[i] - bspl;
      seg.rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }

    if (event(t + h, y1) < 0.0) {
      // Bisection on the continuous extension for the sign change.
      double lo = t, hi = t + h;
      for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::abs(hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (event(mid, seg.value(mid)) < 0.0 ? hi : lo) = mid;
      }
      seg.t_end = lo;
      run.segments.push_back(seg);
      run.t.push_back(lo);
      run.y.push_back(seg.value(lo));
      run.stopped_by_event = true;
      return run;
    }

    run.segments.push_back(seg);
    run.t.push_back(t + h);
    run.y.push_back(y1);
    t = last ? t_end : t + h;
    y = y1;
    k1 = k7;
    double fac = fac11 / std::pow(facold, ctl.beta);
    fac = std::clamp(fac / ctl.safety, 1.0 / ctl.max_growth, 1.0 / ctl.max_shrink);
    facold = std::max(err, 1e-4);
    h /= fac;
  }
  return run;
}

/// Locates the segment containing t (segments sorted by t0).
template <std::size_t N>
const DenseSegment<N>& find_segment(const std::vector<DenseSegment<N>>& segs, double t) {
  auto it = std::upper_bound(segs.begin(), segs.end(), t,
                             [](double v, const DenseSegment<N>& s) { return v < s.t0; });
  if (it != segs.begin()) --it;
  return *it;
}

}  // namespace finsler
