#pragma once

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace memcav::detail {

struct QuadratureTotals {
  double value = 0.0;
  double error = 0.0;
};

// Bisecting Gauss-Kronrod on [a, b] with a mixed absolute/relative stopping
// rule. Each panel is mapped onto [-1, 1] before the fixed rule is applied;
// Boost reports its error estimate in those mapped units.
template <unsigned Points, class F>
QuadratureTotals integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                                    unsigned max_depth) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto g = [&](double u) { return f(mid + half * u); };
  double err = 0.0;
  const double v =
      half * boost::math::quadrature::gauss_kronrod<double, Points>::integrate(g, -1.0, 1.0, 0, 0.0,
                                                                               &err);
  err *= std::abs(half);
  if (max_depth == 0 || err <= std::max(abs_tol, rel_tol * std::abs(v))) return {v, err};
  const QuadratureTotals l = integrate_adaptive<Points>(f, a, mid, 0.5 * abs_tol, rel_tol, max_depth - 1);
  const QuadratureTotals r = integrate_adaptive<Points>(f, mid, b, 0.5 * abs_tol, rel_tol, max_depth - 1);
  return {l.value + r.value, l.error + r.error};
}

}  // namespace memcav::detail
