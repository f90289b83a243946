#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "gfk/core.hpp"

namespace gfk {

using ScalarFn = std::function<double(const Point&)>;

// 8-point Gauss-Legendre on [-1,1]; Boost stores the non-negative half.
struct GaussRule {
  std::array<double, 4> x{};
  std::array<double, 4> w{};
  GaussRule() {
    using G = boost::math::quadrature::gauss<double, 8>;
    const auto& a = G::abscissa();
    const auto& ww = G::weights();
    for (int i = 0; i < 4; ++i) {
      x[i] = a[i];
      w[i] = ww[i];
    }
  }
};

inline const GaussRule& gauss8() {
  static const GaussRule r;
  return r;
}

// Node offsets from the box center along one axis together with weights,
// for `panels` equal panels (panels even). Only offsets d > 0 are returned;
// the caller evaluates at c + d and c - d, which makes every odd moment of
// an even integrand cancel exactly.
inline void half_nodes(double half_width, int panels, std::vector<double>& d,
                       std::vector<double>& w) {
  const auto& g = gauss8();
  int half = panels / 2;
  double h = half_width / half;
  d.clear();
  w.clear();
  for (int p = 0; p < half; ++p) {
    double mid = (p + 0.5) * h;
    for (int i = 0; i < 4; ++i) {
      if (g.x[i] == 0.0) continue;
      d.push_back(mid + 0.5 * h * g.x[i]);
      w.push_back(0.5 * h * g.w[i]);
      d.push_back(mid - 0.5 * h * g.x[i]);
      w.push_back(0.5 * h * g.w[i]);
    }
  }
}

// Composite Gauss-Legendre on a box with mirrored summation.
template <class F>
double native_integrate(const F& f, const Box& box, int panels) {
  if (panels % 2) ++panels;
  Point c = box.center();
  std::vector<double> d0, w0;
  half_nodes(0.5 * box.width(0), panels, d0, w0);
  if (box.dim == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < d0.size(); ++i)
      s += w0[i] * (f(Point{c[0] + d0[i], 0.0}) + f(Point{c[0] - d0[i], 0.0}));
    return s;
  }
  std::vector<double> d1, w1;
  half_nodes(0.5 * box.width(1), panels, d1, w1);
  double s = 0.0;
  for (std::size_t i = 0; i < d0.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d1.size(); ++j) {
      double q = f(Point{c[0] + d0[i], c[1] + d1[j]}) + f(Point{c[0] - d0[i], c[1] + d1[j]}) +
                 f(Point{c[0] + d0[i], c[1] - d1[j]}) + f(Point{c[0] - d0[i], c[1] - d1[j]});
      row += w1[j] * q;
    }
    s += w0[i] * row;
  }
  return s;
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

struct QuadratureError : NumericalError {
  using NumericalError::NumericalError;
};

// Panel-doubling composite Gauss-Legendre. The error estimate is the change
// between successive doublings, which overestimates the error of the finer
// value by a wide margin for smooth integrands.
inline QuadResult integrate(const ScalarFn& f, const Box& box, double tol = 1e-12,
                            int start_panels = 4) {
  if (tol < 1e-13) throw DomainError("integrate: tol below 1e-13");
  const int cap = box.dim == 1 ? 8192 : 256;
  int p = std::max(2, start_panels + (start_panels % 2));
  double prev = native_integrate(f, box, p);
  while (true) {
    int q = 2 * p;
    double cur = native_integrate(f, box, q);
    double err = std::abs(cur - prev);
    if (err <= tol) return {cur, err, q};
    if (q >= cap) {
      throw QuadratureError("integrate: no convergence at panel cap " + std::to_string(cap) +
                                ", best estimate error " + std::to_string(err),
                            err);
    }
    prev = cur;
    p = q;
  }
}

// One-dimensional composite rule with forced breakpoints; used for integrands
// with features at known locations and width.
inline double integrate_breaks(const std::function<double(double)>& f, double a, double b,
                               std::vector<double> breaks, int panels_per_piece) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double lo = std::max(a, breaks[i]), hi = std::min(b, breaks[i + 1]);
    if (!(hi > lo)) continue;
    s += native_integrate([&](const Point& y) { return f(y[0]); }, Box::interval(lo, hi),
                          panels_per_piece);
  }
  return s;
}

}  // namespace gfk
