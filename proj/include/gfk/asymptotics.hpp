#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "gfk/core.hpp"

namespace gfk {

inline constexpr double kSlack = 0.25;
inline constexpr double kMinR2 = 0.98;
// Largest log-range of a fit window that still counts as flat.
inline constexpr double kFlatWindow = 1e-3;

struct EpsilonLadder {
  double eps0 = 0.25;
  double ratio = 0.5;
  int length = 12;

  EpsilonLadder() = default;
  EpsilonLadder(double e0, double r, int len) : eps0(e0), ratio(r), length(len) {
    if (!(e0 > 0.0 && e0 <= 1.0)) throw DomainError("ladder: eps0 must lie in (0,1]");
    if (!(r > 0.0 && r < 1.0)) throw DomainError("ladder: ratio must lie in (0,1)");
    if (len < 2) throw DomainError("ladder: length must be at least 2");
  }

  std::vector<double> values() const {
    std::vector<double> e(length);
    for (int i = 0; i < length; ++i) e[i] = eps0 * std::pow(ratio, i);
    return e;
  }
  double smallest() const { return eps0 * std::pow(ratio, length - 1); }
};

struct AsymptoticEstimate {
  double order = 0.0;     // +inf when floor_hit
  double r2 = 1.0;
  bool r2_defined = true;
  bool floor_hit = false;
  int window_lo = 0;      // index range [lo, hi) of the ladder used
  int window_hi = 0;
  int used = 0;           // points in the window above the floor
};

// Least-squares slope of log|v| against log eps over the smallest-eps window.
// Points at or below `floor` count as exact zeros and are dropped; if all of
// them are dropped the order is +inf.
inline AsymptoticEstimate estimate_order(const std::vector<double>& eps,
                                         const std::vector<double>& vals, int window = 8,
                                         double floor = 1e-300) {
  if (eps.size() != vals.size()) throw DomainError("estimate_order: size mismatch");
  const int n = static_cast<int>(eps.size());
  if (n < 6) throw DomainError("estimate_order: need at least 6 samples");
  const double r0 = eps[1] / eps[0];
  for (int i = 1; i < n; ++i) {
    double r = eps[i] / eps[i - 1];
    if (!(r < 1.0) || std::abs(r - r0) > 1e-9 * r0)
      throw DomainError("estimate_order: ladder is not geometric and decreasing");
  }
  AsymptoticEstimate est;
  est.window_hi = n;
  est.window_lo = std::max(0, n - window);
  std::vector<double> lx, ly;
  for (int i = est.window_lo; i < n; ++i) {
    double a = std::abs(vals[i]);
    if (!std::isfinite(a)) throw NumericalError("estimate_order: non-finite sample");
    if (a <= floor) continue;
    lx.push_back(std::log(eps[i]));
    ly.push_back(std::log(a));
  }
  est.used = static_cast<int>(lx.size());
  if (lx.size() < 2) {
    est.floor_hit = true;
    est.order = kInf;
    est.r2_defined = false;
    est.r2 = 0.0;
    return est;
  }
  if (static_cast<int>(lx.size()) < est.window_hi - est.window_lo) est.floor_hit = true;
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  est.order = sxy / sxx;
  // A line through every point up to rounding (a constant sequence, or one
  // carrying only difference-quotient noise) is an exact fit even when syy
  // is too small for r2 to mean anything.
  double ssres = std::max(0.0, syy - est.order * sxy);
  // A window whose values vary by less than 0.1% is flat whatever its shape
  // (e.g. C + a eps^p settling on its limit); its slope is bounded by
  // 1e-3 / log-width, far inside the slack.
  auto [ylo, yhi] = std::minmax_element(ly.begin(), ly.end());
  if (syy <= 1e-28 * std::max(1.0, my * my) || ssres <= 1e-12 * m || *yhi - *ylo <= kFlatWindow) {
    est.r2 = 1.0;
  } else {
    est.r2 = std::clamp(1.0 - ssres / syy, 0.0, 1.0);
  }
  return est;
}

inline AsymptoticEstimate estimate_order(const EpsilonLadder& lad, const std::vector<double>& v,
                                         int window = 8, double floor = 1e-300) {
  return estimate_order(lad.values(), v, window, floor);
}

// "value = O(eps^s)" under the slack rule. A window that partly fell below the
// floor still has to show the required slope on its remaining points.
inline bool big_o_holds(const AsymptoticEstimate& e, double s, double slack = kSlack) {
  if (e.floor_hit && !std::isfinite(e.order)) return true;
  return e.order >= s - slack && e.r2 >= kMinR2;
}

// Smallest integer N with the fitted order compatible with O(eps^-N).
inline int moderate_exponent(double order, double slack = kSlack) {
  if (!std::isfinite(order)) return 0;
  return static_cast<int>(std::ceil(std::max(0.0, -order - slack)));
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct TraceRow {
  double eps;
  double value;
  std::string tag;
};

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "eps,value,tag\n";
  for (const auto& r : rows) os << format_double(r.eps) << ',' << format_double(r.value) << ',' << r.tag << '\n';
}

}  // namespace gfk
