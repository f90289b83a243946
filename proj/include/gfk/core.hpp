#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfk {

// Points and vectors in R^1 or R^2. One-dimensional code only reads [0];
// the second slot stays zero.
using Point = std::array<double, 2>;
using Vec = std::array<double, 2>;
using Mat = std::array<std::array<double, 2>, 2>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Anything numerical that could not reach its target accuracy.
struct NumericalError : std::runtime_error {
  double estimate = 0.0;
  NumericalError(const std::string& what, double est = 0.0)
      : std::runtime_error(what), estimate(est) {}
};

struct SchemaError : std::runtime_error {
  std::string pointer;
  SchemaError(std::string ptr, const std::string& what)
      : std::runtime_error(ptr + ": " + what), pointer(std::move(ptr)) {}
};

struct Box {
  int dim = 1;
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};

  static Box interval(double a, double b) { return Box{1, {a, 0.0}, {b, 0.0}}; }
  static Box rect(double a0, double b0, double a1, double b1) {
    return Box{2, {a0, a1}, {b0, b1}};
  }

  bool contains(const Point& p) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
  Point center() const {
    return {0.5 * (lo[0] + hi[0]), dim > 1 ? 0.5 * (lo[1] + hi[1]) : 0.0};
  }
  double width(int i) const { return hi[i] - lo[i]; }
  double max_width() const {
    return dim == 1 ? width(0) : std::max(width(0), width(1));
  }
  Box inflated(double frac) const {
    Box b = *this;
    for (int i = 0; i < dim; ++i) {
      double w = frac * width(i);
      b.lo[i] -= w;
      b.hi[i] += w;
    }
    return b;
  }
  bool empty() const {
    for (int i = 0; i < dim; ++i)
      if (!(hi[i] > lo[i])) return true;
    return false;
  }
};

inline Box intersect(const Box& a, const Box& b) {
  Box r = a;
  for (int i = 0; i < a.dim; ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  return r;
}

inline Box hull(const Box& a, const Box& b) {
  Box r = a;
  for (int i = 0; i < a.dim; ++i) {
    r.lo[i] = std::min(a.lo[i], b.lo[i]);
    r.hi[i] = std::max(a.hi[i], b.hi[i]);
  }
  return r;
}

inline double dot(const Vec& a, const Vec& b, int dim) {
  return dim == 1 ? a[0] * b[0] : a[0] * b[0] + a[1] * b[1];
}

inline double norm(const Vec& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Point axpy(double a, const Vec& x, const Point& y) {
  return {y[0] + a * x[0], y[1] + a * x[1]};
}

// Multi-index with |alpha| small; used for moments and partial derivatives.
struct MultiIndex {
  std::array<int, 2> a{0, 0};
  int order() const { return a[0] + a[1]; }
  bool operator<(const MultiIndex& o) const { return a < o.a; }
  bool operator==(const MultiIndex& o) const { return a == o.a; }
};

// All multi-indices with lo <= |alpha| <= hi in the given dimension, graded
// then lexicographic (reversed in the first slot, so x^2 comes before xy).
inline std::vector<MultiIndex> multi_indices(int dim, int lo, int hi) {
  std::vector<MultiIndex> out;
  for (int k = lo; k <= hi; ++k) {
    if (dim == 1) {
      out.push_back({{k, 0}});
    } else {
      for (int i = k; i >= 0; --i) out.push_back({{i, k - i}});
    }
  }
  return out;
}

inline double monomial(const Point& y, const MultiIndex& al, int dim) {
  double v = 1.0;
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < al.a[i]; ++k) v *= y[i];
  return v;
}

// exp(-1/t) for t > 0, else 0. Building block for every smooth cutoff here.
inline double smooth_edge(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

inline double smooth_edge_d(double t) {
  return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0;
}

// Smooth step: 0 for t <= 0, 1 for t >= 1.
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = smooth_edge(t), b = smooth_edge(1.0 - t);
  return a / (a + b);
}

inline double smoothstep_d(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double a = smooth_edge(t), b = smooth_edge(1.0 - t);
  double da = smooth_edge_d(t), db = -smooth_edge_d(1.0 - t);
  double s = a + b;
  return (da * s - a * (da + db)) / (s * s);
}

// Plateau function of one variable: 1 on |t| <= inner, 0 on |t| >= outer.
inline double plateau(double t, double inner, double outer) {
  return 1.0 - smoothstep((std::abs(t) - inner) / (outer - inner));
}

inline double plateau_d(double t, double inner, double outer) {
  double s = t < 0 ? -1.0 : 1.0;
  return -smoothstep_d((std::abs(t) - inner) / (outer - inner)) * s / (outer - inner);
}

}  // namespace gfk
