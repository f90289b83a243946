#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "gfk/core.hpp"

namespace gfk {

// Strictly increasing smooth map of one variable with two derivatives and an
// inverse.
struct AxisMap {
  std::function<double(double)> f, df, d2f, inv;

  static AxisMap identity() {
    return {[](double t) { return t; }, [](double) { return 1.0; },
            [](double) { return 0.0; }, [](double y) { return y; }};
  }

  static AxisMap affine(double a, double b) {
    if (!(a > 0.0)) throw DomainError("affine axis map must be increasing");
    return {[=](double t) { return a * t + b; }, [=](double) { return a; },
            [](double) { return 0.0; }, [=](double y) { return (y - b) / a; }};
  }

  // t + w*s*sin((t - lo)/s). Fixes lo + k*pi*s, so with s = (hi-lo)/(2pi) it
  // maps (lo,hi) onto itself. Increasing iff |w| < 1.
  static AxisMap warp(double lo, double s, double w) {
    if (!(std::abs(w) < 1.0)) throw DomainError("warp amplitude must satisfy |w| < 1");
    if (w == 0.0) return identity();
    AxisMap m;
    m.f = [=](double t) { return t + w * s * std::sin((t - lo) / s); };
    m.df = [=](double t) { return 1.0 + w * std::cos((t - lo) / s); };
    m.d2f = [=](double t) { return -w / s * std::sin((t - lo) / s); };
    auto f = m.f;
    auto df = m.df;
    m.inv = [=](double y) {
      // Safeguarded Newton; |f(t) - t| <= |w| s brackets the root.
      double a = y - std::abs(w) * s, b = y + std::abs(w) * s;
      double t = y;
      for (int it = 0; it < 100; ++it) {
        double g = f(t) - y;
        if (g > 0) b = t; else a = t;
        double next = t - g / df(t);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - t) <= 4e-16 * std::max(1.0, std::abs(t))) return next;
        t = next;
      }
      return t;
    };
    return m;
  }

  static AxisMap compose(const AxisMap& g, const AxisMap& h) {
    AxisMap m;
    m.f = [=](double t) { return g.f(h.f(t)); };
    m.df = [=](double t) { return g.df(h.f(t)) * h.df(t); };
    m.d2f = [=](double t) {
      double a = h.df(t);
      return g.d2f(h.f(t)) * a * a + g.df(h.f(t)) * h.d2f(t);
    };
    m.inv = [=](double y) { return h.inv(g.inv(y)); };
    return m;
  }

  AxisMap inverse() const {
    AxisMap m;
    auto f0 = f, df0 = df, d2f0 = d2f, inv0 = inv;
    m.f = inv0;
    m.inv = f0;
    m.df = [=](double y) { return 1.0 / df0(inv0(y)); };
    m.d2f = [=](double y) {
      double t = inv0(y), a = df0(t);
      return -d2f0(t) / (a * a * a);
    };
    return m;
  }
};

// Orientation-preserving diffeomorphism of product type between open subsets
// of R^n, n <= 2. Every map this library needs (chart maps, transitions, the
// sample diffeomorphisms) is a product of increasing axis maps.
class Diffeo {
 public:
  Diffeo() = default;
  explicit Diffeo(std::vector<AxisMap> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 2) throw DomainError("Diffeo: dimension must be 1 or 2");
  }
  static Diffeo identity(int dim) { return Diffeo(std::vector<AxisMap>(dim, AxisMap::identity())); }

  int dim() const { return static_cast<int>(axes_.size()); }
  const AxisMap& axis(int i) const { return axes_[i]; }

  Point operator()(const Point& x) const {
    Point y{0.0, 0.0};
    for (int i = 0; i < dim(); ++i) y[i] = axes_[i].f(x[i]);
    return y;
  }
  Point inv(const Point& y) const {
    Point x{0.0, 0.0};
    for (int i = 0; i < dim(); ++i) x[i] = axes_[i].inv(y[i]);
    return x;
  }
  // Diagonal of the Jacobian.
  Vec jac_diag(const Point& x) const {
    Vec d{1.0, 1.0};
    for (int i = 0; i < dim(); ++i) d[i] = axes_[i].df(x[i]);
    return d;
  }
  double det(const Point& x) const {
    Vec d = jac_diag(x);
    return dim() == 1 ? d[0] : d[0] * d[1];
  }
  Vec det_grad(const Point& x) const {
    if (dim() == 1) return {axes_[0].d2f(x[0]), 0.0};
    Vec d = jac_diag(x);
    return {axes_[0].d2f(x[0]) * d[1], axes_[1].d2f(x[1]) * d[0]};
  }
  Box image(const Box& b) const {
    Box r = b;
    for (int i = 0; i < dim(); ++i) {
      r.lo[i] = axes_[i].f(b.lo[i]);
      r.hi[i] = axes_[i].f(b.hi[i]);
    }
    return r;
  }
  Box preimage(const Box& b) const {
    Box r = b;
    for (int i = 0; i < dim(); ++i) {
      r.lo[i] = axes_[i].inv(b.lo[i]);
      r.hi[i] = axes_[i].inv(b.hi[i]);
    }
    return r;
  }

  Diffeo inverse() const {
    std::vector<AxisMap> a;
    for (const auto& m : axes_) a.push_back(m.inverse());
    return Diffeo(std::move(a));
  }
  // (*this) o other
  Diffeo after(const Diffeo& other) const {
    std::vector<AxisMap> a;
    for (int i = 0; i < dim(); ++i) a.push_back(AxisMap::compose(axes_[i], other.axes_[i]));
    return Diffeo(std::move(a));
  }

 private:
  std::vector<AxisMap> axes_;
};

}  // namespace gfk
