#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "gfk/core.hpp"
#include "gfk/diffeo.hpp"
#include "gfk/functions.hpp"
#include "gfk/quadrature.hpp"
#include "gfk/test_function.hpp"

namespace gfk {

// L_X of a density phi d^n y: div(phi X) = grad phi . X + phi div X.
class LieDensityNode : public TFNode {
 public:
  LieDensityNode(NodePtr inner, LocalField X) : TFNode(inner->dim()), in_(std::move(inner)), X_(std::move(X)) {
    h_ = 1e-5 * in_->scale();
  }
  double eval(const Point& y) const override {
    if (!in_->box().contains(y)) return 0.0;
    return dot(in_->grad(y), X_(y), dim()) + in_->eval(y) * X_.div(y);
  }
  Vec grad(const Point& y) const override {
    Vec out{0, 0};
    for (int j = 0; j < dim(); ++j) {
      Point a = y, b = y;
      a[j] += h_;
      b[j] -= h_;
      out[j] = (eval(a) - eval(b)) / (2 * h_);
    }
    return out;
  }
  Box box() const override { return in_->box(); }
  int panels() const override { return in_->panels(); }
  double scale() const override { return in_->scale(); }
  double integrate(const ScalarFn& h) const override {
    return native_integrate([&](const Point& y) { return h(y) * eval(y); }, box(), 2 * panels());
  }

 private:
  NodePtr in_;
  LocalField X_;
  double h_;
};

inline TestFunction lie_density(const TestFunction& phi, const LocalField& X) {
  return TestFunction(std::make_shared<LieDensityNode>(phi.node(), X));
}

class LocalDistribution;
using DistPtr = std::shared_ptr<const LocalDistribution>;

// Distribution on an open box Omega in R^n, n <= 2.
class LocalDistribution {
 public:
  LocalDistribution(int dim, Box domain) : dim_(dim), domain_(domain) {}
  virtual ~LocalDistribution() = default;
  int dim() const { return dim_; }
  const Box& domain() const { return domain_; }

  double pair(const TestFunction& phi) const {
    if (phi.dim() != dim_) throw DomainError("pair: dimension mismatch");
    Box s = phi.support_box();
    for (int i = 0; i < dim_; ++i)
      if (!(s.lo[i] > domain_.lo[i] && s.hi[i] < domain_.hi[i]))
        throw DomainError("pair: test function support escapes the domain of " + describe());
    return pair_impl(phi);
  }
  virtual std::string describe() const = 0;
  // Points where the distribution is not smooth; used to refine sup grids.
  virtual std::vector<Point> singular_points() const { return {}; }

 protected:
  virtual double pair_impl(const TestFunction& phi) const = 0;

 private:
  int dim_;
  Box domain_;
};

inline Box whole_space(int dim) {
  return dim == 1 ? Box::interval(-kInf, kInf) : Box::rect(-kInf, kInf, -kInf, kInf);
}

class ZeroDist : public LocalDistribution {
 public:
  ZeroDist(int dim, Box dom) : LocalDistribution(dim, dom) {}
  std::string describe() const override { return "0"; }

 protected:
  double pair_impl(const TestFunction&) const override { return 0.0; }
};

class DeltaDist : public LocalDistribution {
 public:
  DeltaDist(int dim, Point a, Box dom) : LocalDistribution(dim, dom), a_(a) {}
  std::string describe() const override { return "delta"; }
  std::vector<Point> singular_points() const override { return {a_}; }
  const Point& at() const { return a_; }

 protected:
  double pair_impl(const TestFunction& phi) const override { return phi(a_); }

 private:
  Point a_;
};

// Integral of phi over [c, inf) by composite Gauss-Legendre on the clipped
// support; exact profile rule when the support lies entirely to the right.
inline double integrate_right_of(const TestFunction& phi, double c) {
  Box b = phi.support_box();
  if (c <= b.lo[0]) return phi.integral();
  if (c >= b.hi[0]) return 0.0;
  return native_integrate([&](const Point& y) { return phi(y); }, Box::interval(c, b.hi[0]),
                          2 * phi.node()->panels());
}

class HeavisideDist : public LocalDistribution {
 public:
  HeavisideDist(double c, Box dom) : LocalDistribution(1, dom), c_(c) {}
  std::string describe() const override { return "heaviside"; }
  std::vector<Point> singular_points() const override { return {Point{c_, 0}}; }
  double jump() const { return c_; }

 protected:
  double pair_impl(const TestFunction& phi) const override { return integrate_right_of(phi, c_); }

 private:
  double c_;
};

// Principal value of 1/x: int_0^inf (phi(x) - phi(-x))/x dx. The even
// integrand g(x) = (phi(x) - phi(-x))/x loses digits to cancellation near 0,
// so on [0, h] it is replaced by g(0) + g2 x^2 with g(0) = 2 phi'(0) and g2
// matched at x = h; h is 1e-3 of the test function's scale.
class PrincipalValueDist : public LocalDistribution {
 public:
  explicit PrincipalValueDist(Box dom) : LocalDistribution(1, dom) {}
  std::string describe() const override { return "pv_inv_x"; }
  std::vector<Point> singular_points() const override { return {Point{0, 0}}; }

 protected:
  double pair_impl(const TestFunction& phi) const override {
    Box b = phi.support_box();
    double R = std::max(std::abs(b.lo[0]), std::abs(b.hi[0]));
    if (R == 0.0) return 0.0;
    double h = 1e-3 * phi.node()->scale();
    auto g = [&](double x) { return (phi(x) - phi(-x)) / x; };
    double g0 = 2.0 * phi.grad(Point{0, 0})[0];
    double g2 = (g(h) - g0) / (h * h);
    double inner = g0 * h + g2 * h * h * h / 3.0;
    if (R <= h) return inner;
    std::vector<double> br;
    for (double e : {b.lo[0], b.hi[0], -b.lo[0], -b.hi[0]})
      if (e > h && e < R) br.push_back(e);
    return inner + integrate_breaks(g, h, R, br, 2 * phi.node()->panels());
  }
};

class RegularDist : public LocalDistribution {
 public:
  RegularDist(SmoothFunction f, Box dom) : LocalDistribution(f.dim, dom), f_(std::move(f)) {}
  std::string describe() const override { return "regular(" + f_.name + ")"; }
  const SmoothFunction& function() const { return f_; }

 protected:
  double pair_impl(const TestFunction& phi) const override {
    return phi.integrate([&](const Point& y) { return f_.value(y); });
  }

 private:
  SmoothFunction f_;
};

// d^alpha u: <d^alpha u, phi> = (-1)^|alpha| <u, d^alpha phi>
class DerivativeDist : public LocalDistribution {
 public:
  DerivativeDist(DistPtr u, MultiIndex al) : LocalDistribution(u->dim(), u->domain()), u_(std::move(u)), al_(al) {}
  std::string describe() const override { return "d(" + u_->describe() + ")"; }
  std::vector<Point> singular_points() const override { return u_->singular_points(); }

 protected:
  double pair_impl(const TestFunction& phi) const override {
    double s = al_.order() % 2 ? -1.0 : 1.0;
    return s * u_->pair(phi.derivative(al_));
  }

 private:
  DistPtr u_;
  MultiIndex al_;
};

// f u for smooth f: <f u, phi> = <u, f phi>
class ProductDist : public LocalDistribution {
 public:
  ProductDist(SmoothFunction f, DistPtr u) : LocalDistribution(u->dim(), u->domain()), f_(std::move(f)), u_(std::move(u)) {}
  std::string describe() const override { return f_.name + "*" + u_->describe(); }
  std::vector<Point> singular_points() const override { return u_->singular_points(); }

 protected:
  double pair_impl(const TestFunction& phi) const override {
    return u_->pair(phi.times(f_.value, f_.grad));
  }

 private:
  SmoothFunction f_;
  DistPtr u_;
};

class CombinationDist : public LocalDistribution {
 public:
  CombinationDist(std::vector<std::pair<double, DistPtr>> t)
      : LocalDistribution(t.front().second->dim(), t.front().second->domain()), t_(std::move(t)) {}
  std::string describe() const override { return "combination"; }
  std::vector<Point> singular_points() const override {
    std::vector<Point> out;
    for (const auto& [c, u] : t_)
      for (const auto& p : u->singular_points()) out.push_back(p);
    return out;
  }

 protected:
  double pair_impl(const TestFunction& phi) const override {
    double s = 0.0;
    for (const auto& [c, u] : t_) s += c * u->pair(phi);
    return s;
  }

 private:
  std::vector<std::pair<double, DistPtr>> t_;
};

// mu^* u for mu: dom -> u's domain, <mu^* u, phi> = <u, (phi o mu^-1) |det D mu^-1|>.
class PullbackDist : public LocalDistribution {
 public:
  PullbackDist(DistPtr u, Diffeo mu, Box dom) : LocalDistribution(u->dim(), dom), u_(std::move(u)), mu_(std::move(mu)) {}
  std::string describe() const override { return "pullback(" + u_->describe() + ")"; }
  std::vector<Point> singular_points() const override {
    std::vector<Point> out;
    for (const auto& p : u_->singular_points()) out.push_back(mu_.inv(p));
    return out;
  }

 protected:
  double pair_impl(const TestFunction& phi) const override { return u_->pair(phi.pushforward(mu_)); }

 private:
  DistPtr u_;
  Diffeo mu_;
};

// <L_X u, phi> = -<u, L_X phi> with L_X acting on densities.
class LieDist : public LocalDistribution {
 public:
  LieDist(DistPtr u, LocalField X) : LocalDistribution(u->dim(), u->domain()), u_(std::move(u)), X_(std::move(X)) {}
  std::string describe() const override { return "lie(" + u_->describe() + ")"; }
  std::vector<Point> singular_points() const override { return u_->singular_points(); }

 protected:
  double pair_impl(const TestFunction& phi) const override { return -u_->pair(lie_density(phi, X_)); }

 private:
  DistPtr u_;
  LocalField X_;
};

inline DistPtr delta_at(const Point& a, int dim = 1, Box dom = Box{}) {
  return std::make_shared<DeltaDist>(dim, a, dom.dim == dim && dom.hi[0] > dom.lo[0] ? dom : whole_space(dim));
}
inline DistPtr heaviside(double c = 0.0, Box dom = whole_space(1)) {
  return std::make_shared<HeavisideDist>(c, dom);
}
inline DistPtr pv_inv_x(Box dom = whole_space(1)) { return std::make_shared<PrincipalValueDist>(dom); }
inline DistPtr regular(const SmoothFunction& f, Box dom = Box{}) {
  return std::make_shared<RegularDist>(f, dom.dim == f.dim && dom.hi[0] > dom.lo[0] ? dom : whole_space(f.dim));
}
inline DistPtr derivative(const DistPtr& u, const MultiIndex& al) {
  return std::make_shared<DerivativeDist>(u, al);
}
inline DistPtr times(const SmoothFunction& f, const DistPtr& u) { return std::make_shared<ProductDist>(f, u); }
inline DistPtr combination(std::vector<std::pair<double, DistPtr>> t) {
  return std::make_shared<CombinationDist>(std::move(t));
}
// mu maps dom into u's domain.
inline DistPtr pullback_dist(const DistPtr& u, const Diffeo& mu, Box dom) {
  return std::make_shared<PullbackDist>(u, mu, dom);
}
inline DistPtr lie_derivative_dist(const DistPtr& u, const LocalField& X) {
  return std::make_shared<LieDist>(u, X);
}

}  // namespace gfk
