#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gfk/asymptotics.hpp"
#include "gfk/core.hpp"
#include "gfk/diffeo.hpp"
#include "gfk/distributions.hpp"
#include "gfk/functions.hpp"
#include "gfk/test_function.hpp"

namespace gfk {

// ---------------------------------------------------------------------------
// Test object families phi(eps, x), with phi(eps, x) a test function in the
// unscaled variable xi.

// One term a(eps, x) * psi of a family that is affine in finitely many fixed
// test functions; coeff returns the x-derivative of order al of a.
struct FamilyTerm {
  std::function<double(double, const Point&, const MultiIndex&)> coeff;
  TestFunction fn;
};

struct TestObjectFamily {
  int dim = 1;
  std::string name;
  std::function<TestFunction(double, const Point&)> phi;
  std::vector<FamilyTerm> terms;  // empty when phi is not of that form
  std::function<bool(double, const Point&)> domain;  // empty: all of (0,1] x Omega
  std::function<double(const Box&)> eps0;  // weak families: (0, eps0(K)] x K lies in the domain
  bool weak = false;

  TestFunction operator()(double eps, const Point& x) const { return phi(eps, x); }
  bool contains(double eps, const Point& x) const { return eps > 0 && eps <= 1 && (!domain || domain(eps, x)); }
};

using FamilyPtr = std::shared_ptr<const TestObjectFamily>;

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Multi-indices beta <= al with their binomial weights.
inline std::vector<std::pair<MultiIndex, double>> sub_indices(const MultiIndex& al) {
  std::vector<std::pair<MultiIndex, double>> out;
  for (int b0 = 0; b0 <= al.a[0]; ++b0)
    for (int b1 = 0; b1 <= al.a[1]; ++b1)
      out.push_back({MultiIndex{{b0, b1}}, binomial(al.a[0], b0) * binomial(al.a[1], b1)});
  return out;
}
inline MultiIndex minus(const MultiIndex& a, const MultiIndex& b) { return MultiIndex{{a.a[0] - b.a[0], a.a[1] - b.a[1]}}; }

inline FamilyPtr constant_family(const TestFunction& phi, std::string name) {
  auto f = std::make_shared<TestObjectFamily>();
  f->dim = phi.dim();
  f->name = std::move(name);
  f->phi = [phi](double, const Point&) { return phi; };
  f->terms = {{[](double, const Point&, const MultiIndex& al) { return al.order() == 0 ? 1.0 : 0.0; }, phi}};
  return f;
}

// phi - eps^m c(x) d_axis phi: the first moment along `axis` becomes eps^m c(x).
inline FamilyPtr injected_family(const TestFunction& phi, int m, const SmoothFunction& c, std::string name,
                                 int axis = 0) {
  auto f = std::make_shared<TestObjectFamily>();
  f->dim = phi.dim();
  f->name = std::move(name);
  TestFunction d = phi.partial(axis);
  f->phi = [=](double eps, const Point& x) { return phi - (std::pow(eps, m) * c.value(x)) * d; };
  f->terms = {{[](double, const Point&, const MultiIndex& al) { return al.order() == 0 ? 1.0 : 0.0; }, phi},
              {[=](double eps, const Point& x, const MultiIndex& al) { return -std::pow(eps, m) * c.derivative(x, al); },
               d}};
  return f;
}

// Transport of a family on Omega~ along mu: Omega~ -> Omega:
// phi(eps, x)(xi) = phi~(eps, x~)((mu^-1(eps xi + x) - x~)/eps) |det D mu^-1(eps xi + x)|, x~ = mu^-1 x.
// Only defined where x~ + eps supp phi~ stays inside Omega~.
inline FamilyPtr transform_family(const FamilyPtr& src, const Diffeo& mu, const Box& omega_src) {
  auto f = std::make_shared<TestObjectFamily>();
  f->dim = src->dim;
  f->name = src->name + "~mu";
  f->weak = true;
  f->phi = [src, mu](double eps, const Point& x) {
    Point xs = mu.inv(x);
    std::vector<AxisMap> axes;
    for (int i = 0; i < src->dim; ++i)
      axes.push_back(AxisMap::compose(AxisMap::affine(1.0 / eps, -x[i] / eps),
                                      AxisMap::compose(mu.axis(i), AxisMap::affine(eps, xs[i]))));
    return src->phi(eps, xs).pushforward(Diffeo(std::move(axes)));
  };
  f->domain = [src, mu, omega_src](double eps, const Point& x) {
    Point xs = mu.inv(x);
    if (!src->contains(eps, xs)) return false;
    Box s = src->phi(eps, xs).support_box();
    for (int i = 0; i < src->dim; ++i)
      if (!(xs[i] + eps * s.lo[i] > omega_src.lo[i] && xs[i] + eps * s.hi[i] < omega_src.hi[i])) return false;
    return true;
  };
  f->eps0 = [src, mu, omega_src](const Box& K) {
    Box pre = mu.preimage(K);
    Box s = src->phi(1.0, pre.center()).support_box();
    double e = 1.0;
    for (int i = 0; i < src->dim; ++i) {
      if (s.hi[i] > 0) e = std::min(e, (omega_src.hi[i] - pre.hi[i]) / s.hi[i]);
      if (s.lo[i] < 0) e = std::min(e, (pre.lo[i] - omega_src.lo[i]) / -s.lo[i]);
    }
    // strict inclusion
    return 0.999 * e;
  };
  return f;
}

// ---------------------------------------------------------------------------
// Elements of the basic space: R(phi, x) with phi a (translated) test function.

class LocalGF;
using GFPtr = std::shared_ptr<const LocalGF>;

class LocalGF {
 public:
  explicit LocalGF(int dim) : dim_(dim) {}
  virtual ~LocalGF() = default;
  int dim() const { return dim_; }
  virtual double eval(const TestFunction& phi, const Point& x) const = 0;
  virtual std::string describe() const = 0;
  virtual bool linear() const { return false; }
  // d_1 R(phi, x)(psi), when known in closed form.
  virtual std::optional<double> d1(const TestFunction&, const Point&, const TestFunction&) const { return {}; }
  // d/dx_i R(phi, x) at fixed phi, when known in closed form.
  virtual std::optional<double> dx(const TestFunction&, const Point&, int) const { return {}; }
  // d^al/dx^al of x -> R(T_x S_eps phi(eps, x), x), when known in closed form.
  virtual std::optional<double> path(const TestObjectFamily&, double, const Point&, const MultiIndex&) const {
    return {};
  }
  // Points near which paths vary on the eps scale.
  virtual std::vector<Point> focus() const { return {}; }

 private:
  int dim_;
};

inline TestFunction test_path_argument(const TestObjectFamily& fam, double eps, const Point& x) {
  return fam(eps, x).scale_translate(eps, x);
}

// iota(u)(phi, x) = <u, phi>
class IotaGF : public LocalGF {
 public:
  explicit IotaGF(DistPtr u) : LocalGF(u->dim()), u_(std::move(u)) {}
  double eval(const TestFunction& phi, const Point&) const override { return u_->pair(phi); }
  std::string describe() const override { return "iota(" + u_->describe() + ")"; }
  bool linear() const override { return true; }
  std::optional<double> d1(const TestFunction&, const Point&, const TestFunction& psi) const override {
    return u_->pair(psi);
  }
  std::optional<double> dx(const TestFunction&, const Point&, int) const override { return 0.0; }
  std::optional<double> path(const TestObjectFamily& fam, double eps, const Point& x,
                             const MultiIndex& al) const override {
    if (fam.terms.empty()) return {};
    // d_x (T_x S_eps psi) = -d_y (T_x S_eps psi)
    double s = 0.0;
    for (const auto& t : fam.terms) {
      TestFunction base = t.fn.scale_translate(eps, x);
      for (const auto& [be, w] : sub_indices(al)) {
        double c = t.coeff(eps, x, minus(al, be));
        if (c == 0.0) continue;
        double sign = be.order() % 2 ? -1.0 : 1.0;
        s += w * c * sign * u_->pair(base.derivative(be));
      }
    }
    return s;
  }
  std::vector<Point> focus() const override { return u_->singular_points(); }
  const DistPtr& dist() const { return u_; }

 private:
  DistPtr u_;
};

// sigma(f)(phi, x) = f(x)
class SigmaGF : public LocalGF {
 public:
  explicit SigmaGF(SmoothFunction f) : LocalGF(f.dim), f_(std::move(f)) {}
  double eval(const TestFunction&, const Point& x) const override { return f_.value(x); }
  std::string describe() const override { return "sigma(" + f_.name + ")"; }
  std::optional<double> d1(const TestFunction&, const Point&, const TestFunction&) const override { return 0.0; }
  std::optional<double> dx(const TestFunction&, const Point& x, int i) const override { return f_.grad(x)[i]; }
  std::optional<double> path(const TestObjectFamily&, double, const Point& x, const MultiIndex& al) const override {
    return f_.derivative(x, al);
  }

 private:
  SmoothFunction f_;
};

// iota(f) - sigma(f), evaluated as int (f(y) - f(x)) phi(y) dy. This equals
// <f, phi> - f(x) for int phi = 1 and avoids cancelling two O(1) numbers.
class IotaMinusSigmaGF : public LocalGF {
 public:
  explicit IotaMinusSigmaGF(SmoothFunction f) : LocalGF(f.dim), f_(std::move(f)) {}
  double eval(const TestFunction& phi, const Point& x) const override {
    return phi.integrate([&](const Point& y) { return f_.increment({}, x, Vec{y[0] - x[0], y[1] - x[1]}); });
  }
  std::string describe() const override { return "iota-sigma(" + f_.name + ")"; }
  std::optional<double> path(const TestObjectFamily& fam, double eps, const Point& x,
                             const MultiIndex& al) const override {
    if (fam.terms.empty()) return {};
    // sum_k a_k(x) int (f(x + eps xi) - f(x)) psi_k(xi) dxi, differentiated by Leibniz
    double s = 0.0;
    for (const auto& t : fam.terms)
      for (const auto& [be, w] : sub_indices(al)) {
        double c = t.coeff(eps, x, minus(al, be));
        if (c == 0.0) continue;
        double F = t.fn.integrate([&](const Point& xi) { return f_.increment(be, x, Vec{eps * xi[0], eps * xi[1]}); });
        s += w * c * F;
      }
    return s;
  }

 private:
  SmoothFunction f_;
};

class SumGF : public LocalGF {
 public:
  explicit SumGF(std::vector<std::pair<double, GFPtr>> t) : LocalGF(t.at(0).second->dim()), t_(std::move(t)) {}
  double eval(const TestFunction& phi, const Point& x) const override {
    double s = 0.0;
    for (const auto& [c, r] : t_) s += c * r->eval(phi, x);
    return s;
  }
  std::string describe() const override {
    std::string s = "sum(";
    for (size_t i = 0; i < t_.size(); ++i) s += (i ? "," : "") + t_[i].second->describe();
    return s + ")";
  }
  bool linear() const override {
    for (const auto& [c, r] : t_)
      if (!r->linear()) return false;
    return true;
  }
  std::optional<double> d1(const TestFunction& phi, const Point& x, const TestFunction& psi) const override {
    return combine([&](const GFPtr& r) { return r->d1(phi, x, psi); });
  }
  std::optional<double> dx(const TestFunction& phi, const Point& x, int i) const override {
    return combine([&](const GFPtr& r) { return r->dx(phi, x, i); });
  }
  std::optional<double> path(const TestObjectFamily& fam, double eps, const Point& x,
                             const MultiIndex& al) const override {
    return combine([&](const GFPtr& r) { return r->path(fam, eps, x, al); });
  }
  std::vector<Point> focus() const override {
    std::vector<Point> out;
    for (const auto& [c, r] : t_)
      for (const auto& p : r->focus()) out.push_back(p);
    return out;
  }

 private:
  template <class F>
  std::optional<double> combine(F&& f) const {
    double s = 0.0;
    for (const auto& [c, r] : t_) {
      auto v = f(r);
      if (!v) return {};
      s += c * *v;
    }
    return s;
  }
  std::vector<std::pair<double, GFPtr>> t_;
};

class ProductGF : public LocalGF {
 public:
  ProductGF(GFPtr a, GFPtr b) : LocalGF(a->dim()), a_(std::move(a)), b_(std::move(b)) {}
  double eval(const TestFunction& phi, const Point& x) const override { return a_->eval(phi, x) * b_->eval(phi, x); }
  std::string describe() const override { return a_->describe() + "*" + b_->describe(); }
  std::optional<double> d1(const TestFunction& phi, const Point& x, const TestFunction& psi) const override {
    auto da = a_->d1(phi, x, psi), db = b_->d1(phi, x, psi);
    if (!da || !db) return {};
    return *da * b_->eval(phi, x) + a_->eval(phi, x) * *db;
  }
  std::optional<double> dx(const TestFunction& phi, const Point& x, int i) const override {
    auto da = a_->dx(phi, x, i), db = b_->dx(phi, x, i);
    if (!da || !db) return {};
    return *da * b_->eval(phi, x) + a_->eval(phi, x) * *db;
  }
  std::optional<double> path(const TestObjectFamily& fam, double eps, const Point& x,
                             const MultiIndex& al) const override {
    double s = 0.0;
    for (const auto& [be, w] : sub_indices(al)) {
      auto pa = a_->path(fam, eps, x, be), pb = b_->path(fam, eps, x, minus(al, be));
      if (!pa || !pb) return {};
      s += w * *pa * *pb;
    }
    return s;
  }
  std::vector<Point> focus() const override {
    auto out = a_->focus();
    for (const auto& p : b_->focus()) out.push_back(p);
    return out;
  }

 private:
  GFPtr a_, b_;
};

inline GFPtr iota(const DistPtr& u) { return std::make_shared<IotaGF>(u); }
inline GFPtr sigma(const SmoothFunction& f) { return std::make_shared<SigmaGF>(f); }
inline GFPtr iota_minus_sigma(const SmoothFunction& f) { return std::make_shared<IotaMinusSigmaGF>(f); }
inline GFPtr gf_sum(std::vector<std::pair<double, GFPtr>> t) { return std::make_shared<SumGF>(std::move(t)); }
inline GFPtr gf_product(GFPtr a, GFPtr b) { return std::make_shared<ProductGF>(std::move(a), std::move(b)); }

// ---------------------------------------------------------------------------
// Differentiation

struct GateauxResult {
  double value = 0.0;
  double t = 0.0;  // 0 when the closed form was used
};

// d_1 R(phi, x)(psi). psi must have zero integral so that phi + t psi stays
// in the affine space of unit-integral test functions.
inline GateauxResult gateaux(const LocalGF& R, const TestFunction& phi, const Point& x, const TestFunction& psi) {
  if (auto v = R.d1(phi, x, psi)) return {*v, 0.0};
  double scale = psi.node()->scale();
  if (std::abs(psi.integral()) > 1e-9 * (1.0 + 1.0 / scale))
    throw DomainError("gateaux: direction has nonzero integral, leaves the unit-integral space");
  double t = 1e-4 * scale;
  auto D = [&](double h) {
    return (R.eval(phi + h * psi, x) - R.eval(phi - h * psi, x)) / (2 * h);
  };
  double v = (4 * D(0.5 * t) - D(t)) / 3.0;
  return {v, t};
}

// Right-hand side of D_i R = -d_1R(phi, x)(d_i phi) + d_i R(phi, x).
class DerivativeGF : public LocalGF {
 public:
  DerivativeGF(GFPtr r, int i) : LocalGF(r->dim()), r_(std::move(r)), i_(i) {
    if (i < 0 || i >= dim()) throw DomainError("derivative_Di: axis out of range");
  }
  double eval(const TestFunction& phi, const Point& x) const override {
    double a = gateaux(*r_, phi, x, phi.partial(i_)).value;
    double b;
    if (auto v = r_->dx(phi, x, i_)) {
      b = *v;
    } else {
      const double h = 1e-5 * std::max(1.0, phi.support_box().max_width());
      Point p = x, q = x;
      p[i_] += h;
      q[i_] -= h;
      b = (r_->eval(phi, p) - r_->eval(phi, q)) / (2 * h);
    }
    return -a + b;
  }
  std::string describe() const override { return "D" + std::to_string(i_ + 1) + "(" + r_->describe() + ")"; }
  bool linear() const override { return r_->linear(); }
  std::optional<double> path(const TestObjectFamily& fam, double eps, const Point& x,
                             const MultiIndex& al) const override {
    // along a test path, D_i R is the x_i-derivative of the path of R
    MultiIndex b = al;
    b.a[i_] += 1;
    if (b.order() > 2) return {};
    return r_->path(fam, eps, x, b);
  }
  std::vector<Point> focus() const override { return r_->focus(); }

 private:
  GFPtr r_;
  int i_;
};

inline GFPtr derivative_Di(const GFPtr& R, int i) { return std::make_shared<DerivativeGF>(R, i); }

// (mu^ R)(phi~, x~) = R((phi~ o mu^-1)|det D mu^-1|, mu x~)
class PullbackGF : public LocalGF {
 public:
  PullbackGF(GFPtr r, Diffeo mu) : LocalGF(r->dim()), r_(std::move(r)), mu_(std::move(mu)) {}
  double eval(const TestFunction& phi, const Point& x) const override {
    return r_->eval(phi.pushforward(mu_), mu_(x));
  }
  std::string describe() const override { return "pullback(" + r_->describe() + ")"; }
  bool linear() const override { return r_->linear(); }
  std::vector<Point> focus() const override {
    std::vector<Point> out;
    for (const auto& p : r_->focus()) out.push_back(mu_.inv(p));
    return out;
  }

 private:
  GFPtr r_;
  Diffeo mu_;
};

inline GFPtr pullback_local(const GFPtr& R, const Diffeo& mu) { return std::make_shared<PullbackGF>(R, mu); }

// ---------------------------------------------------------------------------
// Test paths and sup over compact sets

inline double eval_test_path(const LocalGF& R, const TestObjectFamily& fam, double eps, const Point& x,
                             const MultiIndex& al = {}) {
  if (!fam.contains(eps, x)) throw DomainError("eval_test_path: (eps, x) outside the family's domain");
  if (al.order() > 2) throw DomainError("eval_test_path: at most second derivatives");
  if (auto v = R.path(fam, eps, x, al)) return *v;
  auto P = [&](const Point& y) {
    if (!fam.contains(eps, y)) throw DomainError("eval_test_path: difference stencil leaves the domain");
    return R.eval(test_path_argument(fam, eps, y), y);
  };
  const double h = std::max(1e-3 * eps, 1e-7);
  if (al.order() == 0) return P(x);
  if (al.order() == 1) {
    int i = al.a[0] ? 0 : 1;
    Point p = x, q = x;
    p[i] += h;
    q[i] -= h;
    return (P(p) - P(q)) / (2 * h);
  }
  if (al.a[0] == 1 && al.a[1] == 1) {
    auto at = [&](double s, double t) { return P({x[0] + s * h, x[1] + t * h}); };
    return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
  }
  int i = al.a[0] ? 0 : 1;
  Point p = x, q = x;
  p[i] += h;
  q[i] -= h;
  return (P(p) - 2 * P(x) + P(q)) / (h * h);
}

// Sample set on a compact box: a regular grid, seeded random points, and an
// eps-scaled grid around each focus point.
struct CompactGrid {
  Box K;
  int per_axis = 41;
  int random = 0;
  uint64_t seed = 0;
  std::vector<Point> focus;
  double focus_halfwidth = 2.0;  // in units of eps
  int focus_per_axis = 41;

  std::vector<Point> points(double eps) const {
    std::vector<Point> out;
    auto axis = [&](int i, int n, double lo, double hi) {
      std::vector<double> v;
      if (n <= 1 || i >= K.dim) {
        v.push_back(i >= K.dim ? 0.0 : 0.5 * (lo + hi));
        return v;
      }
      for (int k = 0; k < n; ++k) v.push_back(lo + (hi - lo) * k / (n - 1));
      return v;
    };
    auto grid = [&](const Box& b, int n) {
      for (double a : axis(0, n, b.lo[0], b.hi[0]))
        for (double c : axis(1, n, b.lo[1], b.hi[1])) out.push_back({a, c});
    };
    grid(K, per_axis);
    if (random > 0) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int k = 0; k < random; ++k) {
        Point p{K.lo[0] + u(rng) * K.width(0), 0.0};
        if (K.dim > 1) p[1] = K.lo[1] + u(rng) * K.width(1);
        out.push_back(p);
      }
    }
    for (const auto& f : focus) {
      Box b = K;
      for (int i = 0; i < K.dim; ++i) {
        b.lo[i] = std::max(K.lo[i], f[i] - focus_halfwidth * eps);
        b.hi[i] = std::min(K.hi[i], f[i] + focus_halfwidth * eps);
      }
      if (!b.empty()) grid(b, focus_per_axis);
    }
    return out;
  }
};

inline double sup_test_path(const LocalGF& R, const TestObjectFamily& fam, const CompactGrid& K, double eps,
                            const MultiIndex& al) {
  double m = 0.0;
  for (const auto& x : K.points(eps)) m = std::max(m, std::abs(eval_test_path(R, fam, eps, x, al)));
  return m;
}

// ---------------------------------------------------------------------------
// Moment classes

struct MomentOrder {
  MultiIndex alpha;
  AsymptoticEstimate est;
  bool square = false;  // meets O(eps^m)
  bool delta = false;   // meets O(eps^(m+1-|alpha|))
};

struct MomentReport {
  std::string family;
  int m = 0;
  std::vector<MomentOrder> orders;
  bool square = true;
  bool delta = true;
};

// Moments below this are indistinguishable from rounding in the moment
// integrals of radius-one profiles.
inline constexpr double kMomentFloor = 1e-13;

inline MomentReport classify_test_object(const TestObjectFamily& fam, int m, const CompactGrid& K,
                                         const EpsilonLadder& ladder) {
  if (m < 1 || m > 6) throw DomainError("classify_test_object: m must be in 1..6");
  MomentReport rep;
  rep.family = fam.name;
  rep.m = m;
  auto eps = ladder.values();
  for (const auto& al : multi_indices(fam.dim, 1, m)) {
    std::vector<double> v;
    for (double e : eps) {
      double s = 0.0;
      for (const auto& x : K.points(e)) {
        if (!fam.contains(e, x)) throw DomainError("classify_test_object: ladder exits the family's domain");
        TestFunction p = fam(e, x);
        s = std::max(s, std::abs(p.integrate([&](const Point& xi) { return monomial(xi, al, fam.dim); })));
      }
      v.push_back(s);
    }
    MomentOrder mo;
    mo.alpha = al;
    mo.est = estimate_order(eps, v, 8, kMomentFloor);
    mo.square = big_o_holds(mo.est, m);
    mo.delta = big_o_holds(mo.est, m + 1 - al.order());
    rep.square = rep.square && mo.square;
    rep.delta = rep.delta && mo.delta;
    rep.orders.push_back(mo);
  }
  return rep;
}

// Sampled sup of |d_x^beta phi(eps, x)(xi)| for |beta| <= 2 over the ladder,
// K and a grid in xi; all finite means the family looks bounded.
struct Boundedness {
  std::vector<std::pair<MultiIndex, double>> sup;
  double support_radius = 0.0;
  bool finite = true;
};

inline Boundedness boundedness(const TestObjectFamily& fam, const CompactGrid& K, const EpsilonLadder& ladder,
                               int xi_points = 21) {
  Boundedness b;
  for (const auto& be : multi_indices(fam.dim, 0, 2)) b.sup.push_back({be, 0.0});
  for (double e : ladder.values())
    for (const auto& x : K.points(e)) {
      TestFunction p = fam(e, x);
      Box s = p.support_box();
      for (int i = 0; i < fam.dim; ++i)
        b.support_radius = std::max({b.support_radius, std::abs(s.lo[i]), std::abs(s.hi[i])});
      const double h = 1e-4;
      for (int k0 = 0; k0 < xi_points; ++k0)
        for (int k1 = 0; k1 < (fam.dim > 1 ? xi_points : 1); ++k1) {
          Point xi{s.lo[0] + s.width(0) * k0 / (xi_points - 1),
                   fam.dim > 1 ? s.lo[1] + s.width(1) * k1 / (xi_points - 1) : 0.0};
          auto at = [&](double d0, double d1) { return fam(e, Point{x[0] + d0, x[1] + d1})(xi); };
          for (auto& [be, v] : b.sup) {
            double val;
            if (be.order() == 0) val = at(0, 0);
            else if (be.order() == 1) val = be.a[0] ? (at(h, 0) - at(-h, 0)) / (2 * h) : (at(0, h) - at(0, -h)) / (2 * h);
            else if (be.a[0] == 2) val = (at(h, 0) - 2 * at(0, 0) + at(-h, 0)) / (h * h);
            else if (be.a[1] == 2) val = (at(0, h) - 2 * at(0, 0) + at(0, -h)) / (h * h);
            else val = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
            v = std::max(v, std::abs(val));
          }
        }
    }
  for (const auto& [be, v] : b.sup) b.finite = b.finite && std::isfinite(v);
  return b;
}

// ---------------------------------------------------------------------------
// Moderateness and negligibility on a compact set

struct PathOrder {
  std::string family;
  MultiIndex alpha;
  std::vector<double> eps, values;
  AsymptoticEstimate est;
};

struct ModerateReport {
  std::vector<PathOrder> orders;
  double min_order = kInf;
  int N = 0;
  bool pass = true;  // every fit is reliable (r2 or floor) and N is finite
};

struct NegligibleReport {
  std::vector<std::pair<int, std::vector<PathOrder>>> by_m;
  // for each requested r: smallest m whose families all meet O(eps^r), -1 if none
  std::vector<std::pair<double, int>> smallest_m;
  bool pass = true;
};

inline PathOrder path_order(const LocalGF& R, const TestObjectFamily& fam, const CompactGrid& K,
                            const EpsilonLadder& ladder, const MultiIndex& al) {
  PathOrder p;
  p.family = fam.name;
  p.alpha = al;
  p.eps = ladder.values();
  CompactGrid g = K;
  for (const auto& f : R.focus()) g.focus.push_back(f);
  for (double e : p.eps) p.values.push_back(sup_test_path(R, fam, g, e, al));
  p.est = estimate_order(p.eps, p.values);
  return p;
}

inline ModerateReport test_moderate(const LocalGF& R, const CompactGrid& K, const std::vector<FamilyPtr>& fams,
                                    const EpsilonLadder& ladder, int alpha_max) {
  ModerateReport r;
  for (const auto& f : fams)
    for (const auto& al : multi_indices(R.dim(), 0, alpha_max)) {
      PathOrder p = path_order(R, *f, K, ladder, al);
      if (!p.est.floor_hit) {
        r.min_order = std::min(r.min_order, p.est.order);
        if (!(p.est.r2 >= kMinR2)) r.pass = false;
      }
      r.orders.push_back(std::move(p));
    }
  r.N = moderate_exponent(r.min_order);
  return r;
}

inline NegligibleReport test_negligible(const LocalGF& R, const CompactGrid& K,
                                        const std::vector<std::pair<int, std::vector<FamilyPtr>>>& by_m,
                                        const EpsilonLadder& ladder, int alpha_max, const std::vector<double>& rs) {
  NegligibleReport rep;
  for (const auto& [m, fams] : by_m) {
    std::vector<PathOrder> v;
    for (const auto& f : fams)
      for (const auto& al : multi_indices(R.dim(), 0, alpha_max)) v.push_back(path_order(R, *f, K, ladder, al));
    rep.by_m.emplace_back(m, std::move(v));
  }
  for (double r : rs) {
    int found = -1;
    for (const auto& [m, v] : rep.by_m) {
      bool ok = true;
      for (const auto& p : v) ok = ok && big_o_holds(p.est, r);
      if (ok) {
        found = m;
        break;
      }
    }
    rep.smallest_m.emplace_back(r, found);
    rep.pass = rep.pass && found >= 0;
  }
  return rep;
}

}  // namespace gfk
