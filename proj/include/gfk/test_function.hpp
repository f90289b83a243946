#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "gfk/core.hpp"
#include "gfk/diffeo.hpp"
#include "gfk/quadrature.hpp"

namespace gfk {

using GradFn = std::function<Vec(const Point&)>;

inline int default_panels(int dim) { return dim == 1 ? 64 : 32; }

// Node of a compactly supported smooth function on R^n. Besides point values
// every node knows how to integrate a weight against itself; composite nodes
// pass the weight down by substitution so that every integral ends up on the
// mirrored rule of an underlying profile.
class TFNode {
 public:
  explicit TFNode(int dim) : dim_(dim) {}
  virtual ~TFNode() = default;
  int dim() const { return dim_; }
  virtual double eval(const Point& y) const = 0;
  virtual Vec grad(const Point& y) const = 0;
  virtual Box box() const = 0;
  virtual double integrate(const ScalarFn& h) const = 0;
  virtual int panels() const { return default_panels(dim_); }
  // Scale used for finite-difference steps on this node.
  virtual double scale() const { return 0.5 * box().max_width(); }

 private:
  int dim_;
};

using NodePtr = std::shared_ptr<const TFNode>;

class FunctionNode : public TFNode {
 public:
  FunctionNode(int dim, ScalarFn f, GradFn g, Box b, int panels)
      : TFNode(dim), f_(std::move(f)), g_(std::move(g)), box_(b), panels_(panels) {}
  double eval(const Point& y) const override { return box_.contains(y) ? f_(y) : 0.0; }
  Vec grad(const Point& y) const override {
    return box_.contains(y) ? g_(y) : Vec{0.0, 0.0};
  }
  Box box() const override { return box_; }
  int panels() const override { return panels_; }
  double integrate(const ScalarFn& h) const override {
    return native_integrate([&](const Point& y) {
      double v = f_(y);
      return v == 0.0 ? 0.0 : h(y) * v;
    }, box_, panels_);
  }

 private:
  ScalarFn f_;
  GradFn g_;
  Box box_;
  int panels_;
};

// y -> eps^-n inner((y - x)/eps)
class ScaledNode : public TFNode {
 public:
  ScaledNode(NodePtr inner, double eps, Point x)
      : TFNode(inner->dim()), in_(std::move(inner)), eps_(eps), x_(x) {
    fac_ = dim() == 1 ? 1.0 / eps_ : 1.0 / (eps_ * eps_);
  }
  Point pre(const Point& y) const {
    return {(y[0] - x_[0]) / eps_, dim() > 1 ? (y[1] - x_[1]) / eps_ : 0.0};
  }
  double eval(const Point& y) const override { return fac_ * in_->eval(pre(y)); }
  Vec grad(const Point& y) const override {
    Vec g = in_->grad(pre(y));
    return {fac_ * g[0] / eps_, fac_ * g[1] / eps_};
  }
  Box box() const override {
    Box b = in_->box();
    for (int i = 0; i < dim(); ++i) {
      double lo = x_[i] + eps_ * b.lo[i], hi = x_[i] + eps_ * b.hi[i];
      b.lo[i] = std::min(lo, hi);
      b.hi[i] = std::max(lo, hi);
    }
    return b;
  }
  int panels() const override { return in_->panels(); }
  double scale() const override { return eps_ * in_->scale(); }
  double integrate(const ScalarFn& h) const override {
    const double e = eps_;
    const Point x = x_;
    return in_->integrate([&](const Point& xi) {
      return h(Point{x[0] + e * xi[0], x[1] + e * xi[1]});
    });
  }
  const NodePtr& inner() const { return in_; }
  double eps() const { return eps_; }
  const Point& shift() const { return x_; }

 private:
  NodePtr in_;
  double eps_;
  Point x_;
  double fac_;
};

class SumNode : public TFNode {
 public:
  SumNode(int dim, std::vector<std::pair<double, NodePtr>> terms)
      : TFNode(dim), terms_(std::move(terms)) {
    if (terms_.empty()) throw DomainError("SumNode: no terms");
  }
  double eval(const Point& y) const override {
    double s = 0.0;
    for (const auto& [c, n] : terms_)
      if (c != 0.0) s += c * n->eval(y);
    return s;
  }
  Vec grad(const Point& y) const override {
    Vec s{0.0, 0.0};
    for (const auto& [c, n] : terms_) {
      if (c == 0.0) continue;
      Vec g = n->grad(y);
      s[0] += c * g[0];
      s[1] += c * g[1];
    }
    return s;
  }
  Box box() const override {
    Box b = terms_.front().second->box();
    for (const auto& t : terms_) b = hull(b, t.second->box());
    return b;
  }
  int panels() const override { return terms_.front().second->panels(); }
  double scale() const override {
    double s = 0.0;
    for (const auto& t : terms_) s = std::max(s, t.second->scale());
    return s;
  }
  double integrate(const ScalarFn& h) const override {
    double s = 0.0;
    for (const auto& [c, n] : terms_)
      if (c != 0.0) s += c * n->integrate(h);
    return s;
  }
  const std::vector<std::pair<double, NodePtr>>& terms() const { return terms_; }

 private:
  std::vector<std::pair<double, NodePtr>> terms_;
};

// inner * g for a smooth g with gradient dg.
class ProductNode : public TFNode {
 public:
  ProductNode(NodePtr inner, ScalarFn g, GradFn dg)
      : TFNode(inner->dim()), in_(std::move(inner)), g_(std::move(g)), dg_(std::move(dg)) {}
  double eval(const Point& y) const override {
    double v = in_->eval(y);
    return v == 0.0 ? 0.0 : v * g_(y);
  }
  Vec grad(const Point& y) const override {
    double v = in_->eval(y);
    Vec a = in_->grad(y);
    if (v == 0.0 && a[0] == 0.0 && a[1] == 0.0) return {0.0, 0.0};
    double gv = g_(y);
    Vec b = dg_(y);
    return {a[0] * gv + v * b[0], a[1] * gv + v * b[1]};
  }
  Box box() const override { return in_->box(); }
  int panels() const override { return in_->panels(); }
  double scale() const override { return in_->scale(); }
  double integrate(const ScalarFn& h) const override {
    return in_->integrate([&](const Point& y) { return h(y) * g_(y); });
  }

 private:
  NodePtr in_;
  ScalarFn g_;
  GradFn dg_;
};

// Density pushforward along mu: y -> inner(mu^-1 y) |det D mu^-1 (y)|.
class PushforwardNode : public TFNode {
 public:
  PushforwardNode(NodePtr inner, Diffeo mu)
      : TFNode(inner->dim()), in_(std::move(inner)), mu_(std::move(mu)) {
    if (mu_.dim() != dim()) throw DomainError("pushforward: dimension mismatch");
  }
  double eval(const Point& y) const override {
    if (!box().contains(y)) return 0.0;
    Point x = mu_.inv(y);
    double v = in_->eval(x);
    return v == 0.0 ? 0.0 : v / mu_.det(x);
  }
  Vec grad(const Point& y) const override {
    if (!box().contains(y)) return {0.0, 0.0};
    Point x = mu_.inv(y);
    double v = in_->eval(x);
    Vec g = in_->grad(x);
    double J = mu_.det(x);
    Vec dJ = mu_.det_grad(x);
    Vec d = mu_.jac_diag(x);
    Vec out{0.0, 0.0};
    for (int i = 0; i < dim(); ++i) out[i] = (g[i] / J - v * dJ[i] / (J * J)) / d[i];
    return out;
  }
  Box box() const override { return mu_.image(in_->box()); }
  int panels() const override { return in_->panels(); }
  double scale() const override { return 0.5 * box().max_width(); }
  double integrate(const ScalarFn& h) const override {
    return in_->integrate([&](const Point& x) { return h(mu_(x)); });
  }

 private:
  NodePtr in_;
  Diffeo mu_;
};

// Partial derivative d/dy_i of a node. Values come from the exact gradient;
// the gradient of the result is one central-difference level on that.
class PartialNode : public TFNode {
 public:
  PartialNode(NodePtr inner, int i) : TFNode(inner->dim()), in_(std::move(inner)), i_(i) {
    h_ = 1e-5 * in_->scale();
  }
  double eval(const Point& y) const override { return in_->grad(y)[i_]; }
  Vec grad(const Point& y) const override {
    Vec out{0.0, 0.0};
    for (int j = 0; j < dim(); ++j) {
      Point a = y, b = y;
      a[j] += h_;
      b[j] -= h_;
      out[j] = (in_->grad(a)[i_] - in_->grad(b)[i_]) / (2.0 * h_);
    }
    return out;
  }
  Box box() const override { return in_->box(); }
  int panels() const override { return in_->panels(); }
  double scale() const override { return in_->scale(); }
  // Derivatives of the bump are rougher than the bump itself; doubling the
  // panels brings them back to the accuracy of the profile rule.
  double integrate(const ScalarFn& h) const override {
    return native_integrate([&](const Point& y) { return h(y) * eval(y); }, box(), 2 * panels());
  }

 private:
  NodePtr in_;
  int i_;
  double h_;
};

class TestFunction {
 public:
  TestFunction() = default;
  explicit TestFunction(NodePtr n) : node_(std::move(n)) {}

  static TestFunction from(int dim, ScalarFn f, GradFn g, Box b, int panels = 0) {
    return TestFunction(std::make_shared<FunctionNode>(dim, std::move(f), std::move(g), b,
                                                       panels ? panels : default_panels(dim)));
  }

  int dim() const { return node_->dim(); }
  bool valid() const { return static_cast<bool>(node_); }
  double operator()(const Point& y) const { return node_->eval(y); }
  double operator()(double y) const { return node_->eval(Point{y, 0.0}); }
  Vec grad(const Point& y) const { return node_->grad(y); }
  Box support_box() const { return node_->box(); }
  bool smooth() const { return true; }
  const NodePtr& node() const { return node_; }

  // Integral of h times this function.
  double integrate(const ScalarFn& h) const { return node_->integrate(h); }
  double integral() const {
    return node_->integrate([](const Point&) { return 1.0; });
  }

  TestFunction scale_translate(double eps, const Point& x) const {
    if (!(eps > 0.0)) throw DomainError("scale_translate: eps must be positive");
    return TestFunction(std::make_shared<ScaledNode>(node_, eps, x));
  }
  TestFunction times(ScalarFn g, GradFn dg) const {
    return TestFunction(std::make_shared<ProductNode>(node_, std::move(g), std::move(dg)));
  }
  TestFunction pushforward(const Diffeo& mu) const {
    return TestFunction(std::make_shared<PushforwardNode>(node_, mu));
  }
  TestFunction partial(int i) const {
    if (i < 0 || i >= dim()) throw DomainError("partial: axis out of range");
    // Through a scaling the derivative moves onto the inner node, which keeps
    // integrals on the mirrored profile rule.
    if (auto s = std::dynamic_pointer_cast<const ScaledNode>(node_)) {
      TestFunction inner = TestFunction(s->inner()).partial(i);
      return (1.0 / s->eps()) * TestFunction(std::make_shared<ScaledNode>(inner.node(), s->eps(), s->shift()));
    }
    if (auto s = std::dynamic_pointer_cast<const SumNode>(node_)) {
      std::vector<std::pair<double, NodePtr>> t;
      for (const auto& [c, n] : s->terms()) t.emplace_back(c, TestFunction(n).partial(i).node());
      return TestFunction(std::make_shared<SumNode>(dim(), std::move(t)));
    }
    return TestFunction(std::make_shared<PartialNode>(node_, i));
  }
  TestFunction derivative(const MultiIndex& al) const {
    TestFunction r = *this;
    for (int i = 0; i < dim(); ++i)
      for (int k = 0; k < al.a[i]; ++k) r = r.partial(i);
    return r;
  }

  friend TestFunction operator*(double c, const TestFunction& f) {
    return TestFunction(std::make_shared<SumNode>(
        f.dim(), std::vector<std::pair<double, NodePtr>>{{c, f.node_}}));
  }
  friend TestFunction operator+(const TestFunction& a, const TestFunction& b) {
    return combine({{1.0, a}, {1.0, b}});
  }
  friend TestFunction operator-(const TestFunction& a, const TestFunction& b) {
    return combine({{1.0, a}, {-1.0, b}});
  }
  static TestFunction combine(const std::vector<std::pair<double, TestFunction>>& terms) {
    if (terms.empty()) throw DomainError("combine: no terms");
    std::vector<std::pair<double, NodePtr>> t;
    for (const auto& [c, f] : terms) t.emplace_back(c, f.node_);
    return TestFunction(std::make_shared<SumNode>(terms.front().second.dim(), std::move(t)));
  }

 private:
  NodePtr node_;
};

}  // namespace gfk
