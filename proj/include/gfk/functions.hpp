#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gfk/core.hpp"
#include "gfk/diffeo.hpp"

namespace gfk {

// Smooth real function on an open subset of R^n with value, gradient and
// Hessian channels.
struct SmoothFunction {
  int dim = 1;
  std::function<double(const Point&)> value;
  std::function<Vec(const Point&)> grad;
  std::function<Mat(const Point&)> hess;
  std::string name;
  // Optional exact increment d^al f(x + h) - d^al f(x), free of cancellation.
  std::function<double(const MultiIndex&, const Point&, const Vec&)> incr;

  double operator()(const Point& x) const { return value(x); }
  double operator()(double x) const { return value(Point{x, 0.0}); }

  double derivative(const Point& x, const MultiIndex& al) const {
    switch (al.order()) {
      case 0: return value(x);
      case 1: return grad(x)[al.a[0] ? 0 : 1];
      case 2: {
        Mat h = hess(x);
        if (al.a[0] == 2) return h[0][0];
        if (al.a[1] == 2) return h[1][1];
        return h[0][1];
      }
      default: throw DomainError("SmoothFunction: derivatives above order 2 not available");
    }
  }

  double increment(const MultiIndex& al, const Point& x, const Vec& h) const {
    if (incr) return incr(al, x, h);
    return derivative(axpy(1.0, h, x), al) - derivative(x, al);
  }

  static SmoothFunction constant(int dim, double c) {
    return {dim, [c](const Point&) { return c; }, [](const Point&) { return Vec{0, 0}; },
            [](const Point&) { return Mat{}; }, "const"};
  }

  // offset + sum_j amp_j sin(k_j . x + phase_j)
  struct TrigTerm {
    double amp = 1.0;
    std::array<double, 2> k{1.0, 0.0};
    double phase = 0.0;
  };
  static SmoothFunction trig(int dim, std::vector<TrigTerm> terms, double offset = 0.0,
                             std::string name = "trig") {
    auto arg = [dim](const TrigTerm& t, const Point& x) {
      return t.k[0] * x[0] + (dim > 1 ? t.k[1] * x[1] : 0.0) + t.phase;
    };
    SmoothFunction f;
    f.dim = dim;
    f.name = std::move(name);
    f.value = [=](const Point& x) {
      double s = offset;
      for (const auto& t : terms) s += t.amp * std::sin(arg(t, x));
      return s;
    };
    f.grad = [=](const Point& x) {
      Vec g{0, 0};
      for (const auto& t : terms) {
        double c = t.amp * std::cos(arg(t, x));
        g[0] += c * t.k[0];
        if (dim > 1) g[1] += c * t.k[1];
      }
      return g;
    };
    f.hess = [=](const Point& x) {
      Mat h{};
      for (const auto& t : terms) {
        double s = -t.amp * std::sin(arg(t, x));
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) h[i][j] += s * t.k[i] * t.k[j];
      }
      return h;
    };
    // sin(a + d) - sin(a) = 2 cos(a + d/2) sin(d/2); each derivative adds pi/2
    f.incr = [=](const MultiIndex& al, const Point& x, const Vec& h) {
      double s = 0.0;
      for (const auto& t : terms) {
        double kb = std::pow(t.k[0], al.a[0]) * (dim > 1 ? std::pow(t.k[1], al.a[1]) : 1.0);
        double d = t.k[0] * h[0] + (dim > 1 ? t.k[1] * h[1] : 0.0);
        s += t.amp * kb * 2.0 * std::cos(arg(t, x) + al.order() * kPi / 2 + 0.5 * d) * std::sin(0.5 * d);
      }
      return s;
    };
    return f;
  }

  friend SmoothFunction operator*(const SmoothFunction& a, const SmoothFunction& b) {
    SmoothFunction f;
    f.dim = a.dim;
    f.name = a.name + "*" + b.name;
    f.value = [=](const Point& x) { return a.value(x) * b.value(x); };
    f.grad = [=](const Point& x) {
      double va = a.value(x), vb = b.value(x);
      Vec ga = a.grad(x), gb = b.grad(x);
      return Vec{ga[0] * vb + va * gb[0], ga[1] * vb + va * gb[1]};
    };
    f.hess = [=](const Point& x) {
      double va = a.value(x), vb = b.value(x);
      Vec ga = a.grad(x), gb = b.grad(x);
      Mat ha = a.hess(x), hb = b.hess(x), h{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          h[i][j] = ha[i][j] * vb + ga[i] * gb[j] + ga[j] * gb[i] + va * hb[i][j];
      return h;
    };
    return f;
  }

  static SmoothFunction lincomb(double ca, const SmoothFunction& a, double cb,
                                const SmoothFunction& b) {
    SmoothFunction f;
    f.dim = a.dim;
    f.name = a.name + "+" + b.name;
    f.value = [=](const Point& x) { return ca * a.value(x) + cb * b.value(x); };
    f.grad = [=](const Point& x) {
      Vec ga = a.grad(x), gb = b.grad(x);
      return Vec{ca * ga[0] + cb * gb[0], ca * ga[1] + cb * gb[1]};
    };
    f.hess = [=](const Point& x) {
      Mat ha = a.hess(x), hb = b.hess(x), h{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) h[i][j] = ca * ha[i][j] + cb * hb[i][j];
      return h;
    };
    if (a.incr && b.incr)
      f.incr = [=](const MultiIndex& al, const Point& x, const Vec& h) {
        return ca * a.incr(al, x, h) + cb * b.incr(al, x, h);
      };
    return f;
  }

  // this o mu
  SmoothFunction compose(const Diffeo& mu) const {
    SmoothFunction f;
    f.dim = dim;
    f.name = name + "o" + "mu";
    auto self = *this;
    f.value = [=](const Point& x) { return self.value(mu(x)); };
    f.grad = [=](const Point& x) {
      Vec g = self.grad(mu(x)), d = mu.jac_diag(x);
      return Vec{g[0] * d[0], g[1] * d[1]};
    };
    f.hess = [=](const Point& x) {
      Point y = mu(x);
      Vec g = self.grad(y), d = mu.jac_diag(x);
      Mat h = self.hess(y), out{};
      for (int i = 0; i < self.dim; ++i) {
        for (int j = 0; j < self.dim; ++j) out[i][j] = h[i][j] * d[i] * d[j];
        out[i][i] += g[i] * mu.axis(i).d2f(x[i]);
      }
      return out;
    };
    return f;
  }
};

// Vector field on an open subset of R^n: components X^j with gradients.
struct LocalField {
  int dim = 1;
  std::vector<SmoothFunction> comp;

  Vec operator()(const Point& x) const {
    Vec v{0, 0};
    for (int j = 0; j < dim; ++j) v[j] = comp[j].value(x);
    return v;
  }
  double div(const Point& x) const {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) s += comp[j].grad(x)[j];
    return s;
  }
  // Gradient of the divergence, from the component Hessians.
  Vec div_grad(const Point& x) const {
    Vec g{0, 0};
    for (int j = 0; j < dim; ++j) {
      Mat h = comp[j].hess(x);
      for (int i = 0; i < dim; ++i) g[i] += h[j][i];
    }
    return g;
  }
  // X.grad f
  SmoothFunction apply(const SmoothFunction& f) const {
    SmoothFunction out;
    out.dim = dim;
    out.name = "X(" + f.name + ")";
    auto self = *this;
    out.value = [=](const Point& x) { return dot(self(x), f.grad(x), self.dim); };
    out.grad = [=](const Point& x) {
      Vec g{0, 0};
      Vec X = self(x), df = f.grad(x);
      Mat h = f.hess(x);
      for (int i = 0; i < self.dim; ++i)
        for (int j = 0; j < self.dim; ++j)
          g[i] += self.comp[j].grad(x)[i] * df[j] + X[j] * h[j][i];
      return g;
    };
    out.hess = [=](const Point& x) {
      // One central-difference level on the exact gradient.
      Mat h{};
      const double s = 1e-5;
      for (int i = 0; i < self.dim; ++i) {
        Point a = x, b = x;
        a[i] += s;
        b[i] -= s;
        Vec ga = out.grad(a), gb = out.grad(b);
        for (int j = 0; j < self.dim; ++j) h[j][i] = (ga[j] - gb[j]) / (2 * s);
      }
      return h;
    };
    return out;
  }
};

}  // namespace gfk
