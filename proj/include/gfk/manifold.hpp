#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gfk/core.hpp"
#include "gfk/diffeo.hpp"
#include "gfk/distributions.hpp"
#include "gfk/functions.hpp"
#include "gfk/quadrature.hpp"
#include "gfk/test_function.hpp"

namespace gfk {

// Points of a manifold are given in intrinsic coordinates: t in (-L, L) on
// the interval, an angle on the circle, a pair of angles on the torus.
// A chart restricts to a representative range of those coordinates (angles
// are wrapped into it) and then applies a product of increasing axis maps.
struct Chart {
  std::string name;
  int dim = 1;
  Point lo{0, 0}, hi{0, 0};
  std::array<bool, 2> periodic{false, false};
  Diffeo psi;

  Point rep(const Point& p) const {
    Point r = p;
    for (int i = 0; i < dim; ++i)
      if (periodic[i]) {
        double t = std::fmod(p[i] - lo[i], 2 * kPi);
        if (t < 0) t += 2 * kPi;
        r[i] = lo[i] + t;
      }
    return r;
  }
  bool contains(const Point& p) const {
    Point r = rep(p);
    for (int i = 0; i < dim; ++i)
      if (!(r[i] > lo[i] && r[i] < hi[i])) return false;
    return true;
  }
  Point to_chart(const Point& p) const { return psi(rep(p)); }
  Point from_chart(const Point& y) const { return psi.inv(y); }
  double det(const Point& p) const { return psi.det(rep(p)); }
  Box rep_box() const { return Box{dim, lo, hi}; }
  Box image() const { return psi.image(rep_box()); }
};

// Cutoff data of one chart, in its representative coordinates: chi_hat is
// supported in `supp`, chi1 is identically 1 on `plateau` (which contains a
// neighbourhood of supp) and vanishes outside `outer`.
struct PouEntry {
  std::function<double(const Point&)> chi, chi1;
  std::function<Vec(const Point&)> dchi, dchi1;
  Box supp, plateau, outer;
};

enum class ManifoldKind { Interval, Circle, Torus };

class Manifold {
 public:
  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const std::vector<Chart>& charts() const { return charts_; }
  const Chart& chart(int a) const { return charts_.at(a); }
  int chart_count() const { return static_cast<int>(charts_.size()); }
  const PouEntry& pou(int a) const { return pou_.at(a); }
  double half_length() const { return L_; }
  double warp() const { return warp_; }

  // Canonical intrinsic representative: angles in [-pi, pi).
  Point wrap(const Point& p) const {
    Point r = p;
    if (kind_ == ManifoldKind::Interval) return r;
    for (int i = 0; i < dim_; ++i) {
      double t = std::fmod(p[i] + kPi, 2 * kPi);
      if (t < 0) t += 2 * kPi;
      r[i] = t - kPi;
    }
    return r;
  }
  bool contains(const Point& p) const {
    return kind_ != ManifoldKind::Interval || (p[0] > -L_ && p[0] < L_);
  }
  // Shortest coordinate displacement from p to q.
  Vec displacement(const Point& p, const Point& q) const {
    Vec d{q[0] - p[0], dim_ > 1 ? q[1] - p[1] : 0.0};
    if (kind_ == ManifoldKind::Interval) return d;
    for (int i = 0; i < dim_; ++i) {
      d[i] = std::fmod(d[i], 2 * kPi);
      if (d[i] > kPi) d[i] -= 2 * kPi;
      if (d[i] < -kPi) d[i] += 2 * kPi;
    }
    return d;
  }
  // Distance for the flat metric dt^2 (sum over axes on the torus).
  double flat_distance(const Point& p, const Point& q) const { return norm(displacement(p, q), dim_); }

  double chi(int a, const Point& p) const { return pou_[a].chi(charts_[a].rep(p)); }
  double chi1(int a, const Point& p) const { return pou_[a].chi1(charts_[a].rep(p)); }
  Vec dchi(int a, const Point& p) const { return pou_[a].dchi(charts_[a].rep(p)); }
  Vec dchi1(int a, const Point& p) const { return pou_[a].dchi1(charts_[a].rep(p)); }

  // Box of intrinsic coordinates covering the manifold (for sampling).
  Box coordinate_box() const {
    if (kind_ == ManifoldKind::Interval) return Box::interval(-L_, L_);
    if (kind_ == ManifoldKind::Circle) return Box::interval(-kPi, kPi);
    return Box::rect(-kPi, kPi, -kPi, kPi);
  }

  // Chart transition psi_b o psi_a^-1 on the component of the overlap that
  // contains p.
  Diffeo transition(int a, int b, const Point& p) const {
    const Chart& A = charts_[a];
    const Chart& B = charts_[b];
    Point ra = A.rep(p), rb = B.rep(p);
    std::vector<AxisMap> axes;
    for (int i = 0; i < dim_; ++i) {
      AxisMap shift = AxisMap::affine(1.0, rb[i] - ra[i]);
      axes.push_back(AxisMap::compose(B.psi.axis(i), AxisMap::compose(shift, A.psi.axis(i).inverse())));
    }
    return Diffeo(std::move(axes));
  }

  static std::shared_ptr<const Manifold> interval(double L = 2.0, double warp = 0.0);
  static std::shared_ptr<const Manifold> circle(double warp = 0.2);
  static std::shared_ptr<const Manifold> torus(double warp = 0.2);

 private:
  ManifoldKind kind_ = ManifoldKind::Interval;
  int dim_ = 1;
  std::string name_;
  double L_ = 0.0;
  double warp_ = 0.0;
  std::vector<Chart> charts_;
  std::vector<PouEntry> pou_;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

namespace detail {

// Axis-wise cutoffs for the two angle charts. Chart A uses representatives
// in [-pi, pi), chart B in [0, 2pi).
struct AngleCutoffs {
  static constexpr double a_in = kPi / 3, a_out = 2 * kPi / 3;      // chi_A
  static constexpr double p_in_a = 0.85 * kPi, p_out_a = 0.95 * kPi;  // chi1_A
  static constexpr double p_in_b = 0.9 * kPi, p_out_b = 0.95 * kPi;   // chi1_B, around pi
};

inline double chi_axis(int which, double t) {
  using C = AngleCutoffs;
  if (which == 0) return plateau(t, C::a_in, C::a_out);
  // t is a chart-B representative; chi_B = 1 - chi_A at the same point
  double tA = t >= kPi ? t - 2 * kPi : t;
  return 1.0 - plateau(tA, C::a_in, C::a_out);
}
inline double dchi_axis(int which, double t) {
  using C = AngleCutoffs;
  if (which == 0) return plateau_d(t, C::a_in, C::a_out);
  double tA = t >= kPi ? t - 2 * kPi : t;
  return -plateau_d(tA, C::a_in, C::a_out);
}
inline double chi1_axis(int which, double t) {
  using C = AngleCutoffs;
  return which == 0 ? plateau(t, C::p_in_a, C::p_out_a) : plateau(t - kPi, C::p_in_b, C::p_out_b);
}
inline double dchi1_axis(int which, double t) {
  using C = AngleCutoffs;
  return which == 0 ? plateau_d(t, C::p_in_a, C::p_out_a) : plateau_d(t - kPi, C::p_in_b, C::p_out_b);
}
inline void angle_boxes(int which, double& slo, double& shi, double& plo, double& phi, double& olo,
                        double& ohi) {
  using C = AngleCutoffs;
  if (which == 0) {
    slo = -C::a_out, shi = C::a_out;
    plo = -C::p_in_a, phi = C::p_in_a;
    olo = -C::p_out_a, ohi = C::p_out_a;
  } else {
    slo = C::a_in, shi = 2 * kPi - C::a_in;
    plo = kPi - C::p_in_b, phi = kPi + C::p_in_b;
    olo = kPi - C::p_out_b, ohi = kPi + C::p_out_b;
  }
}

inline Chart angle_chart(const std::string& name, const std::vector<int>& which, double warp) {
  Chart c;
  c.name = name;
  c.dim = static_cast<int>(which.size());
  std::vector<AxisMap> axes;
  for (int i = 0; i < c.dim; ++i) {
    double lo = which[i] == 0 ? -kPi : 0.0;
    c.lo[i] = lo;
    c.hi[i] = lo + 2 * kPi;
    c.periodic[i] = true;
    // same amplitude on both: with lo shifted by pi the sines have opposite
    // sign on the overlaps, so the transitions are not affine
    axes.push_back(AxisMap::warp(lo, 1.0, warp));
  }
  c.psi = Diffeo(std::move(axes));
  return c;
}

inline PouEntry angle_pou(const std::vector<int>& which) {
  PouEntry e;
  int dim = static_cast<int>(which.size());
  e.chi = [=](const Point& r) {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= chi_axis(which[i], r[i]);
    return v;
  };
  e.chi1 = [=](const Point& r) {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= chi1_axis(which[i], r[i]);
    return v;
  };
  e.dchi = [=](const Point& r) {
    Vec g{0, 0};
    for (int i = 0; i < dim; ++i) {
      double v = dchi_axis(which[i], r[i]);
      for (int j = 0; j < dim; ++j)
        if (j != i) v *= chi_axis(which[j], r[j]);
      g[i] = v;
    }
    return g;
  };
  e.dchi1 = [=](const Point& r) {
    Vec g{0, 0};
    for (int i = 0; i < dim; ++i) {
      double v = dchi1_axis(which[i], r[i]);
      for (int j = 0; j < dim; ++j)
        if (j != i) v *= chi1_axis(which[j], r[j]);
      g[i] = v;
    }
    return g;
  };
  e.supp.dim = e.plateau.dim = e.outer.dim = dim;
  for (int i = 0; i < dim; ++i)
    angle_boxes(which[i], e.supp.lo[i], e.supp.hi[i], e.plateau.lo[i], e.plateau.hi[i],
                e.outer.lo[i], e.outer.hi[i]);
  return e;
}

}  // namespace detail

inline ManifoldPtr Manifold::interval(double L, double warp) {
  auto m = std::make_shared<Manifold>();
  m->kind_ = ManifoldKind::Interval;
  m->dim_ = 1;
  m->name_ = "interval";
  m->L_ = L;
  m->warp_ = warp;
  Chart c;
  c.name = "x";
  c.dim = 1;
  c.lo = {-L, 0};
  c.hi = {L, 0};
  c.psi = Diffeo({AxisMap::warp(-L, L / kPi, warp)});
  m->charts_.push_back(c);
  PouEntry e;
  e.chi = e.chi1 = [](const Point&) { return 1.0; };
  e.dchi = e.dchi1 = [](const Point&) { return Vec{0, 0}; };
  e.supp = e.plateau = e.outer = Box::interval(-L, L);
  m->pou_.push_back(e);
  return m;
}

inline ManifoldPtr Manifold::circle(double warp) {
  auto m = std::make_shared<Manifold>();
  m->kind_ = ManifoldKind::Circle;
  m->dim_ = 1;
  m->name_ = "circle";
  m->warp_ = warp;
  m->charts_ = {detail::angle_chart("A", {0}, warp), detail::angle_chart("B", {1}, warp)};
  m->pou_ = {detail::angle_pou({0}), detail::angle_pou({1})};
  return m;
}

inline ManifoldPtr Manifold::torus(double warp) {
  auto m = std::make_shared<Manifold>();
  m->kind_ = ManifoldKind::Torus;
  m->dim_ = 2;
  m->name_ = "torus";
  m->warp_ = warp;
  for (int a : {0, 1})
    for (int b : {0, 1}) {
      std::string n = std::string(a ? "B" : "A") + (b ? "B" : "A");
      m->charts_.push_back(detail::angle_chart(n, {a, b}, warp));
      m->pou_.push_back(detail::angle_pou({a, b}));
    }
  return m;
}

// Function on the manifold given in intrinsic coordinates, read in chart a.
inline SmoothFunction in_chart(const SmoothFunction& f, const Chart& c) {
  SmoothFunction g;
  g.dim = f.dim;
  g.name = f.name;
  auto inv = c.psi.inverse();
  g.value = [=](const Point& y) { return f.value(inv(y)); };
  g.grad = [=](const Point& y) {
    Point q = inv(y);
    Vec d = f.grad(q), j = inv.jac_diag(y);
    return Vec{d[0] * j[0], d[1] * j[1]};
  };
  g.hess = [=](const Point& y) { return f.compose(inv).hess(y); };
  return g;
}

// Compactly supported top-degree form, stored as weighted chart pieces
// w_i * psi_i^*(c_i d^n y).
struct FormPiece {
  int chart = 0;
  double weight = 1.0;
  TestFunction coeff;
};

class NForm {
 public:
  NForm() = default;
  explicit NForm(ManifoldPtr m, std::vector<FormPiece> pieces = {})
      : m_(std::move(m)), pieces_(std::move(pieces)) {}

  const ManifoldPtr& manifold() const { return m_; }
  const std::vector<FormPiece>& pieces() const { return pieces_; }
  void add(int chart, double w, TestFunction c) {
    if (w != 0.0) pieces_.push_back({chart, w, std::move(c)});
  }

  double integral() const {
    double s = 0.0;
    for (const auto& p : pieces_) s += p.weight * p.coeff.integral();
    return s;
  }

  // Density with respect to the intrinsic coordinate volume at q.
  double density(const Point& q) const {
    double s = 0.0;
    for (const auto& p : pieces_) {
      const Chart& c = m_->chart(p.chart);
      if (!c.contains(q)) continue;
      Point r = c.rep(q);
      double v = p.coeff(c.psi(r));
      if (v != 0.0) s += p.weight * v * c.psi.det(r);
    }
    return s;
  }

  // Coefficient in chart b at chart coordinates y.
  double coefficient(int b, const Point& y) const {
    const Chart& c = m_->chart(b);
    Point r = c.from_chart(y);
    return density(r) / c.psi.det(r);
  }

  // int f omega for a function given in intrinsic coordinates.
  double integrate_function(const SmoothFunction& f) const {
    double s = 0.0;
    for (const auto& p : pieces_) {
      const Chart& c = m_->chart(p.chart);
      s += p.weight * p.coeff.integrate([&](const Point& y) { return f.value(c.from_chart(y)); });
    }
    return s;
  }
  double integrate_function(const std::function<double(const Point&)>& f) const {
    double s = 0.0;
    for (const auto& p : pieces_) {
      const Chart& c = m_->chart(p.chart);
      s += p.weight * p.coeff.integrate([&](const Point& y) { return f(c.from_chart(y)); });
    }
    return s;
  }

  // Support bounds of each piece in intrinsic (representative) coordinates.
  std::vector<std::pair<int, Box>> support_boxes() const {
    std::vector<std::pair<int, Box>> out;
    for (const auto& p : pieces_)
      out.emplace_back(p.chart, m_->chart(p.chart).psi.preimage(p.coeff.support_box()));
    return out;
  }

  friend NForm operator+(const NForm& a, const NForm& b) {
    NForm r = a;
    for (const auto& p : b.pieces_) r.pieces_.push_back(p);
    if (!r.m_) r.m_ = b.m_;
    return r;
  }
  friend NForm operator*(double c, const NForm& a) {
    NForm r = a;
    for (auto& p : r.pieces_) p.weight *= c;
    return r;
  }
  friend NForm operator-(const NForm& a, const NForm& b) { return a + (-1.0) * b; }

 private:
  ManifoldPtr m_;
  std::vector<FormPiece> pieces_;
};

// psi_a^*(phi d^n y)
inline NForm chart_form(ManifoldPtr m, int chart, TestFunction phi) {
  NForm w(std::move(m));
  w.add(chart, 1.0, std::move(phi));
  return w;
}

// Form with a given intrinsic density rho, split over the charts by the
// partition of unity.
inline NForm form_from_density(ManifoldPtr m, const SmoothFunction& rho) {
  NForm w(m);
  for (int a = 0; a < m->chart_count(); ++a) {
    const Chart& c = m->chart(a);
    const PouEntry& e = m->pou(a);
    Box img = c.psi.image(e.supp);
    auto f = [m, a, c, rho](const Point& y) {
      Point r = c.psi.inv(y);
      return m->pou(a).chi(r) * rho.value(r) / c.psi.det(r);
    };
    auto g = [f, img](const Point& y) {
      Vec out{0, 0};
      const double h = 1e-6 * img.max_width();
      for (int i = 0; i < img.dim; ++i) {
        Point p = y, q = y;
        p[i] += h;
        q[i] -= h;
        out[i] = (f(p) - f(q)) / (2 * h);
      }
      return out;
    };
    w.add(a, 1.0, TestFunction::from(m->dim(), f, g, img, m->dim() == 1 ? 256 : 64));
  }
  return w;
}

// sum_b int chi_b(q) rho_omega(q) dq, each term by adaptive quadrature in
// chart b. Agrees with NForm::integral() when the partition sums to one.
inline double integrate_form(const NForm& w, double tol = 1e-12) {
  const auto& m = w.manifold();
  double s = 0.0;
  for (int b = 0; b < m->chart_count(); ++b) {
    const Chart& c = m->chart(b);
    const Box& supp = m->pou(b).supp;
    // restrict to the pieces' supports, moved into chart b's representatives
    Box region{};
    bool first = true;
    for (const auto& [a, r] : w.support_boxes()) {
      Point ctr = r.center(), rb = c.rep(ctr);
      Box moved = r;
      bool inside = true;
      for (int i = 0; i < m->dim(); ++i) {
        moved.lo[i] += rb[i] - ctr[i];
        moved.hi[i] += rb[i] - ctr[i];
        inside = inside && moved.lo[i] >= c.lo[i] && moved.hi[i] <= c.hi[i];
      }
      if (!inside) moved = supp;
      region = first ? moved : hull(region, moved);
      first = false;
    }
    if (first) continue;
    region = intersect(region, supp);
    if (region.empty()) continue;
    Box img = c.psi.image(region);
    auto f = [&](const Point& y) {
      Point r = c.psi.inv(y);
      double k = m->pou(b).chi(r);
      // rho(q) dq = rho(q) / det(psi)(q) dy
      return k == 0.0 ? 0.0 : k * w.density(r) / c.psi.det(r);
    };
    s += integrate(f, img, tol, 16).value;
  }
  return s;
}

// Normalized bump form of radius `radius` around p0, placed in chart `a`.
inline NForm bump_form(ManifoldPtr m, int a, const Point& p0, double radius) {
  const Chart& c = m->chart(a);
  int dim = m->dim();
  TestFunction b = TestFunction::from(
      dim, [dim](const Point& u) {
        double r2 = dim == 1 ? u[0] * u[0] : u[0] * u[0] + u[1] * u[1];
        return r2 < 1 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
      },
      [dim](const Point& u) {
        double r2 = dim == 1 ? u[0] * u[0] : u[0] * u[0] + u[1] * u[1];
        if (r2 >= 1) return Vec{0, 0};
        double s = 1 - r2, f = -2 * std::exp(-1 / s) / (s * s);
        return Vec{f * u[0], dim > 1 ? f * u[1] : 0.0};
      },
      dim == 1 ? Box::interval(-1, 1) : Box::rect(-1, 1, -1, 1));
  TestFunction s = b.scale_translate(radius, c.to_chart(p0));
  double I = s.integral();
  return chart_form(m, a, (1.0 / I) * s);
}

// Vector field in intrinsic coordinates (components must be periodic on
// the circle and torus).
struct VectorField {
  int dim = 1;
  std::vector<SmoothFunction> comp;
  std::string name;

  Vec operator()(const Point& p) const {
    Vec v{0, 0};
    for (int j = 0; j < dim; ++j) v[j] = comp[j].value(p);
    return v;
  }

  // Components in chart a: X_a^j(y) = psi_j'(q_j) X^j(q).
  LocalField local(const Manifold& m, int a) const {
    const Chart c = m.chart(a);
    LocalField out;
    out.dim = dim;
    auto self = *this;
    for (int j = 0; j < dim; ++j) {
      SmoothFunction f;
      f.dim = dim;
      f.name = name;
      f.value = [=](const Point& y) {
        Point q = c.from_chart(y);
        return c.psi.axis(j).df(q[j]) * self.comp[j].value(q);
      };
      f.grad = [=](const Point& y) {
        Point q = c.from_chart(y);
        Vec d = c.psi.jac_diag(q);
        Vec gX = self.comp[j].grad(q);
        double Xj = self.comp[j].value(q);
        Vec g{0, 0};
        for (int i = 0; i < self.dim; ++i) {
          double v = d[j] * gX[i];
          if (i == j) v += c.psi.axis(j).d2f(q[j]) * Xj;
          g[i] = v / d[i];
        }
        return g;
      };
      f.hess = [=](const Point& y) {
        Mat h{};
        const double s = 1e-5;
        for (int i = 0; i < self.dim; ++i) {
          Point p1 = y, p2 = y;
          p1[i] += s;
          p2[i] -= s;
          Vec a1 = f.grad(p1), a2 = f.grad(p2);
          for (int k = 0; k < self.dim; ++k) h[k][i] = (a1[k] - a2[k]) / (2 * s);
        }
        return h;
      };
      out.comp.push_back(f);
    }
    return out;
  }

  // Flow by classical RK4 with steps of at most 0.01 in t.
  Point flow(const Point& p, double t) const {
    int n = std::max(1, static_cast<int>(std::ceil(std::abs(t) / 0.01)));
    double h = t / n;
    Point x = p;
    for (int k = 0; k < n; ++k) {
      Vec k1 = (*this)(x);
      Vec k2 = (*this)(axpy(0.5 * h, k1, x));
      Vec k3 = (*this)(axpy(0.5 * h, k2, x));
      Vec k4 = (*this)(axpy(h, k3, x));
      for (int i = 0; i < dim; ++i) x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return x;
  }

  SmoothFunction apply(const SmoothFunction& f) const { return LocalField{dim, comp}.apply(f); }

  static VectorField zero(int dim) {
    return {dim, std::vector<SmoothFunction>(dim, SmoothFunction::constant(dim, 0.0)), "0"};
  }
};

// L_X omega, piecewise: L_X(rho d^n y) = div(rho X_a) d^n y in each chart.
inline NForm lie_form(const VectorField& X, const NForm& w) {
  NForm out(w.manifold());
  const auto& m = *w.manifold();
  for (const auto& p : w.pieces()) out.add(p.chart, p.weight, lie_density(p.coeff, X.local(m, p.chart)));
  return out;
}

// Riemannian metric h = exp(2u) * (flat metric) with a conformal factor u
// given in intrinsic coordinates. Distances: closed form along the axis in 1D,
// straight coordinate segments in 2D (exact for constant u).
struct Metric {
  SmoothFunction u;
  std::string name;
  bool constant_factor = false;

  static Metric flat(int dim) { return {SmoothFunction::constant(dim, 0.0), "flat", true}; }
  static Metric scaled(int dim, double factor) {
    return {SmoothFunction::constant(dim, 0.5 * std::log(factor)), "scaled", true};
  }
  static Metric conformal(SmoothFunction u) { return {std::move(u), "conformal", false}; }

  Mat matrix(const Point& p) const {
    double e = std::exp(2 * u.value(p));
    return Mat{{{e, 0}, {0, e}}};
  }

  // Length of the straight coordinate segment from p along d.
  double segment_length(const Point& p, const Vec& d, int dim) const {
    double len = norm(d, dim);
    if (len == 0.0) return 0.0;
    return len * native_integrate(
                     [&](const Point& s) {
                       double t = 0.5 * (s[0] + 1.0);
                       return 0.5 * std::exp(u.value(axpy(t, d, p)));
                     },
                     Box::interval(-1, 1), 8);
  }

  double distance(const Manifold& m, const Point& p, const Point& q) const {
    Vec d = m.displacement(p, q);
    if (m.dim() == 1) {
      double direct = segment_length(p, d, 1);
      if (m.kind() != ManifoldKind::Circle) return direct;
      Vec other{d[0] > 0 ? d[0] - 2 * kPi : d[0] + 2 * kPi, 0};
      return std::min(direct, segment_length(p, other, 1));
    }
    // 2D: exact for constant u; otherwise valid only at short range.
    if (norm(d, 2) > 0.5 && !constant_factor)
      throw NumericalError("Metric::distance: non-flat 2D distance only available at short range");
    return segment_length(p, d, 2);
  }
};

struct BallCheck {
  double C = 0.0;
  double eps0 = 0.0;
  bool pass = false;
};

// Smallest C with B^(2)_eps(p) inside B^(1)_{C eps}(p): sample the boundary
// of each h2-ball along coordinate directions and take the largest h1/eps.
inline BallCheck riemann_ball_check(const Metric& h1, const Metric& h2, const Manifold& m,
                                    const std::vector<Point>& K, const std::vector<double>& eps) {
  BallCheck r;
  r.eps0 = eps.empty() ? 0.0 : *std::max_element(eps.begin(), eps.end());
  const int ndir = m.dim() == 1 ? 2 : 16;
  for (const auto& p : K)
    for (double e : eps)
      for (int k = 0; k < ndir; ++k) {
        Vec dir = m.dim() == 1 ? Vec{k ? -1.0 : 1.0, 0} : Vec{std::cos(2 * kPi * k / ndir), std::sin(2 * kPi * k / ndir)};
        // bisection for the h2-distance e along the ray
        double a = 0.0, b = e;
        while (h2.distance(m, p, axpy(b, dir, p)) < e) b *= 2;
        for (int it = 0; it < 80; ++it) {
          double c = 0.5 * (a + b);
          (h2.distance(m, p, axpy(c, dir, p)) < e ? a : b) = c;
        }
        Point q = axpy(0.5 * (a + b), dir, p);
        r.C = std::max(r.C, h1.distance(m, p, q) / e);
      }
  r.pass = std::isfinite(r.C) && r.C > 0.0 && r.C < 1e6;
  return r;
}

}  // namespace gfk
