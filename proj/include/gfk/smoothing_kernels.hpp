#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gfk/asymptotics.hpp"
#include "gfk/local_colombeau.hpp"
#include "gfk/manifold.hpp"
#include "gfk/mollifier.hpp"

namespace gfk {

// 1 on (0, 1/3], 0 on [1/2, inf), smooth in between; argument is eps / eps0.
inline double lambda_ramp(double s) { return 1.0 - smoothstep(6.0 * (s - 1.0 / 3.0)); }

class SmoothingKernel {
 public:
  SmoothingKernel(ManifoldPtr m, int grading, std::string name)
      : m_(std::move(m)), grading_(grading), name_(std::move(name)) {}
  virtual ~SmoothingKernel() = default;
  const ManifoldPtr& manifold() const { return m_; }
  int grading() const { return grading_; }
  const std::string& name() const { return name_; }

  virtual NForm at(double eps, const Point& p) const = 0;
  NForm operator()(double eps, const Point& p) const { return at(eps, p); }
  // Below this eps the kernel is free of reference-form terms for p in K.
  virtual double eps_K(const Box& K) const = 0;

 protected:
  ManifoldPtr m_;
  int grading_;
  std::string name_;
};

using KernelPtr = std::shared_ptr<const SmoothingKernel>;

// Sum over charts of chi_a(p) [lambda_a(eps) psi_a^*(eps^-n phi((y - psi_a p)/eps) chi1_a(y) dy)
// + (1 - lambda_a(eps)) omega_ref].
class ChartKernel : public SmoothingKernel {
 public:
  ChartKernel(ManifoldPtr m, Mollifier moll, NForm omega_ref, std::string name)
      : SmoothingKernel(m, moll.moment_order, std::move(name)), moll_(std::move(moll)), ref_(std::move(omega_ref)) {
    if (moll_.dim != m_->dim()) throw DomainError("build_kernel: mollifier dimension does not match the manifold");
    if (std::abs(ref_.integral() - 1.0) > 1e-10) throw DomainError("build_kernel: reference form must have unit integral");
    for (int a = 0; a < m_->chart_count(); ++a) {
      const Chart& c = m_->chart(a);
      const PouEntry& e = m_->pou(a);
      plateau_img_.push_back(c.psi.image(e.plateau));
      if (m_->kind() == ManifoldKind::Interval) {
        eps0_.push_back(0.0);  // position dependent
        continue;
      }
      Box s = c.psi.image(e.supp), w = plateau_img_.back();
      double gap = kInf;
      for (int i = 0; i < m_->dim(); ++i) gap = std::min({gap, s.lo[i] - w.lo[i], w.hi[i] - s.hi[i]});
      if (!(gap > 0)) throw DomainError("build_kernel: chart " + c.name + " leaves no room around the cutoff support");
      eps0_.push_back(std::min(1.0, 0.999 * gap / moll_.radius));
    }
  }

  const Mollifier& mollifier() const { return moll_; }
  const NForm& reference_form() const { return ref_; }

  // eps0 of chart a at p (constant on the circle and torus).
  double eps0(int a, const Point& p) const {
    if (m_->kind() != ManifoldKind::Interval) return eps0_[a];
    const Chart& c = m_->chart(a);
    Box img = c.image();
    double y = c.to_chart(p)[0], lo = img.lo[0], hi = img.hi[0];
    if (!(y > lo && y < hi)) return 0.0;
    return std::min(1.0, (hi - y) * (y - lo) / ((hi - lo) * moll_.radius));
  }
  double lambda(int a, double eps, const Point& p) const {
    double e0 = eps0(a, p);
    return e0 > 0 ? lambda_ramp(eps / e0) : 0.0;
  }

  NForm at(double eps, const Point& p) const override {
    NForm out(m_);
    double ref_w = 0.0;
    for (int a = 0; a < m_->chart_count(); ++a) {
      double c = m_->chi(a, p);
      if (c == 0.0) continue;
      double lam = lambda(a, eps, p);
      if (lam > 0.0) {
        const Chart& ch = m_->chart(a);
        TestFunction t = moll_.base.scale_translate(eps, ch.to_chart(p));
        Box s = t.support_box();
        bool inside = true;
        for (int i = 0; i < m_->dim(); ++i)
          inside = inside && s.lo[i] >= plateau_img_[a].lo[i] && s.hi[i] <= plateau_img_[a].hi[i];
        if (!inside) {
          auto m = m_;
          t = t.times([m, a](const Point& y) { return m->pou(a).chi1(m->chart(a).from_chart(y)); },
                      [m, a](const Point& y) {
                        const Chart& cc = m->chart(a);
                        Point r = cc.from_chart(y);
                        Vec g = m->pou(a).dchi1(r), d = cc.psi.jac_diag(r);
                        return Vec{g[0] / d[0], cc.dim > 1 ? g[1] / d[1] : 0.0};
                      });
        }
        out.add(a, c * lam, t);
      }
      ref_w += c * (1.0 - lam);
    }
    if (ref_w > 0.0)
      for (const auto& pc : ref_.pieces()) out.add(pc.chart, ref_w * pc.weight, pc.coeff);
    return out;
  }

  double eps_K(const Box& K) const override {
    if (m_->kind() != ManifoldKind::Interval) return *std::min_element(eps0_.begin(), eps0_.end()) / 3.0;
    return std::min(eps0(0, {K.lo[0], 0}), eps0(0, {K.hi[0], 0})) / 3.0;
  }

 private:
  Mollifier moll_;
  NForm ref_;
  std::vector<double> eps0_;
  std::vector<Box> plateau_img_;
};

// Default reference form: normalized bump of radius 0.5 in the first chart.
inline NForm default_reference_form(const ManifoldPtr& m) {
  Point c{0.0, 0.0};
  return bump_form(m, 0, c, 0.5);
}

inline KernelPtr build_kernel(const ManifoldPtr& m, const Mollifier& moll, NForm omega_ref = {},
                              std::string name = "") {
  if (!omega_ref.manifold()) omega_ref = default_reference_form(m);
  if (omega_ref.manifold() != m) throw DomainError("build_kernel: reference form lives on another manifold");
  if (name.empty()) name = m->name() + "-q" + std::to_string(moll.moment_order) + "-" + profile_name(moll.profile);
  return std::make_shared<ChartKernel>(m, moll, std::move(omega_ref), std::move(name));
}

// ---------------------------------------------------------------------------
// Two-point Lie derivatives of kernel-valued maps p -> Phi(p)

using FormMap = std::function<NForm(const Point&)>;

// (L'_X + L_X): flow difference in the p slot plus the Lie derivative in q.
inline FormMap two_point_lie(const ManifoldPtr& m, const FormMap& F, const VectorField& X, double h) {
  return [=](const Point& p) {
    NForm a = F(m->wrap(X.flow(p, h))), b = F(m->wrap(X.flow(p, -h)));
    return (0.5 / h) * a - (0.5 / h) * b + lie_form(X, F(p));
  };
}

inline FormMap q_lie(const FormMap& F, const VectorField& Y) {
  return [=](const Point& p) { return lie_form(Y, F(p)); };
}

// Sample points covering the supports of the pieces of w, one grid per chart.
inline std::vector<Point> support_samples(const NForm& w, int per_axis) {
  const auto& m = w.manifold();
  std::vector<Point> out;
  for (int a = 0; a < m->chart_count(); ++a) {
    bool any = false;
    Box h{};
    for (const auto& [c, b] : w.support_boxes())
      if (c == a) {
        h = any ? hull(h, b) : b;
        any = true;
      }
    if (!any) continue;
    int n1 = m->dim() > 1 ? per_axis : 1;
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < n1; ++j) {
        Point q{h.lo[0] + h.width(0) * i / (per_axis - 1), 0.0};
        if (m->dim() > 1) q[1] = h.lo[1] + h.width(1) * j / (per_axis - 1);
        out.push_back(q);
      }
  }
  return out;
}

inline double sup_density(const NForm& w, int per_axis) {
  double s = 0.0;
  for (const auto& q : support_samples(w, per_axis)) s = std::max(s, std::abs(w.density(q)));
  return s;
}

// ---------------------------------------------------------------------------
// Validation

struct KernelGrid {
  Box K;
  int per_axis = 41;
  int q_per_axis = 41;
  std::vector<Point> points() const {
    std::vector<Point> out;
    int n1 = K.dim > 1 ? per_axis : 1;
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < n1; ++j) {
        Point p{per_axis > 1 ? K.lo[0] + K.width(0) * i / (per_axis - 1) : K.center()[0], 0.0};
        if (K.dim > 1) p[1] = per_axis > 1 ? K.lo[1] + K.width(1) * j / (per_axis - 1) : K.center()[1];
        out.push_back(p);
      }
    return out;
  }
};

struct SupportReport {
  std::vector<double> eps, ratio;  // max support radius / eps per ladder point
  double C = 0.0;
  bool pass = false;
};

// Largest distance from p to the support of Phi(eps, p), over sampled p.
inline double support_radius(const NForm& w, const Point& p, const Metric& h) {
  const auto& m = *w.manifold();
  double r = 0.0;
  for (const auto& [a, b] : w.support_boxes()) {
    int nc = m.dim() > 1 ? 4 : 2;
    for (int k = 0; k < nc; ++k) {
      Point q{(k & 1) ? b.hi[0] : b.lo[0], (k & 2) ? b.hi[1] : b.lo[1]};
      if (m.dim() == 1) q[1] = 0.0;
      r = std::max(r, h.distance(m, p, q));
    }
  }
  return r;
}

inline SupportReport validate_support(const SmoothingKernel& k, const KernelGrid& K, const EpsilonLadder& ladder,
                                      const Metric& h) {
  if (ladder.eps0 > k.eps_K(K.K) + 1e-15)
    throw DomainError("validate_kernel: ladder starts above the kernel's eps_K");
  SupportReport r;
  for (double e : ladder.values()) {
    double mx = 0.0;
    for (const auto& p : K.points()) mx = std::max(mx, support_radius(k.at(e, p), p, h) / e);
    r.eps.push_back(e);
    r.ratio.push_back(mx);
  }
  double lo = *std::min_element(r.ratio.begin(), r.ratio.end());
  r.C = *std::max_element(r.ratio.begin(), r.ratio.end());
  r.pass = std::isfinite(r.C) && lo > 0 && r.C <= 2.0 * lo;
  return r;
}

struct GrowthReport {
  int k = 0, l = 0;
  std::vector<double> eps, values;
  AsymptoticEstimate est;
  double required = 0.0;
  bool pass = false;
};

// sup over p in K and q in supp of |L_Y1..L_Yl (L'_X1 + L_X1)..(L'_Xk + L_Xk) Phi(eps, p)(q)|
inline GrowthReport validate_growth(const SmoothingKernel& kern, const KernelGrid& K, const EpsilonLadder& ladder,
                                    const std::vector<VectorField>& X, const std::vector<VectorField>& Y) {
  if (X.size() + Y.size() > 3) throw DomainError("validate_kernel: k + l must be at most 3");
  if (ladder.eps0 > kern.eps_K(K.K) + 1e-15)
    throw DomainError("validate_kernel: ladder starts above the kernel's eps_K");
  GrowthReport r;
  r.k = static_cast<int>(X.size());
  r.l = static_cast<int>(Y.size());
  const auto& m = kern.manifold();
  r.required = -(m->dim() + r.l);
  for (double e : ladder.values()) {
    FormMap F = [&kern, e](const Point& p) { return kern.at(e, p); };
    for (const auto& x : X) F = two_point_lie(m, F, x, 1e-3 * e);
    for (const auto& y : Y) F = q_lie(F, y);
    double s = 0.0;
    for (const auto& p : K.points()) s = std::max(s, sup_density(F(p), K.q_per_axis));
    r.eps.push_back(e);
    r.values.push_back(s);
  }
  r.est = estimate_order(r.eps, r.values);
  r.pass = big_o_holds(r.est, r.required);
  return r;
}

struct GradingReport {
  std::string function;
  std::vector<double> eps, values;
  AsymptoticEstimate est;
  bool pass = false;
};

// sup_K |f(p) - int f Phi(eps, p)|, evaluated as |int (f(q) - f(p)) Phi(eps, p)(q)|.
inline double grading_defect(const SmoothingKernel& k, const SmoothFunction& f, double eps, const Point& p) {
  const auto& m = *k.manifold();
  NForm w = k.at(eps, p);
  return w.integrate_function([&](const Point& q) { return f.increment({}, p, m.displacement(p, q)); });
}

inline GradingReport validate_grading(const SmoothingKernel& k, const KernelGrid& K, const EpsilonLadder& ladder,
                                      const SmoothFunction& f, int m) {
  if (ladder.eps0 > k.eps_K(K.K) + 1e-15)
    throw DomainError("validate_kernel: ladder starts above the kernel's eps_K");
  GradingReport r;
  r.function = f.name;
  for (double e : ladder.values()) {
    double s = 0.0;
    for (const auto& p : K.points()) s = std::max(s, std::abs(grading_defect(k, f, e, p)));
    r.eps.push_back(e);
    r.values.push_back(s);
  }
  r.est = estimate_order(r.eps, r.values, 8, kMomentFloor);
  r.pass = big_o_holds(r.est, m + 1);
  return r;
}

// Chart-a coordinate monomial y^beta, cut off by chi1_a so it is smooth on M.
inline SmoothFunction chart_monomial(const ManifoldPtr& m, int a, const MultiIndex& be) {
  SmoothFunction f;
  f.dim = m->dim();
  f.name = "y" + std::to_string(a) + "^" + std::to_string(be.a[0]) + (m->dim() > 1 ? "," + std::to_string(be.a[1]) : "");
  f.value = [m, a, be](const Point& q) {
    const Chart& c = m->chart(a);
    if (!c.contains(q)) return 0.0;
    double k = m->chi1(a, q);
    return k == 0.0 ? 0.0 : k * monomial(c.to_chart(q), be, m->dim());
  };
  auto v = f.value;
  int dim = m->dim();
  f.grad = [v, dim](const Point& q) {
    Vec g{0, 0};
    const double h = 1e-6;
    for (int i = 0; i < dim; ++i) {
      Point a = q, b = q;
      a[i] += h;
      b[i] -= h;
      g[i] = (v(a) - v(b)) / (2 * h);
    }
    return g;
  };
  f.hess = [g = f.grad, dim](const Point& q) {
    Mat H{};
    const double h = 1e-5;
    for (int i = 0; i < dim; ++i) {
      Point a = q, b = q;
      a[i] += h;
      b[i] -= h;
      Vec ga = g(a), gb = g(b);
      for (int j = 0; j < dim; ++j) H[j][i] = (ga[j] - gb[j]) / (2 * h);
    }
    return H;
  };
  return f;
}

// Grading test set: chart-0 coordinate monomials of degree 1..m and two
// global trigonometric functions.
inline std::vector<SmoothFunction> grading_test_functions(const ManifoldPtr& m, int deg) {
  std::vector<SmoothFunction> out;
  for (const auto& be : multi_indices(m->dim(), 1, deg)) out.push_back(chart_monomial(m, 0, be));
  if (m->dim() == 1) {
    out.push_back(SmoothFunction::trig(1, {{1.0, {1, 0}, 0.0}}, 0.0, "sin"));
    out.push_back(SmoothFunction::trig(1, {{0.3, {2, 0}, 0.4}, {0.2, {3, 0}, 1.0}}, 0.5, "trig2"));
  } else {
    out.push_back(SmoothFunction::trig(2, {{1.0, {1, 1}, 0.0}}, 0.0, "sin(t1+t2)"));
    out.push_back(SmoothFunction::trig(2, {{0.3, {1, -2}, 0.3}, {0.2, {0, 3}, 1.0}}, 0.5, "trig2"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Localization

// phi(eps, x)(y) d^n y = eps^n ((psi_a^-1)^* Phi(eps, psi_a^-1 x))(eps y + x), on the
// set of (eps, x) whose kernel support stays inside chart a.
inline FamilyPtr localize_kernel(const KernelPtr& k, int a) {
  const auto& m = k->manifold();
  if (a < 0 || a >= m->chart_count()) throw DomainError("localize_kernel: chart not in the kernel's atlas");
  auto f = std::make_shared<TestObjectFamily>();
  f->dim = m->dim();
  f->name = "loc(" + k->name() + "," + m->chart(a).name + ")";
  f->weak = true;
  auto inside = [m, a](const NForm& w) {
    const Chart& c = m->chart(a);
    for (const auto& [i, b] : w.support_boxes()) {
      Point ctr = b.center(), r = c.rep(ctr);
      for (int d = 0; d < m->dim(); ++d)
        if (!(b.lo[d] + r[d] - ctr[d] > c.lo[d] && b.hi[d] + r[d] - ctr[d] < c.hi[d])) return false;
    }
    return true;
  };
  f->domain = [m, a, k, inside](double eps, const Point& x) {
    const Chart& c = m->chart(a);
    if (!c.image().contains(x)) return false;
    return inside(k->at(eps, c.from_chart(x)));
  };
  f->phi = [m, a, k](double eps, const Point& x) {
    const Chart& c = m->chart(a);
    NForm w = k->at(eps, c.from_chart(x));
    std::vector<std::pair<double, TestFunction>> terms;
    for (const auto& pc : w.pieces()) {
      Point ctr = m->chart(pc.chart).psi.preimage(pc.coeff.support_box()).center();
      Diffeo tau = m->transition(pc.chart, a, ctr);
      std::vector<AxisMap> axes;
      for (int i = 0; i < m->dim(); ++i)
        axes.push_back(AxisMap::compose(AxisMap::affine(1.0 / eps, -x[i] / eps), tau.axis(i)));
      terms.emplace_back(pc.weight, pc.coeff.pushforward(Diffeo(std::move(axes))));
    }
    return TestFunction::combine(terms);
  };
  f->eps0 = [f](const Box& K) {
    // largest ladder-style eps with the whole grid inside the domain
    KernelGrid g{K, K.dim > 1 ? 5 : 21, 0};
    double e = 1.0;
    for (int it = 0; it < 60; ++it) {
      bool ok = true;
      for (const auto& x : g.points()) ok = ok && f->domain(e, x);
      if (ok) return e;
      e *= 0.8;
    }
    return 0.0;
  };
  return f;
}

// Smooth box cutoff in chart coordinates: 1 on the inner box, 0 outside the outer one.
struct BoxCutoff {
  Box inner, outer;
  double operator()(const Point& y) const {
    double v = 1.0;
    for (int i = 0; i < inner.dim; ++i) v *= axis(i, y[i]);
    return v;
  }
  Vec grad(const Point& y) const {
    Vec g{0, 0};
    for (int i = 0; i < inner.dim; ++i) {
      double v = axis_d(i, y[i]);
      for (int j = 0; j < inner.dim; ++j)
        if (j != i) v *= axis(j, y[j]);
      g[i] = v;
    }
    return g;
  }
  double axis(int i, double t) const {
    double lo = inner.lo[i] - outer.lo[i], hi = outer.hi[i] - inner.hi[i];
    if (t < inner.lo[i]) return 1.0 - smoothstep((inner.lo[i] - t) / lo);
    if (t > inner.hi[i]) return 1.0 - smoothstep((t - inner.hi[i]) / hi);
    return 1.0;
  }
  double axis_d(int i, double t) const {
    double lo = inner.lo[i] - outer.lo[i], hi = outer.hi[i] - inner.hi[i];
    if (t < inner.lo[i]) return smoothstep_d((inner.lo[i] - t) / lo) / lo;
    if (t > inner.hi[i]) return -smoothstep_d((t - inner.hi[i]) / hi) / hi;
    return 0.0;
  }
};

// (1 - chi(p) lambda(eps)) Phi1(eps, p) + chi(p) lambda(eps) psi_a^*(eps^-n phi(eps, psi_a p)((y - psi_a p)/eps) chi1(y) dy)
class GlobalizedKernel : public SmoothingKernel {
 public:
  GlobalizedKernel(FamilyPtr fam, int a, KernelPtr base, BoxCutoff chi, BoxCutoff chi1, int grading)
      : SmoothingKernel(base->manifold(), grading, "glob(" + fam->name + ")"),
        fam_(std::move(fam)), a_(a), base_(std::move(base)), chi_(chi), chi1_(chi1) {
    if (fam_->weak) throw DomainError("globalize_test_object: family must be defined on all of (0,1] x Omega");
    // eta: scaled supports of phi(eps, x), x in supp chi, stay where chi1 = 1
    double R = 0.0;
    KernelGrid g{chi_.outer, m_->dim() > 1 ? 5 : 21, 0};
    for (const auto& x : g.points()) {
      Box s = (*fam_)(1.0, x).support_box();
      for (int i = 0; i < m_->dim(); ++i) R = std::max({R, std::abs(s.lo[i]), std::abs(s.hi[i])});
    }
    double gap = kInf;
    for (int i = 0; i < m_->dim(); ++i)
      gap = std::min({gap, chi_.outer.lo[i] - chi1_.inner.lo[i], chi1_.inner.hi[i] - chi_.outer.hi[i]});
    if (!(gap > 0 && R > 0)) throw DomainError("globalize_test_object: family supports do not fit the chi1 plateau");
    eta_ = std::min(1.0, 0.999 * gap / R);
  }

  double eta() const { return eta_; }
  double chi_hat(const Point& p) const {
    const Chart& c = m_->chart(a_);
    return c.contains(p) ? chi_(c.to_chart(p)) : 0.0;
  }

  NForm at(double eps, const Point& p) const override {
    double w = chi_hat(p) * lambda_ramp(eps / eta_);
    NForm out = w == 1.0 ? NForm(m_) : (1.0 - w) * base_->at(eps, p);
    if (w > 0.0) {
      Point x = m_->chart(a_).to_chart(p);
      BoxCutoff c1 = chi1_;
      TestFunction t = (*fam_)(eps, x).scale_translate(eps, x);
      t = t.times([c1](const Point& y) { return c1(y); }, [c1](const Point& y) { return c1.grad(y); });
      out.add(a_, w, t);
    }
    return out;
  }

  double eps_K(const Box& K) const override { return std::min(eta_ / 3.0, base_->eps_K(K)); }

 private:
  FamilyPtr fam_;
  int a_;
  KernelPtr base_;
  BoxCutoff chi_, chi1_;
  double eta_ = 0.0;
};

inline KernelPtr globalize_test_object(const FamilyPtr& fam, int chart, const KernelPtr& base, const BoxCutoff& chi,
                                       const BoxCutoff& chi1, int grading) {
  return std::make_shared<GlobalizedKernel>(fam, chart, base, chi, chi1, grading);
}

}  // namespace gfk
