#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gfk/asymptotics.hpp"
#include "gfk/local_colombeau.hpp"
#include "gfk/manifold.hpp"
#include "gfk/manifold_distributions.hpp"
#include "gfk/smoothing_kernels.hpp"

namespace gfk {

// Element of the basic space: R(omega, p) for a compactly supported n-form
// omega and a point p.
class GlobalGF {
 public:
  explicit GlobalGF(ManifoldPtr m) : m_(std::move(m)) {}
  virtual ~GlobalGF() = default;
  const ManifoldPtr& manifold() const { return m_; }

  virtual double eval(const NForm& w, const Point& p) const = 0;
  virtual std::string describe() const = 0;
  virtual std::string provenance() const { return "combination"; }
  // Homogeneous and linear in omega; then d_1 R(w, p)(v) = R(v, p).
  virtual bool linear() const { return false; }
  virtual std::optional<double> d1(const NForm&, const Point&, const NForm&) const { return {}; }
  // X(R(w, .))(p) for fixed w.
  virtual std::optional<double> dp(const NForm&, const Point&, const VectorField&) const { return {}; }
  // Intrinsic points near which paths vary on the eps scale.
  virtual std::vector<Point> singular_points() const { return {}; }

  double operator()(const NForm& w, const Point& p) const { return eval(w, p); }

 protected:
  ManifoldPtr m_;
};

using GGFPtr = std::shared_ptr<const GlobalGF>;

class GIota : public GlobalGF {
 public:
  explicit GIota(MDistPtr u) : GlobalGF(u->manifold()), u_(std::move(u)) {}
  double eval(const NForm& w, const Point&) const override { return u_->pair(w); }
  std::string describe() const override { return "iota(" + u_->describe() + ")"; }
  std::string provenance() const override { return "iota"; }
  bool linear() const override { return true; }
  std::optional<double> d1(const NForm&, const Point&, const NForm& v) const override { return u_->pair(v); }
  std::optional<double> dp(const NForm&, const Point&, const VectorField&) const override { return 0.0; }
  std::vector<Point> singular_points() const override { return u_->singular_points(); }
  const MDistPtr& distribution() const { return u_; }

 private:
  MDistPtr u_;
};

class GSigma : public GlobalGF {
 public:
  GSigma(ManifoldPtr m, SmoothFunction f) : GlobalGF(std::move(m)), f_(std::move(f)) {}
  double eval(const NForm&, const Point& p) const override { return f_.value(p); }
  std::string describe() const override { return "sigma(" + f_.name + ")"; }
  std::string provenance() const override { return "sigma"; }
  std::optional<double> d1(const NForm&, const Point&, const NForm&) const override { return 0.0; }
  std::optional<double> dp(const NForm&, const Point& p, const VectorField& X) const override {
    return dot(X(p), f_.grad(p), f_.dim);
  }

 private:
  SmoothFunction f_;
};

// iota(f) - sigma(f) = int (f(q) - f(p)) omega(q) + f(p) (int omega - 1), with
// the increment taken along the shortest displacement.
class GIotaMinusSigma : public GlobalGF {
 public:
  GIotaMinusSigma(ManifoldPtr m, SmoothFunction f) : GlobalGF(std::move(m)), f_(std::move(f)) {}
  double eval(const NForm& w, const Point& p) const override {
    const auto& m = *m_;
    double d = w.integrate_function([&](const Point& q) { return f_.increment({}, p, m.displacement(p, q)); });
    double I = w.integral();
    return I == 1.0 ? d : d + f_.value(p) * (I - 1.0);
  }
  std::string describe() const override { return "iota(" + f_.name + ")-sigma(" + f_.name + ")"; }
  std::optional<double> d1(const NForm&, const Point&, const NForm& v) const override {
    return v.integrate_function(f_);
  }
  std::optional<double> dp(const NForm&, const Point& p, const VectorField& X) const override {
    return -dot(X(p), f_.grad(p), f_.dim);
  }

 private:
  SmoothFunction f_;
};

class GCombination : public GlobalGF {
 public:
  explicit GCombination(std::vector<std::pair<double, GGFPtr>> t) : GlobalGF(t.at(0).second->manifold()), t_(std::move(t)) {}
  double eval(const NForm& w, const Point& p) const override {
    double s = 0.0;
    for (const auto& [c, r] : t_) s += c * r->eval(w, p);
    return s;
  }
  std::string describe() const override {
    std::string s;
    for (const auto& [c, r] : t_) s += (s.empty() ? "" : " + ") + format_double(c) + "*" + r->describe();
    return s;
  }
  bool linear() const override {
    for (const auto& [c, r] : t_)
      if (!r->linear()) return false;
    return true;
  }
  std::optional<double> d1(const NForm& w, const Point& p, const NForm& v) const override {
    double s = 0.0;
    for (const auto& [c, r] : t_) {
      auto x = r->d1(w, p, v);
      if (!x) return {};
      s += c * *x;
    }
    return s;
  }
  std::optional<double> dp(const NForm& w, const Point& p, const VectorField& X) const override {
    double s = 0.0;
    for (const auto& [c, r] : t_) {
      auto x = r->dp(w, p, X);
      if (!x) return {};
      s += c * *x;
    }
    return s;
  }
  std::vector<Point> singular_points() const override {
    std::vector<Point> out;
    for (const auto& [c, r] : t_)
      for (const auto& q : r->singular_points()) out.push_back(q);
    return out;
  }

 private:
  std::vector<std::pair<double, GGFPtr>> t_;
};

class GProduct : public GlobalGF {
 public:
  GProduct(GGFPtr a, GGFPtr b) : GlobalGF(a->manifold()), a_(std::move(a)), b_(std::move(b)) {}
  double eval(const NForm& w, const Point& p) const override { return a_->eval(w, p) * b_->eval(w, p); }
  std::string describe() const override { return a_->describe() + "*" + b_->describe(); }
  std::optional<double> d1(const NForm& w, const Point& p, const NForm& v) const override {
    auto da = a_->d1(w, p, v), db = b_->d1(w, p, v);
    if (!da || !db) return {};
    return *da * b_->eval(w, p) + a_->eval(w, p) * *db;
  }
  std::optional<double> dp(const NForm& w, const Point& p, const VectorField& X) const override {
    auto da = a_->dp(w, p, X), db = b_->dp(w, p, X);
    if (!da || !db) return {};
    return *da * b_->eval(w, p) + a_->eval(w, p) * *db;
  }
  std::vector<Point> singular_points() const override {
    auto out = a_->singular_points();
    for (const auto& q : b_->singular_points()) out.push_back(q);
    return out;
  }

 private:
  GGFPtr a_, b_;
};

inline GGFPtr g_iota(const MDistPtr& u) { return std::make_shared<GIota>(u); }
inline GGFPtr g_sigma(const ManifoldPtr& m, const SmoothFunction& f) { return std::make_shared<GSigma>(m, f); }
inline GGFPtr g_iota_minus_sigma(const ManifoldPtr& m, const SmoothFunction& f) {
  return std::make_shared<GIotaMinusSigma>(m, f);
}
inline GGFPtr g_combination(std::vector<std::pair<double, GGFPtr>> t) {
  return std::make_shared<GCombination>(std::move(t));
}
inline GGFPtr g_sum(const GGFPtr& a, const GGFPtr& b) { return g_combination({{1.0, a}, {1.0, b}}); }
inline GGFPtr g_difference(const GGFPtr& a, const GGFPtr& b) { return g_combination({{1.0, a}, {-1.0, b}}); }
inline GGFPtr g_product(const GGFPtr& a, const GGFPtr& b) { return std::make_shared<GProduct>(a, b); }

// embed: iota for distributions, sigma for smooth functions
inline GGFPtr embed(const MDistPtr& u) { return g_iota(u); }
inline GGFPtr embed(const ManifoldPtr& m, const SmoothFunction& f) { return g_sigma(m, f); }

// ---------------------------------------------------------------------------
// Lie derivative

// Half-width of the hull of the piece supports, in chart coordinates.
inline double form_scale(const NForm& w) {
  double s = 0.0;
  for (const auto& p : w.pieces()) s = std::max(s, 0.5 * p.coeff.support_box().max_width());
  return s > 0 ? s : 1.0;
}

// d_1 R(w, p)(v); v must have zero integral.
inline GateauxResult gateaux_global(const GlobalGF& R, const NForm& w, const Point& p, const NForm& v) {
  if (auto x = R.d1(w, p, v)) return {*x, 0.0};
  double scale = form_scale(w);
  if (std::abs(v.integral()) > 1e-9 * (1.0 + 1.0 / scale))
    throw DomainError("gateaux: direction has nonzero integral, leaves the unit-integral space");
  double t = 1e-4 * scale;
  auto D = [&](double h) { return (R.eval(w + h * v, p) - R.eval(w + (-h) * v, p)) / (2 * h); };
  return {(4 * D(0.5 * t) - D(t)) / 3.0, t};
}

// X(R(w, .))(p) by central differences along the flow, one Richardson level.
inline double flow_derivative(const GlobalGF& R, const NForm& w, const Point& p, const VectorField& X) {
  if (auto x = R.dp(w, p, X)) return *x;
  const auto& m = *R.manifold();
  auto D = [&](double h) { return (R.eval(w, m.wrap(X.flow(p, h))) - R.eval(w, m.wrap(X.flow(p, -h)))) / (2 * h); };
  const double h = 1e-3;
  return (4 * D(0.5 * h) - D(h)) / 3.0;
}

// -d_1R(w, p)(L_X w) + X(R(w, .))(p)
class GLie : public GlobalGF {
 public:
  GLie(GGFPtr r, VectorField X) : GlobalGF(r->manifold()), r_(std::move(r)), X_(std::move(X)) {
    if (X_.dim != m_->dim()) throw DomainError("lie_derivative_global: field dimension does not match");
  }
  double eval(const NForm& w, const Point& p) const override {
    NForm v = lie_form(X_, w);
    return -gateaux_global(*r_, w, p, v).value + flow_derivative(*r_, w, p, X_);
  }
  std::string describe() const override { return "L_" + X_.name + "(" + r_->describe() + ")"; }
  std::string provenance() const override { return "lie"; }
  bool linear() const override { return r_->linear(); }
  std::optional<double> d1(const NForm&, const Point& p, const NForm& v) const override {
    if (!r_->linear()) return {};
    return eval(v, p);
  }
  std::vector<Point> singular_points() const override { return r_->singular_points(); }

 private:
  GGFPtr r_;
  VectorField X_;
};

inline GGFPtr lie_derivative_global(const GGFPtr& R, const VectorField& X) { return std::make_shared<GLie>(R, X); }

// Hides d1 and dp so the Lie derivative falls back to finite differences.
class GOpaque : public GlobalGF {
 public:
  explicit GOpaque(GGFPtr r) : GlobalGF(r->manifold()), r_(std::move(r)) {}
  double eval(const NForm& w, const Point& p) const override { return r_->eval(w, p); }
  std::string describe() const override { return "opaque(" + r_->describe() + ")"; }
  std::vector<Point> singular_points() const override { return r_->singular_points(); }

 private:
  GGFPtr r_;
};

inline GGFPtr without_channels(GGFPtr R) { return std::make_shared<GOpaque>(std::move(R)); }

// ---------------------------------------------------------------------------
// Local representatives

// (phi d^n y, x) -> R(psi_a^*(phi d^n y), psi_a^-1 x), restricted to phi
// supported in the chart image.
class LocalRepGF : public LocalGF {
 public:
  LocalRepGF(GGFPtr r, int a) : LocalGF(r->manifold()->dim()), r_(std::move(r)), a_(a) {
    if (a < 0 || a >= r_->manifold()->chart_count()) throw DomainError("local_rep_global: chart not in the atlas");
  }
  double eval(const TestFunction& phi, const Point& x) const override {
    return r_->eval(form(phi), r_->manifold()->chart(a_).from_chart(x));
  }
  std::string describe() const override {
    return r_->describe() + "|" + r_->manifold()->chart(a_).name;
  }
  bool linear() const override { return r_->linear(); }
  std::optional<double> d1(const TestFunction& phi, const Point& x, const TestFunction& psi) const override {
    return r_->d1(form(phi), r_->manifold()->chart(a_).from_chart(x), chart_form(r_->manifold(), a_, psi));
  }
  std::vector<Point> focus() const override {
    std::vector<Point> out;
    const Chart& c = r_->manifold()->chart(a_);
    for (const auto& q : r_->singular_points())
      if (c.contains(q)) out.push_back(c.to_chart(q));
    return out;
  }

 private:
  NForm form(const TestFunction& phi) const {
    const auto& m = r_->manifold();
    Box img = m->chart(a_).image(), s = phi.support_box();
    for (int i = 0; i < m->dim(); ++i)
      if (!(s.lo[i] > img.lo[i] && s.hi[i] < img.hi[i]))
        throw DomainError("local_rep_global: test function leaves the chart image");
    return chart_form(m, a_, phi);
  }
  GGFPtr r_;
  int a_;
};

inline GFPtr local_rep_global(const GGFPtr& R, int a) { return std::make_shared<LocalRepGF>(R, a); }

// ---------------------------------------------------------------------------
// Test paths p -> R(Phi(eps, p), p) and their Lie derivatives

inline double global_path(const GlobalGF& R, const SmoothingKernel& k, double eps, const Point& p) {
  return R.eval(k.at(eps, p), p);
}

// L_{X_1} ... L_{X_k} of the path, outermost field first, by nested central
// differences along the flows with step 1e-3 eps.
inline double lie_path(const GlobalGF& R, const SmoothingKernel& k, double eps, const Point& p,
                       const std::vector<VectorField>& X, std::size_t from = 0) {
  if (from == X.size()) return global_path(R, k, eps, p);
  const auto& m = *R.manifold();
  const double h = 1e-3 * eps;
  Point a = m.wrap(X[from].flow(p, h)), b = m.wrap(X[from].flow(p, -h));
  return (lie_path(R, k, eps, a, X, from + 1) - lie_path(R, k, eps, b, X, from + 1)) / (2 * h);
}

// Non-constant fields used for Lie derivatives of paths.
inline std::vector<VectorField> default_fields(const Manifold& m) {
  std::vector<VectorField> out;
  if (m.dim() == 1) {
    out.push_back({1, {SmoothFunction::trig(1, {{0.5, {1, 0}, 0.3}}, 0.8, "X")}, "X"});
    out.push_back({1, {SmoothFunction::trig(1, {{0.3, {2, 0}, -0.4}}, -0.6, "Y")}, "Y"});
  } else {
    out.push_back({2,
                   {SmoothFunction::trig(2, {{0.5, {0, 1}, 0.3}}, 0.8, "X1"),
                    SmoothFunction::trig(2, {{0.4, {1, 0}, -0.2}}, 0.3, "X2")},
                   "X"});
    out.push_back({2,
                   {SmoothFunction::trig(2, {{0.3, {1, 1}, 0.1}}, -0.4, "Y1"),
                    SmoothFunction::trig(2, {{0.5, {0, 1}, 0.7}}, 0.7, "Y2")},
                   "Y"});
  }
  return out;
}

// Rounding in a path value is about 1e-16 absolute; each difference quotient
// with step 1e-3 eps divides it by the step. Differentiated paths at or below
// kPathNoise / step^k are treated as zero in the fits (the traces keep them).
inline constexpr double kPathNoise = 1e-14;

struct GlobalPathOrder {
  std::string kernel;
  int k = 0;  // number of Lie derivatives
  std::vector<double> eps, values;
  AsymptoticEstimate est;
};

struct GlobalVerdict {
  std::string claim;
  std::vector<GlobalPathOrder> orders;
  double min_order = kInf;
  int N = 0;          // moderate claims
  double r = 0.0;     // negligible claims
  bool pass = false;
  bool pass_k0 = false;  // negligible claims, k = 0 paths only
};

// Ladder clipped to the kernel's eps_K on the grid box.
inline EpsilonLadder clip_ladder(const EpsilonLadder& l, const SmoothingKernel& k, const Box& K) {
  double e = std::min(l.eps0, k.eps_K(K));
  if (!(e > 0)) throw DomainError("test_global: kernel has no admissible eps on K");
  return EpsilonLadder(e, l.ratio, l.length);
}

inline GlobalPathOrder global_path_order(const GlobalGF& R, const SmoothingKernel& k, const CompactGrid& K,
                                         const EpsilonLadder& ladder, const std::vector<VectorField>& X) {
  GlobalPathOrder o;
  o.kernel = k.name();
  o.k = static_cast<int>(X.size());
  CompactGrid g = K;
  for (const auto& q : R.singular_points()) g.focus.push_back(q);
  EpsilonLadder lad = clip_ladder(ladder, k, K.K);
  o.eps = lad.values();
  std::vector<double> fit;
  for (double e : o.eps) {
    double s = 0.0;
    for (const auto& p : g.points(e)) s = std::max(s, std::abs(lie_path(R, k, e, R.manifold()->wrap(p), X)));
    o.values.push_back(s);
    fit.push_back(s <= kPathNoise * std::pow(1e-3 * e, -o.k) ? 0.0 : s);
  }
  o.est = estimate_order(o.eps, fit);
  return o;
}

inline std::vector<VectorField> first_fields(const std::vector<VectorField>& X, int k) {
  if (k > static_cast<int>(X.size())) throw DomainError("test_global: not enough vector fields for k Lie derivatives");
  return {X.begin(), X.begin() + k};
}

inline GlobalVerdict test_global_moderate(const GlobalGF& R, const CompactGrid& K, const std::vector<KernelPtr>& kernels,
                                          const EpsilonLadder& ladder, int k_max,
                                          std::vector<VectorField> X = {}) {
  if (k_max < 0 || k_max > 2) throw DomainError("test_global: k_max must be in 0..2");
  if (X.empty()) X = default_fields(*R.manifold());
  GlobalVerdict v;
  v.claim = "moderate(" + R.describe() + ")";
  v.pass = true;
  for (const auto& k : kernels)
    for (int j = 0; j <= k_max; ++j) {
      auto o = global_path_order(R, *k, K, ladder, first_fields(X, j));
      if (!o.est.floor_hit) {
        v.min_order = std::min(v.min_order, o.est.order);
        if (!(o.est.r2 >= kMinR2)) v.pass = false;
      }
      v.orders.push_back(std::move(o));
    }
  v.N = moderate_exponent(v.min_order);
  return v;
}

// Every path (k <= k_max Lie derivatives, every kernel) is O(eps^r).
inline GlobalVerdict test_global_negligible(const GlobalGF& R, const CompactGrid& K,
                                            const std::vector<KernelPtr>& kernels, const EpsilonLadder& ladder,
                                            int k_max, double r, std::vector<VectorField> X = {}) {
  if (k_max < 0 || k_max > 2) throw DomainError("test_global: k_max must be in 0..2");
  if (X.empty()) X = default_fields(*R.manifold());
  GlobalVerdict v;
  v.claim = "negligible(" + R.describe() + ")";
  v.r = r;
  v.pass = true;
  v.pass_k0 = true;
  for (const auto& k : kernels)
    for (int j = 0; j <= k_max; ++j) {
      auto o = global_path_order(R, *k, K, ladder, first_fields(X, j));
      bool ok = big_o_holds(o.est, r);
      v.pass = v.pass && ok;
      if (j == 0) v.pass_k0 = v.pass_k0 && ok;
      if (!o.est.floor_hit) v.min_order = std::min(v.min_order, o.est.order);
      v.orders.push_back(std::move(o));
    }
  return v;
}

// ---------------------------------------------------------------------------
// Association

struct AssociationTrace {
  std::string kernel;
  int omega = 0;
  std::vector<double> eps, values;
  double limit = 0.0;
  double spread = 0.0;  // change between the last two extrapolations
  double target = 0.0;
  bool pass = false;
};

struct AssociationVerdict {
  std::string claim;
  std::vector<AssociationTrace> traces;
  double tol = 1e-3;
  bool pass = true;
};

// int_M R(Phi(eps, p), p) omega(p), split at the images of R's singular
// points and at +-eps, +-2 eps around them.
inline double path_integral(const GlobalGF& R, const SmoothingKernel& k, double eps, const NForm& omega) {
  const auto& m = *R.manifold();
  double s = 0.0;
  for (const auto& pc : omega.pieces()) {
    const Chart& c = m.chart(pc.chart);
    auto g = [&](const Point& y) {
      double w = pc.coeff(y);
      if (w == 0.0) return 0.0;
      Point p = c.from_chart(y);
      return w * global_path(R, k, eps, p);
    };
    Box b = pc.coeff.support_box();
    if (m.dim() == 1) {
      std::vector<double> br;
      for (const auto& q : R.singular_points()) {
        if (!c.contains(q)) continue;
        double y = c.to_chart(q)[0];
        for (double d : {-2.0, -1.0, 0.0, 1.0, 2.0}) br.push_back(y + d * eps);
      }
      s += pc.weight * integrate_breaks([&](double y) { return g({y, 0}); }, b.lo[0], b.hi[0], br, 8);
    } else {
      s += pc.weight * native_integrate(g, b, 32);
    }
  }
  return s;
}

// Richardson with one level at rate eps: L = (I(r e) - r I(e)) / (1 - r).
inline AssociationVerdict associate(const GlobalGF& R, const MDistPtr& target, const std::vector<NForm>& omegas,
                                    const std::vector<KernelPtr>& kernels, const EpsilonLadder& ladder,
                                    double tol = 1e-3) {
  AssociationVerdict v;
  v.claim = "associated(" + R.describe() + ", " + (target ? target->describe() : std::string("0")) + ")";
  v.tol = tol;
  for (const auto& k : kernels)
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      AssociationTrace t;
      t.kernel = k->name();
      t.omega = static_cast<int>(i);
      double e0 = ladder.eps0;
      // eps_K over the omega supports
      for (const auto& [a, b] : omegas[i].support_boxes()) e0 = std::min(e0, k->eps_K(b));
      EpsilonLadder lad(e0, ladder.ratio, ladder.length);
      t.eps = lad.values();
      for (double e : t.eps) t.values.push_back(path_integral(R, *k, e, omegas[i]));
      const double r = lad.ratio;
      auto rich = [&](std::size_t j) { return (t.values[j + 1] - r * t.values[j]) / (1 - r); };
      std::size_t n = t.values.size();
      t.limit = rich(n - 2);
      t.spread = std::abs(t.limit - rich(n - 3));
      t.target = target ? target->pair(omegas[i]) : 0.0;
      t.pass = std::abs(t.limit - t.target) <= tol && t.spread <= tol;
      v.pass = v.pass && t.pass;
      v.traces.push_back(std::move(t));
    }
  return v;
}

}  // namespace gfk
