#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gfk/local_colombeau.hpp"
#include "gfk/mollifier.hpp"
#include "oracles.hpp"

using namespace gfk;

namespace {

const SmoothFunction kSin = SmoothFunction::trig(1, {{1.0, {1, 0}, 0.0}}, 0.0, "sin");
const SmoothFunction kCos = SmoothFunction::trig(1, {{1.0, {1, 0}, kPi / 2}}, 0.0, "cos");
const Box kOmega = Box::interval(-2, 2);

CompactGrid grid1(std::vector<Point> focus = {}) {
  CompactGrid K;
  K.K = Box::interval(-1, 1);
  K.per_axis = 41;
  K.focus = std::move(focus);
  return K;
}

// Hides every closed-form channel so the generic difference quotients run.
class Opaque : public LocalGF {
 public:
  explicit Opaque(GFPtr r) : LocalGF(r->dim()), r_(std::move(r)) {}
  double eval(const TestFunction& phi, const Point& x) const override { return r_->eval(phi, x); }
  std::string describe() const override { return "opaque"; }

 private:
  GFPtr r_;
};

FamilyPtr without_terms(const FamilyPtr& f) {
  auto g = std::make_shared<TestObjectFamily>(*f);
  g->terms.clear();
  return g;
}

std::vector<std::pair<TestFunction, Point>> samples(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.8, 0.8), e(0.05, 0.4);
  std::vector<std::pair<TestFunction, Point>> out;
  for (int i = 0; i < n; ++i) {
    int q = 1 + i % 4;
    auto m = build_mollifier(1, q, i % 2 ? 1.0 : 0.7, i % 3 ? Profile::Bump : Profile::Skew);
    Point x{u(rng), 0};
    out.emplace_back(m.base.scale_translate(e(rng), {x[0] + 0.1 * u(rng), 0}), x);
  }
  return out;
}

}  // namespace

TEST(TestPath, IotaDeltaUnwindsToScaledProfile) {
  auto m = build_mollifier(1, 2, 1.0);
  auto fam = constant_family(m.base, "phi2");
  auto R = iota(delta_at({0, 0}));
  for (double eps : {0.3, 0.05})
    for (double x : {-0.02, 0.0, 0.011})
      EXPECT_NEAR(eval_test_path(*R, *fam, eps, {x, 0}), m.base(-x / eps) / eps, 1e-12 / eps);
}

TEST(TestPath, SigmaIsPointEvaluation) {
  auto fam = constant_family(build_mollifier(1, 2, 1.0).base, "phi2");
  auto R = sigma(kSin);
  for (double eps : {0.5, 0.01}) {
    EXPECT_EQ(eval_test_path(*R, *fam, eps, {0.4, 0}), std::sin(0.4));
    EXPECT_NEAR(eval_test_path(*R, *fam, eps, {0.4, 0}, {{1, 0}}), std::cos(0.4), 1e-8);
  }
}

TEST(TestPath, ClosedFormsAgreeWithDifferences) {
  auto m = build_mollifier(1, 3, 1.0, Profile::Skew);
  auto c = SmoothFunction::trig(1, {{0.5, {1, 0}, 0.2}}, 1.0, "c");
  std::vector<FamilyPtr> fams = {constant_family(m.base, "const"), injected_family(m.base, 1, c, "inj")};
  std::vector<GFPtr> Rs = {iota(heaviside(0.0, kOmega)), iota(delta_at({0.05, 0})),
                           iota(regular(kSin, kOmega)), iota_minus_sigma(kSin),
                           gf_product(iota(heaviside(0.0, kOmega)), sigma(kCos))};
  for (const auto& fam : fams) {
    auto plain = without_terms(fam);
    for (const auto& R : Rs)
      for (double eps : {0.2, 0.05})
        for (double x : {-0.03, 0.04, 0.3})
          for (int k : {0, 1, 2}) {
            MultiIndex al{{k, 0}};
            double a = eval_test_path(*R, *fam, eps, {x, 0}, al);
            double b = eval_test_path(*R, *plain, eps, {x, 0}, al);
            double tol = k == 2 ? 1e-5 : 1e-6;
            EXPECT_NEAR(a, b, tol * (1 + std::abs(a)) / std::pow(eps, k)) << R->describe() << " k=" << k;
          }
  }
}

TEST(TestPath, DomainViolationIsReported) {
  auto fam = transform_family(constant_family(build_mollifier(1, 2, 1.0).base, "c"),
                              Diffeo({AxisMap::warp(0.0, 1.0, 0.3)}), kOmega);
  EXPECT_THROW(eval_test_path(*sigma(kSin), *fam, 0.9, {1.8, 0}), DomainError);
  EXPECT_NO_THROW(eval_test_path(*sigma(kSin), *fam, 0.1, {1.0, 0}));
}

TEST(Classify, MollifierFamiliesHaveTheirMomentClass) {
  EpsilonLadder lad;
  for (int q : {2, 3, 5}) {
    auto fam = constant_family(build_mollifier(1, q, 1.0).base, "phi");
    for (int m = 1; m <= q; ++m) {
      auto r = classify_test_object(*fam, m, grid1(), lad);
      EXPECT_TRUE(r.square) << q << " " << m;
      EXPECT_TRUE(r.delta);
    }
  }
}

TEST(Classify, InjectedMomentIsDetected) {
  EpsilonLadder lad;
  auto c = SmoothFunction::trig(1, {{0.5, {1, 0}, 0.2}}, 1.0, "c");
  for (int m : {1, 2, 3}) {
    auto fam = injected_family(build_mollifier(1, m + 1, 1.0).base, m, c, "inj");
    auto a = classify_test_object(*fam, m, grid1(), lad);
    auto b = classify_test_object(*fam, m + 1, grid1(), lad);
    EXPECT_TRUE(a.square) << m;
    EXPECT_FALSE(b.square) << m;
    EXPECT_NEAR(a.orders[0].est.order, m, 0.01);
    // square implies delta on the same data
    EXPECT_TRUE(a.delta);
  }
}

TEST(Classify, TransportedFamilyLosesHalfTheOrder) {
  // a square(3) family pushed through mu lands in square(2) on its domain
  Diffeo mu({AxisMap::warp(0.0, 1.0, 0.3)});
  auto src = constant_family(build_mollifier(1, 3, 1.0).base, "phi3");
  auto fam = transform_family(src, mu, kOmega);
  CompactGrid K = grid1();
  double e0 = fam->eps0(K.K);
  EXPECT_GT(e0, 0.5);
  EpsilonLadder lad{std::min(0.25, e0), 0.7, 12};
  auto r = classify_test_object(*fam, 2, K, lad);
  EXPECT_TRUE(r.square);
  auto r3 = classify_test_object(*fam, 3, K, lad);
  EXPECT_FALSE(r3.square);
  EXPECT_NEAR(r.orders[0].est.order, 3.0, 0.1);  // first moment
  EXPECT_NEAR(r.orders[1].est.order, 2.0, 0.1);  // second moment
  auto b = boundedness(*fam, grid1(), EpsilonLadder{0.25, 0.5, 6}, 11);
  EXPECT_TRUE(b.finite);
  EXPECT_LE(b.support_radius, 1.5);
}

TEST(TestLocal, ModerateExponents) {
  EpsilonLadder lad;
  auto fam = constant_family(build_mollifier(1, 2, 1.0).base, "phi2");
  auto s = test_moderate(*sigma(kSin), grid1(), {fam}, lad, 1);
  EXPECT_EQ(s.N, 0);
  EXPECT_TRUE(s.pass);
  auto R = iota(delta_at({0, 0}, 1, kOmega));
  auto d0 = test_moderate(*R, grid1(R->focus()), {fam}, lad, 0);
  EXPECT_NEAR(d0.min_order, -1.0, 1e-6);
  EXPECT_EQ(d0.N, 1);
  // oracle: sup_x eps^-1 |phi(-x/eps)| = eps^-1 max|phi|, attained on the focus grid
  double mx = 0.0;
  for (int k = -400; k <= 400; ++k) mx = std::max(mx, std::abs(fam->phi(1, {})(k / 400.0)));
  EXPECT_NEAR(d0.orders[0].values.back() * lad.smallest(), mx, 1e-3 * mx);
  auto d1 = test_moderate(*R, grid1(R->focus()), {fam}, lad, 1);
  EXPECT_NEAR(d1.min_order, -2.0, 1e-3);
  EXPECT_EQ(d1.N, 2);
}

TEST(TestLocal, IotaMinusSigmaIsNegligible) {
  // oracle: brute-force composite Gauss of int (f(y) - f(x)) eps^-1 phi((y - x)/eps) dy
  EpsilonLadder lad{0.25, 0.7, 12};
  auto R = iota_minus_sigma(kSin);
  auto K = grid1();
  K.per_axis = 21;
  std::vector<std::pair<int, std::vector<FamilyPtr>>> by_m;
  for (int m = 1; m <= 4; ++m) {
    auto mo = build_mollifier(1, m, 1.0);
    by_m.push_back({m, {constant_family(mo.base, "const")}});
    auto p = path_order(*R, *by_m.back().second[0], K, lad, {});
    EXPECT_GE(p.est.order, m + 1 - kSlack) << m;
    EXPECT_GE(p.est.r2, kMinR2);
    double e = lad.values()[5], x = 0.35;
    double want = oracle::gauss5(
        [&](double y) { return (std::sin(y) - std::sin(x)) * mo.base((y - x) / e) / e; }, x - e, x + e, 400);
    EXPECT_NEAR(eval_test_path(*R, *by_m.back().second[0], e, {x, 0}), want, 1e-14);
  }
  auto rep = test_negligible(*R, K, by_m, lad, 0, {2.0, 3.0, 4.0});
  EXPECT_TRUE(rep.pass);
  // symmetric profiles gain one order for even m
  for (const auto& [r, m] : rep.smallest_m) EXPECT_LE(m, r - 1);
  EXPECT_EQ(rep.smallest_m[0].second, 1);
}

TEST(Derivative, CommutesWithIotaExactly) {
  auto H = heaviside(0.0, kOmega);
  auto dH = derivative_Di(iota(H), 0);
  auto d = iota(delta_at({0, 0}, 1, kOmega));
  auto dsin = derivative_Di(iota(regular(kSin, kOmega)), 0);
  auto cos_ = iota(regular(kCos, kOmega));
  for (const auto& [phi, x] : samples(20, 1)) {
    double a = dH->eval(phi, x), b = d->eval(phi, x);
    EXPECT_LE(std::abs(a - b), 1e-12 * (1 + std::abs(a)));
    a = dsin->eval(phi, x);
    b = cos_->eval(phi, x);
    EXPECT_LE(std::abs(a - b), 1e-12 * (1 + std::abs(a)));
  }
}

TEST(Derivative, SigmaAndProductRule) {
  auto ds = derivative_Di(sigma(kSin), 0);
  auto R = iota(heaviside(0.1, kOmega));
  auto S = sigma(kCos);
  auto T = iota(regular(kSin, kOmega));
  auto lhs = derivative_Di(gf_product(R, T), 0);
  auto lhs_fd = derivative_Di(std::make_shared<Opaque>(gf_product(R, T)), 0);
  auto rhs = gf_sum({{1.0, gf_product(derivative_Di(R, 0), T)}, {1.0, gf_product(R, derivative_Di(T, 0))}});
  for (const auto& [phi, x] : samples(10, 2)) {
    EXPECT_NEAR(ds->eval(phi, x), std::cos(x[0]), 1e-15);
    double a = lhs->eval(phi, x), b = rhs->eval(phi, x), c = lhs_fd->eval(phi, x);
    EXPECT_NEAR(a, b, 1e-12 * (1 + std::abs(a)));
    EXPECT_NEAR(a, c, 1e-6 * (1 + std::abs(a)));
    (void)S;
  }
}

TEST(Gateaux, LinearQuadraticAndConstant) {
  auto u = heaviside(0.0, kOmega);
  auto R = iota(u);
  auto [phi, x] = samples(1, 3)[0];
  TestFunction psi = phi.partial(0);
  EXPECT_EQ(gateaux(*R, phi, x, psi).value, u->pair(psi));
  EXPECT_EQ(gateaux(*R, phi, x, psi).t, 0.0);
  EXPECT_EQ(gateaux(*sigma(kSin), phi, x, psi).value, 0.0);
  // (int phi g)^2
  auto g = iota(regular(kCos, kOmega));
  Opaque sq(gf_product(g, g));
  double ig = g->eval(phi, x), ip = g->eval(psi, x);
  auto r = gateaux(sq, phi, x, psi);
  EXPECT_GT(r.t, 0.0);
  EXPECT_NEAR(r.value, 2 * ig * ip, 1e-6 * std::abs(2 * ig * ip));
  // linear R through differences: independent of phi
  Opaque lin(R);
  auto [phi2, x2] = samples(2, 4)[1];
  EXPECT_NEAR(gateaux(lin, phi, x, psi).value, gateaux(lin, phi2, x2, psi).value, 1e-8);
  EXPECT_THROW(gateaux(sq, phi, x, phi), DomainError);
}

TEST(LocalGF, IotaIsAffineLinear) {
  auto R = iota(pv_inv_x(kOmega));
  auto s = samples(6, 5);
  for (int i = 0; i + 1 < 6; ++i) {
    const auto& [p, x] = s[i];
    const auto& q = s[i + 1].first;
    double a = 1.7, b = -0.7;
    double lhs = R->eval(TestFunction::combine({{a, p}, {b, q}}), x);
    EXPECT_NEAR(lhs, a * R->eval(p, x) + b * R->eval(q, x), 1e-10 * (1 + std::abs(lhs)));
  }
  EXPECT_TRUE(R->linear());
  EXPECT_FALSE(sigma(kSin)->linear());
}

TEST(Pullback, IdentityFunctorialityAndIota) {
  Diffeo mu({AxisMap::warp(0.0, 1.0, 0.3)});
  Diffeo nu({AxisMap::warp(0.0, 0.5, -0.2)});
  auto R = iota(heaviside(0.2, whole_space(1)));
  auto id = pullback_local(R, Diffeo::identity(1));
  auto comp = pullback_local(R, mu.after(nu));
  auto twice = pullback_local(pullback_local(R, mu), nu);
  auto d = delta_at({0, 0}, 1, Box::interval(-2.3, 2.3));
  auto lhs = pullback_local(iota(d), mu);
  auto rhs = iota(pullback_dist(d, mu, kOmega));
  for (const auto& [phi, x] : samples(20, 6)) {
    EXPECT_EQ(id->eval(phi, x), R->eval(phi, x));
    EXPECT_NEAR(comp->eval(phi, x), twice->eval(phi, x), 1e-10);
    EXPECT_NEAR(lhs->eval(phi, x), rhs->eval(phi, x), 1e-10 * (1 + std::abs(rhs->eval(phi, x))));
  }
}

TEST(SmoothFunction, TrigIncrementsMatchDifferences) {
  auto f = SmoothFunction::trig(2, {{0.7, {1, 2}, 0.3}, {-0.4, {3, -1}, 1.0}}, 0.5, "f");
  Point x{0.3, -0.8};
  Vec h{0.11, -0.05};
  for (const auto& al : multi_indices(2, 0, 2))
    EXPECT_NEAR(f.increment(al, x, h), f.derivative(axpy(1.0, h, x), al) - f.derivative(x, al), 1e-13);
  // tiny steps keep full relative accuracy: d/dh at 0 of f(x + h e0) is the gradient
  Vec tiny{1e-12, 0};
  EXPECT_NEAR(f.increment({}, x, tiny) / 1e-12, f.grad(x)[0], 1e-9);
}
