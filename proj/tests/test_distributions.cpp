#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gfk/distributions.hpp"
#include "gfk/mollifier.hpp"
#include "oracles.hpp"

using namespace gfk;

namespace {
SmoothFunction sin1() { return SmoothFunction::trig(1, {{1.0, {1.0, 0}, 0.0}}, 0.0, "sin"); }
SmoothFunction cos1() { return SmoothFunction::trig(1, {{1.0, {1.0, 0}, kPi / 2}}, 0.0, "cos"); }
LocalField constant_field(double c) { return {1, {SmoothFunction::constant(1, c)}}; }
}  // namespace

TEST(Pair, DeltaOfScaledTestFunction) {
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto d = delta_at({0, 0});
  for (double eps : {0.5, 0.1})
    for (double x : {-0.03, 0.0, 0.02}) {
      auto phi = m.base.scale_translate(eps, {x, 0});
      EXPECT_NEAR(d->pair(phi), m.base(-x / eps) / eps, 1e-12);
    }
}

TEST(Pair, HeavisideMatchesQuadratureOracle) {
  auto m = build_mollifier(1, 3, 1.0, Profile::Skew);
  double ref = oracle::gauss5([&](double y) { return m.base(y); }, 0.0, 1.0, 400);
  EXPECT_NEAR(heaviside()->pair(m.base), ref, 1e-12);
}

TEST(Pair, DeltaPrime) {
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto phi = m.base.scale_translate(0.4, {0.1, 0});
  EXPECT_NEAR(derivative(delta_at({0, 0}), {{1, 0}})->pair(phi), -phi.grad({0, 0})[0], 1e-14);
}

TEST(Pair, PrincipalValueAgainstOracle) {
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto phi = m.base.scale_translate(0.5, {0.2, 0});
  // oracle: fine Gauss on the odd part away from 0 (nodes avoid 0)
  double ref = oracle::gauss5([&](double x) { return (phi(x) - phi(-x)) / x; }, 0.0, 0.7, 2000);
  EXPECT_NEAR(pv_inv_x()->pair(phi), ref, 1e-10);
}

TEST(Pair, Linearity) {
  auto m2 = build_mollifier(1, 2, 1.0);
  auto m3 = build_mollifier(1, 3, 0.7, Profile::Skew);
  auto a = m2.base.scale_translate(0.3, {0.1, 0});
  auto b = m3.base.scale_translate(0.6, {-0.2, 0});
  std::vector<DistPtr> us{delta_at({0.05, 0}), heaviside(), pv_inv_x(), regular(sin1()),
                          derivative(heaviside(), {{1, 0}})};
  for (const auto& u : us) {
    double lhs = u->pair(TestFunction::combine({{2.5, a}, {-1.5, b}}));
    EXPECT_NEAR(lhs, 2.5 * u->pair(a) - 1.5 * u->pair(b), 1e-10) << u->describe();
  }
}

TEST(Pair, SupportEscapingDomainIsRejected) {
  auto m = build_mollifier(1, 0, 1.0);
  auto u = regular(sin1(), Box::interval(-2, 2));
  EXPECT_THROW(u->pair(m.base.scale_translate(0.5, {1.8, 0})), DomainError);
  EXPECT_NO_THROW(u->pair(m.base.scale_translate(0.5, {1.0, 0})));
}

TEST(Pullback, Identity) {
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto phi = m.base.scale_translate(0.4, {0.1, 0});
  for (const auto& u : {delta_at({0, 0}), heaviside(), regular(sin1())}) {
    auto p = pullback_dist(u, Diffeo::identity(1), whole_space(1));
    EXPECT_NEAR(p->pair(phi), u->pair(phi), 1e-14);
  }
}

TEST(Pullback, ShiftedDelta) {
  const double c = 0.3;
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto phi = m.base.scale_translate(0.5, {-0.2, 0});
  auto p = pullback_dist(delta_at({0, 0}), Diffeo({AxisMap::affine(1.0, c)}), whole_space(1));
  EXPECT_NEAR(p->pair(phi), phi(-c), 1e-14);
}

TEST(Pullback, DoublingOfRegular) {
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto phi = m.base.scale_translate(0.5, {0.3, 0});
  auto p = pullback_dist(regular(sin1()), Diffeo({AxisMap::affine(2.0, 0.0)}), whole_space(1));
  double ref = oracle::gauss5([&](double x) { return std::sin(2 * x) * phi(x); }, -0.2, 0.8, 400);
  EXPECT_NEAR(p->pair(phi), ref, 1e-10);
}

TEST(Pullback, CompositionIsContravariant) {
  Diffeo m1({AxisMap::warp(0.0, 1.0, 0.3)}), m2({AxisMap::affine(1.5, 0.2)});
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto phi = m.base.scale_translate(0.3, {0.1, 0});
  for (const auto& u : {delta_at({0.4, 0}), heaviside(0.2), regular(cos1())}) {
    auto lhs = pullback_dist(u, m1.after(m2), whole_space(1));
    auto rhs = pullback_dist(pullback_dist(u, m1, whole_space(1)), m2, whole_space(1));
    EXPECT_NEAR(lhs->pair(phi), rhs->pair(phi), 1e-9) << u->describe();
  }
}

TEST(Lie, RegularAlongUnitField) {
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto phi = m.base.scale_translate(0.5, {0.3, 0});
  auto lhs = lie_derivative_dist(regular(sin1()), constant_field(1.0));
  EXPECT_NEAR(lhs->pair(phi), regular(cos1())->pair(phi), 1e-9);
}

TEST(Lie, HeavisideGivesDelta) {
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  for (double x : {-0.2, 0.0, 0.25}) {
    auto phi = m.base.scale_translate(0.5, {x, 0});
    EXPECT_NEAR(lie_derivative_dist(heaviside(), constant_field(1.0))->pair(phi),
                delta_at({0, 0})->pair(phi), 1e-10);
  }
}

TEST(Lie, ZeroField) {
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto phi = m.base.scale_translate(0.5, {0.1, 0});
  for (const auto& u : {delta_at({0, 0}), heaviside(), regular(sin1())})
    EXPECT_EQ(lie_derivative_dist(u, constant_field(0.0))->pair(phi), 0.0);
}

TEST(Lie, LeibnizAgainstSmoothFactor) {
  // L_X(f u) = (X f) u + f L_X u
  LocalField X{1, {SmoothFunction::trig(1, {{0.5, {1.0, 0}, 0.3}}, 1.0, "x")}};
  auto f = cos1();
  auto m = build_mollifier(1, 2, 1.0, Profile::Skew);
  auto phi = m.base.scale_translate(0.6, {0.2, 0});
  for (const auto& u : {delta_at({0.1, 0}), heaviside(), regular(sin1())}) {
    double lhs = lie_derivative_dist(times(f, u), X)->pair(phi);
    double rhs = times(X.apply(f), u)->pair(phi) + times(f, lie_derivative_dist(u, X))->pair(phi);
    EXPECT_NEAR(lhs, rhs, 1e-9) << u->describe();
  }
}
