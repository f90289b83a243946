#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gfk/smoothing_kernels.hpp"
#include "oracles.hpp"

using namespace gfk;

namespace {

VectorField field(int dim) {
  VectorField X;
  X.dim = dim;
  X.name = "X";
  X.comp.push_back(SmoothFunction::trig(dim, {{0.7, {1, 0}, 0.2}}, 0.3, "X0"));
  if (dim == 2) X.comp.push_back(SmoothFunction::trig(2, {{0.5, {0, 1}, -0.4}}, -0.2, "X1"));
  return X;
}

EpsilonLadder kernel_ladder(const SmoothingKernel& k, const Box& K) {
  return EpsilonLadder(std::min(0.25, k.eps_K(K)), 0.7, 12);
}

}  // namespace

TEST(Kernel, UnitIntegralEverywhere) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ue(0.0, 1.0), ut(-kPi, kPi), ui(-1.9, 1.9);
  for (auto m : {Manifold::interval(2.0, 0.2), Manifold::circle(), Manifold::torus()}) {
    auto k = build_kernel(m, build_mollifier(m->dim(), 2, 1.0));
    for (int i = 0; i < (m->dim() > 1 ? 10 : 30); ++i) {
      double e = std::max(1e-3, ue(rng));
      Point p = m->kind() == ManifoldKind::Interval ? Point{ui(rng), 0} : Point{ut(rng), m->dim() > 1 ? ut(rng) : 0.0};
      EXPECT_NEAR(k->at(e, p).integral(), 1.0, 1e-9) << m->name() << " " << e << " " << p[0];
    }
  }
}

TEST(Kernel, IntervalReducesToTheMollifier) {
  auto m = Manifold::interval(2.0, 0.0);
  auto moll = build_mollifier(1, 3, 1.0);
  auto k = build_kernel(m, moll);
  Box K = Box::interval(-1, 1);
  double e = 0.9 * k->eps_K(K);
  for (double p : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    NForm w = k->at(e, {p, 0});
    ASSERT_EQ(w.pieces().size(), 1u);
    for (double u : {-0.9, -0.5, 0.1, 0.6})
      EXPECT_NEAR(w.density({p + e * u, 0}), moll.base({u, 0}) / e, 1e-12 / e);
  }
  // near the ends the reference form takes over
  NForm end = k->at(0.5, {1.95, 0});
  EXPECT_NEAR(end.integral(), 1.0, 1e-12);
  EXPECT_NEAR(end.density({0.0, 0}), k->at(0.5, {1.99, 0}).density({0.0, 0}), 1e-12);
}

TEST(Kernel, EpsKIsMonotoneInK) {
  auto m = Manifold::interval(2.0, 0.0);
  auto k = build_kernel(m, build_mollifier(1, 2, 1.0));
  EXPECT_GT(k->eps_K(Box::interval(-0.5, 0.5)), k->eps_K(Box::interval(-1.5, 1.5)));
  auto c = build_kernel(Manifold::circle(), build_mollifier(1, 2, 1.0));
  EXPECT_GT(c->eps_K(Box::interval(-1, 1)), 0.05);
}

TEST(Kernel, ReferenceFormMustBeNormalized) {
  auto m = Manifold::circle();
  EXPECT_THROW(build_kernel(m, build_mollifier(1, 2, 1.0), 2.0 * default_reference_form(m)), DomainError);
  EXPECT_THROW(build_kernel(m, build_mollifier(2, 2, 1.0)), DomainError);
}

TEST(ValidateKernel, SupportShrinksLinearly) {
  auto m = Manifold::circle();
  auto k = build_kernel(m, build_mollifier(1, 2, 1.0));
  KernelGrid K{Box::interval(-kPi, kPi), 41, 41};
  auto lad = EpsilonLadder(k->eps_K(K.K), 0.7, 8);
  auto flat = validate_support(*k, K, lad, Metric::flat(1));
  EXPECT_TRUE(flat.pass);
  EXPECT_LT(flat.C, 1.5);  // warped charts stretch the unit support a little
  EXPECT_GT(flat.C, 1.0);
  auto conf = validate_support(*k, K, lad,
                               Metric::conformal(SmoothFunction::trig(1, {{0.3, {1, 0}, 0.0}}, 0.0, "u")));
  EXPECT_TRUE(conf.pass);
  EXPECT_LE(conf.C, flat.C * std::exp(0.3) + 1e-9);
  EXPECT_THROW(validate_support(*k, K, EpsilonLadder(0.9, 0.7, 8), Metric::flat(1)), DomainError);
}

TEST(ValidateKernel, GrowthOrders) {
  auto m = Manifold::circle();
  auto k = build_kernel(m, build_mollifier(1, 2, 1.0));
  KernelGrid K{Box::interval(-2.5, 2.5), 21, 41};
  auto lad = kernel_ladder(*k, K.K);
  VectorField X = field(1);
  auto g00 = validate_growth(*k, K, lad, {}, {});
  EXPECT_TRUE(g00.pass);
  EXPECT_NEAR(g00.est.order, -1.0, 0.05);
  auto g01 = validate_growth(*k, K, lad, {}, {X});
  EXPECT_TRUE(g01.pass);
  EXPECT_NEAR(g01.est.order, -2.0, 0.1);
  auto g10 = validate_growth(*k, K, lad, {X}, {});
  EXPECT_TRUE(g10.pass);
  EXPECT_GE(g10.est.order, -1.1);
}

TEST(ValidateKernel, GrowthOnTorus) {
  auto m = Manifold::torus();
  auto k = build_kernel(m, build_mollifier(2, 2, 1.0));
  KernelGrid K{Box::rect(-1.0, 1.0, 0.5, 2.0), 4, 13};
  auto lad = kernel_ladder(*k, K.K);
  auto g = validate_growth(*k, K, lad, {}, {});
  EXPECT_TRUE(g.pass);
  EXPECT_NEAR(g.est.order, -2.0, 0.05);
}

TEST(ValidateKernel, GradingFollowsMomentOrder) {
  auto m = Manifold::circle();
  KernelGrid K{Box::interval(-kPi, kPi), 41, 0};
  auto sin1 = SmoothFunction::trig(1, {{1.0, {1, 0}, 0.0}}, 0.0, "sin");
  for (int q : {1, 2, 3}) {
    auto k = build_kernel(m, build_mollifier(1, q, 1.0, Profile::Skew));
    auto lad = kernel_ladder(*k, K.K);
    auto r = validate_grading(*k, K, lad, sin1, q);
    EXPECT_TRUE(r.pass) << q;
    EXPECT_NEAR(r.est.order, q + 1, 0.15) << q;
    EXPECT_FALSE(validate_grading(*k, K, lad, sin1, q + 1).pass) << q;
  }
  auto k = build_kernel(m, build_mollifier(1, 2, 1.0));
  auto one = validate_grading(*k, K, kernel_ladder(*k, K.K), SmoothFunction::constant(1, 1.0), 5);
  EXPECT_TRUE(one.est.floor_hit);
  EXPECT_TRUE(one.pass);
}

TEST(ValidateKernel, GradingOnChartMonomials) {
  auto m = Manifold::circle(0.3);
  auto k = build_kernel(m, build_mollifier(1, 2, 1.0, Profile::Skew));
  KernelGrid K{Box::interval(-2.0, 2.0), 21, 0};
  auto lad = kernel_ladder(*k, K.K);
  for (const auto& f : grading_test_functions(m, 2)) {
    auto r = validate_grading(*k, K, lad, f, 2);
    EXPECT_TRUE(r.pass) << f.name << " " << r.est.order;
  }
}

TEST(ValidateKernel, GradingOnTorus) {
  auto m = Manifold::torus();
  auto k = build_kernel(m, build_mollifier(2, 2, 1.0, Profile::Skew));
  KernelGrid K{Box::rect(-1.0, 2.5, -2.0, 2.0), 3, 0};
  EpsilonLadder lad(k->eps_K(K.K), 0.7, 9);
  auto f = SmoothFunction::trig(2, {{1.0, {1, 1}, 0.0}}, 0.0, "s");
  auto r = validate_grading(*k, K, lad, f, 2);
  EXPECT_TRUE(r.pass) << r.est.order;
}

TEST(ValidateKernel, ChartMonomialMatchesDirectFormula) {
  auto m = Manifold::circle(0.2);
  auto f = chart_monomial(m, 0, MultiIndex{{2, 0}});
  for (double t : {-1.0, 0.2, 2.0}) {
    double y = m->chart(0).to_chart({t, 0})[0];
    EXPECT_NEAR(f({t, 0}), y * y * m->chi1(0, {t, 0}), 1e-14);
  }
  EXPECT_EQ(f({3.1, 0}), 0.0);
}

TEST(Localize, ReproducesTheKernelAndItsMoments) {
  auto m = Manifold::circle(0.25);
  auto k = build_kernel(m, build_mollifier(1, 3, 1.0));
  auto fam = localize_kernel(k, 0);
  const Chart& c = m->chart(0);
  // overlap region, where chart B pieces are transported into chart A
  CompactGrid K;
  K.K = Box::interval(c.psi(Point{0.9, 0})[0], c.psi(Point{2.1, 0})[0]);
  K.per_axis = 21;
  double e0 = fam->eps0(K.K);
  ASSERT_GT(e0, 0.0);
  for (double e : {0.2, 0.05})
    for (double x : {K.K.lo[0], 0.5 * (K.K.lo[0] + K.K.hi[0]), K.K.hi[0]}) {
      TestFunction phi = (*fam)(e, {x, 0});
      EXPECT_NEAR(phi.integral(), 1.0, 1e-10);
      // phi(eps, x)(y) = eps * coefficient of Phi in chart A at eps y + x
      NForm w = k->at(e, c.from_chart({x, 0}));
      for (double u : {-0.4, 0.1, 0.7})
        EXPECT_NEAR(phi({u, 0}), e * w.coefficient(0, {e * u + x, 0}), 1e-9);
    }
  EpsilonLadder lad(std::min({0.25, e0, k->eps_K(Box::interval(0.9, 2.1))}), 0.7, 12);
  auto d3 = classify_test_object(*fam, 3, K, lad);
  EXPECT_TRUE(d3.delta);
  auto s2 = classify_test_object(*fam, 2, K, lad);
  EXPECT_TRUE(s2.square);
  EXPECT_FALSE(classify_test_object(*fam, 3, K, lad).square);
}

TEST(Localize, RejectsPointsOutsideTheChart) {
  auto m = Manifold::circle();
  auto fam = localize_kernel(build_kernel(m, build_mollifier(1, 2, 1.0)), 0);
  double edge = m->chart(0).image().hi[0];
  EXPECT_FALSE(fam->contains(0.05, {edge - 0.01, 0}));
  EXPECT_TRUE(fam->contains(0.05, {0.0, 0}));
  EXPECT_THROW(localize_kernel(build_kernel(m, build_mollifier(1, 2, 1.0)), 7), DomainError);
}

TEST(Globalize, AgreesWithBaseAwayFromTheCutoffAndKeepsGrading) {
  auto m = Manifold::circle(0.0);
  auto base = build_kernel(m, build_mollifier(1, 2, 1.0));
  auto fam = constant_family(build_mollifier(1, 3, 1.0, Profile::Skew).base, "phi3");
  BoxCutoff chi{Box::interval(-0.5, 0.5), Box::interval(-1.0, 1.0)};
  BoxCutoff chi1{Box::interval(-1.8, 1.8), Box::interval(-2.4, 2.4)};
  auto g = std::static_pointer_cast<const GlobalizedKernel>(globalize_test_object(fam, 0, base, chi, chi1, 2));
  EXPECT_NEAR(g->eta(), 0.999 * 0.8 / 1.0, 1e-12);
  // p outside supp chi: the base kernel
  for (double e : {0.05, 0.3})
    for (double u : {1.5, 1.6}) EXPECT_NEAR(g->at(e, {1.5, 0}).density({u, 0}), base->at(e, {1.5, 0}).density({u, 0}), 1e-12);
  // eps >= eta/2: the base kernel
  EXPECT_NEAR(g->at(0.9, {0.0, 0}).density({0.1, 0}), base->at(0.9, {0.0, 0}).density({0.1, 0}), 1e-12);
  // inside: the family itself
  double e = 0.1;
  EXPECT_NEAR(g->at(e, {0.2, 0}).density({0.25, 0}), (*fam)(e, {0.2, 0})({0.5, 0}) / e, 1e-12);
  for (double ee : {0.02, 0.5}) EXPECT_NEAR(g->at(ee, {0.7, 0}).integral(), 1.0, 1e-10);
  KernelGrid K{Box::interval(-1.5, 1.5), 31, 0};
  auto sin1 = SmoothFunction::trig(1, {{1.0, {1, 0}, 0.3}}, 0.0, "sin");
  auto r = validate_grading(*g, K, kernel_ladder(*g, K.K), sin1, 2);
  EXPECT_TRUE(r.pass) << r.est.order;
}

TEST(Globalize, RejectsFamiliesThatDoNotFit) {
  auto m = Manifold::circle(0.0);
  auto base = build_kernel(m, build_mollifier(1, 2, 1.0));
  auto fam = constant_family(build_mollifier(1, 2, 1.0).base, "phi");
  BoxCutoff chi{Box::interval(-0.5, 0.5), Box::interval(-1.0, 1.0)};
  BoxCutoff tight{Box::interval(-0.9, 0.9), Box::interval(-1.2, 1.2)};
  EXPECT_THROW(globalize_test_object(fam, 0, base, chi, tight, 2), DomainError);
}
