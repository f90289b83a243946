#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfk/core.hpp"
#include "gfk/quadrature.hpp"
#include "gfk/test_function.hpp"

namespace gfk {

// Standard bump exp(-1/(1-|u|^2)) on the unit ball.
inline double bump(const Point& u, int dim) {
  double r2 = dim == 1 ? u[0] * u[0] : u[0] * u[0] + u[1] * u[1];
  if (r2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r2));
}

inline Vec bump_grad(const Point& u, int dim) {
  double r2 = dim == 1 ? u[0] * u[0] : u[0] * u[0] + u[1] * u[1];
  if (r2 >= 1.0) return {0.0, 0.0};
  double s = 1.0 - r2;
  double f = -2.0 * std::exp(-1.0 / s) / (s * s);
  return {f * u[0], dim > 1 ? f * u[1] : 0.0};
}

// Weight profiles the mollifier polynomial multiplies. "skew" tilts the bump
// so that odd moments no longer vanish by symmetry.
enum class Profile { Bump, Skew };

inline Profile parse_profile(const std::string& s) {
  if (s == "bump") return Profile::Bump;
  if (s == "skew") return Profile::Skew;
  throw DomainError("unknown mollifier profile '" + s + "'");
}

inline std::string profile_name(Profile p) { return p == Profile::Bump ? "bump" : "skew"; }

inline double profile_weight(Profile p, const Point& u, int dim) {
  double b = bump(u, dim);
  return p == Profile::Bump ? b : b * (1.0 + 0.5 * u[0]);
}

inline Vec profile_grad(Profile p, const Point& u, int dim) {
  Vec g = bump_grad(u, dim);
  if (p == Profile::Bump) return g;
  double t = 1.0 + 0.5 * u[0];
  return {g[0] * t + 0.5 * bump(u, dim), g[1] * t};
}

// Legendre P_0..P_k and derivatives at t.
inline void legendre(int k, double t, std::vector<double>& p, std::vector<double>& dp) {
  p.assign(k + 1, 0.0);
  dp.assign(k + 1, 0.0);
  p[0] = 1.0;
  if (k >= 1) {
    p[1] = t;
    dp[1] = 1.0;
  }
  for (int n = 1; n < k; ++n) {
    p[n + 1] = ((2 * n + 1) * t * p[n] - n * p[n - 1]) / (n + 1);
    dp[n + 1] = dp[n - 1] + (2 * n + 1) * p[n];
  }
}

struct Mollifier {
  TestFunction base;
  int moment_order = 0;
  int dim = 1;
  double radius = 1.0;
  Profile profile = Profile::Bump;
  std::vector<MultiIndex> basis;   // Legendre product indices
  std::vector<double> coeffs;      // polynomial coefficients on the unit ball
  double rcond = 1.0;
};

// phi(u) = w(u) * sum_a c_a L_a(u) on the unit ball, with c solving
//   sum_b (int w L_a L_b) c_b = L_a(0)   for all |a| <= q.
// Then int phi g = g(0) for every polynomial g of degree <= q, i.e. unit
// integral and vanishing moments of orders 1..q. The Gram matrix is symmetric
// positive definite, and for the even profile it splits by parity so the odd
// coefficients come out exactly zero.
inline Mollifier build_mollifier(int dim, int q, double radius, Profile profile = Profile::Bump) {
  if (dim != 1 && dim != 2) throw DomainError("build_mollifier: dim must be 1 or 2");
  if (q < 0 || q > 8) throw DomainError("build_mollifier: q must lie in 0..8");
  if (!(radius > 0.0)) throw DomainError("build_mollifier: radius must be positive");

  Mollifier m;
  m.moment_order = q;
  m.dim = dim;
  m.radius = radius;
  m.profile = profile;
  m.basis = multi_indices(dim, 0, q);
  const int nb = static_cast<int>(m.basis.size());
  const Box unit = dim == 1 ? Box::interval(-1, 1) : Box::rect(-1, 1, -1, 1);
  const int panels = default_panels(dim);

  auto basis_values = [&](const Point& u, std::vector<double>& out) {
    std::vector<double> p0, d0, p1, d1;
    legendre(q, u[0], p0, d0);
    if (dim == 2) legendre(q, u[1], p1, d1);
    out.resize(nb);
    for (int a = 0; a < nb; ++a) {
      const auto& al = m.basis[a].a;
      out[a] = p0[al[0]] * (dim == 2 ? p1[al[1]] : 1.0);
    }
  };

  // Gram matrix on the profile's native rule, so that later integrals on the
  // same rule reproduce the moment conditions. Mirror images are summed first,
  // as in native_integrate, which keeps parity zeros exact.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nb, nb);
  std::vector<double> lv;
  {
    std::vector<double> d0, w0, d1{0.0}, w1{1.0};
    half_nodes(1.0, panels, d0, w0);
    if (dim == 2) half_nodes(1.0, panels, d1, w1);
    Eigen::MatrixXd group(nb, nb);
    Eigen::VectorXd v(nb);
    for (std::size_t i = 0; i < d0.size(); ++i) {
      for (std::size_t j = 0; j < d1.size(); ++j) {
        group.setZero();
        const int ns = dim == 1 ? 2 : 4;
        for (int s = 0; s < ns; ++s) {
          Point u{(s & 1) ? -d0[i] : d0[i], dim == 2 ? ((s & 2) ? -d1[j] : d1[j]) : 0.0};
          double w = profile_weight(profile, u, dim);
          if (w == 0.0) continue;
          basis_values(u, lv);
          for (int a = 0; a < nb; ++a) v[a] = lv[a];
          group.noalias() += w * v * v.transpose();
        }
        G += (w0[i] * (dim == 2 ? w1[j] : 1.0)) * group;
      }
    }
  }
  Eigen::VectorXd rhs(nb);
  basis_values(Point{0.0, 0.0}, lv);
  for (int a = 0; a < nb; ++a) rhs[a] = lv[a];

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(G);
  m.rcond = lu.rcond();
  if (!(m.rcond > 1e-14)) throw NumericalError("build_mollifier: moment system is singular", m.rcond);
  Eigen::VectorXd c = lu.solve(rhs);
  m.coeffs.assign(c.data(), c.data() + nb);

  auto basis = m.basis;
  auto coeffs = m.coeffs;
  auto poly = [=](const Point& u, Vec* grad) {
    std::vector<double> p0, d0, p1, d1;
    legendre(q, u[0], p0, d0);
    if (dim == 2) legendre(q, u[1], p1, d1);
    double v = 0.0;
    Vec g{0.0, 0.0};
    for (std::size_t a = 0; a < basis.size(); ++a) {
      const auto& al = basis[a].a;
      double y1 = dim == 2 ? p1[al[1]] : 1.0;
      v += coeffs[a] * p0[al[0]] * y1;
      if (grad) {
        g[0] += coeffs[a] * d0[al[0]] * y1;
        if (dim == 2) g[1] += coeffs[a] * p0[al[0]] * d1[al[1]];
      }
    }
    if (grad) *grad = g;
    return v;
  };
  auto f = [=](const Point& u) {
    double w = profile_weight(profile, u, dim);
    return w == 0.0 ? 0.0 : w * poly(u, nullptr);
  };
  auto df = [=](const Point& u) {
    double w = profile_weight(profile, u, dim);
    Vec dw = profile_grad(profile, u, dim);
    Vec dp;
    double p = poly(u, &dp);
    return Vec{dw[0] * p + w * dp[0], dw[1] * p + w * dp[1]};
  };
  TestFunction unit_fn = TestFunction::from(dim, f, df, unit, panels);
  m.base = radius == 1.0 ? unit_fn : unit_fn.scale_translate(radius, Point{0.0, 0.0});
  return m;
}

// Integrals of phi(xi) xi^alpha for 0 <= |alpha| <= up_to.
inline std::map<MultiIndex, double> moments(const TestFunction& phi, int up_to) {
  if (up_to < 0 || up_to > 8) throw DomainError("moments: up_to must lie in 0..8");
  std::map<MultiIndex, double> out;
  const int dim = phi.dim();
  for (const auto& al : multi_indices(dim, 0, up_to))
    out[al] = phi.integrate([&](const Point& y) { return monomial(y, al, dim); });
  return out;
}

// Unnormalized unit bump as a test function; its integral is the classical
// constant 0.443993816168... in 1D.
inline TestFunction unit_bump(int dim) {
  Box b = dim == 1 ? Box::interval(-1, 1) : Box::rect(-1, 1, -1, 1);
  return TestFunction::from(
      dim, [dim](const Point& u) { return bump(u, dim); },
      [dim](const Point& u) { return bump_grad(u, dim); }, b);
}

}  // namespace gfk
