#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gfk/distributions.hpp"
#include "gfk/manifold.hpp"

namespace gfk {

class ManifoldDistribution;
using MDistPtr = std::shared_ptr<const ManifoldDistribution>;

// Distribution density on a manifold, given by its local representatives.
class ManifoldDistribution {
 public:
  explicit ManifoldDistribution(ManifoldPtr m) : m_(std::move(m)) {}
  virtual ~ManifoldDistribution() = default;
  const ManifoldPtr& manifold() const { return m_; }

  // Representative on the image of chart a.
  virtual DistPtr local(int a) const = 0;
  virtual std::string describe() const = 0;
  // Intrinsic points where the distribution is not smooth.
  virtual std::vector<Point> singular_points() const { return {}; }
  // Non-null when the distribution is a smooth function.
  virtual const SmoothFunction* smooth() const { return nullptr; }

  double pair(const NForm& w) const {
    double s = 0.0;
    for (const auto& p : w.pieces()) s += p.weight * local(p.chart)->pair(p.coeff);
    return s;
  }

 protected:
  Box domain(int a) const { return m_->chart(a).image(); }
  ManifoldPtr m_;
};

class MDelta : public ManifoldDistribution {
 public:
  MDelta(ManifoldPtr m, Point p) : ManifoldDistribution(std::move(m)), p_(m_->wrap(p)) {}
  DistPtr local(int a) const override {
    const Chart& c = m_->chart(a);
    if (!c.contains(p_)) return std::make_shared<ZeroDist>(m_->dim(), domain(a));
    // evaluation of the density with respect to the coordinate volume at p
    return combination({{c.det(p_), delta_at(c.to_chart(p_), m_->dim(), domain(a))}});
  }
  std::string describe() const override { return "delta"; }
  std::vector<Point> singular_points() const override { return {p_}; }

 private:
  Point p_;
};

class MRegular : public ManifoldDistribution {
 public:
  MRegular(ManifoldPtr m, SmoothFunction f) : ManifoldDistribution(std::move(m)), f_(std::move(f)) {}
  DistPtr local(int a) const override { return regular(in_chart(f_, m_->chart(a)), domain(a)); }
  std::string describe() const override { return "regular(" + f_.name + ")"; }
  const SmoothFunction* smooth() const override { return &f_; }

 private:
  SmoothFunction f_;
};

// A distribution on the interval given in the intrinsic coordinate t.
class MIntervalDist : public ManifoldDistribution {
 public:
  MIntervalDist(ManifoldPtr m, DistPtr u) : ManifoldDistribution(std::move(m)), u_(std::move(u)) {
    if (m_->kind() != ManifoldKind::Interval) throw DomainError("distribution only defined on the interval");
  }
  DistPtr local(int a) const override {
    const Chart& c = m_->chart(a);
    if (m_->warp() == 0.0) return u_;
    return pullback_dist(u_, c.psi.inverse(), domain(a));
  }
  std::string describe() const override { return u_->describe(); }
  std::vector<Point> singular_points() const override { return u_->singular_points(); }

 private:
  DistPtr u_;
};

class MLie : public ManifoldDistribution {
 public:
  MLie(MDistPtr u, VectorField X) : ManifoldDistribution(u->manifold()), u_(std::move(u)), X_(std::move(X)) {}
  DistPtr local(int a) const override { return lie_derivative_dist(u_->local(a), X_.local(*m_, a)); }
  std::string describe() const override { return "lie(" + u_->describe() + ")"; }
  std::vector<Point> singular_points() const override { return u_->singular_points(); }

 private:
  MDistPtr u_;
  VectorField X_;
};

class MTimes : public ManifoldDistribution {
 public:
  MTimes(SmoothFunction f, MDistPtr u) : ManifoldDistribution(u->manifold()), f_(std::move(f)), u_(std::move(u)) {}
  DistPtr local(int a) const override { return times(in_chart(f_, m_->chart(a)), u_->local(a)); }
  std::string describe() const override { return f_.name + "*" + u_->describe(); }
  std::vector<Point> singular_points() const override { return u_->singular_points(); }

 private:
  SmoothFunction f_;
  MDistPtr u_;
};

class MCombination : public ManifoldDistribution {
 public:
  explicit MCombination(std::vector<std::pair<double, MDistPtr>> t)
      : ManifoldDistribution(t.at(0).second->manifold()), t_(std::move(t)) {}
  DistPtr local(int a) const override {
    std::vector<std::pair<double, DistPtr>> l;
    for (const auto& [c, u] : t_) l.emplace_back(c, u->local(a));
    return combination(std::move(l));
  }
  std::string describe() const override { return "combination"; }
  std::vector<Point> singular_points() const override {
    std::vector<Point> out;
    for (const auto& [c, u] : t_)
      for (const auto& p : u->singular_points()) out.push_back(p);
    return out;
  }

 private:
  std::vector<std::pair<double, MDistPtr>> t_;
};

inline MDistPtr m_delta(ManifoldPtr m, const Point& p) { return std::make_shared<MDelta>(std::move(m), p); }
inline MDistPtr m_regular(ManifoldPtr m, const SmoothFunction& f) {
  return std::make_shared<MRegular>(std::move(m), f);
}
inline MDistPtr m_heaviside(ManifoldPtr m, double c = 0.0) {
  Box dom = Box::interval(-m->half_length(), m->half_length());
  return std::make_shared<MIntervalDist>(m, heaviside(c, dom));
}
inline MDistPtr m_pv(ManifoldPtr m) {
  Box dom = Box::interval(-m->half_length(), m->half_length());
  return std::make_shared<MIntervalDist>(m, pv_inv_x(dom));
}
inline MDistPtr m_lie(MDistPtr u, const VectorField& X) { return std::make_shared<MLie>(std::move(u), X); }
inline MDistPtr m_times(const SmoothFunction& f, MDistPtr u) { return std::make_shared<MTimes>(f, std::move(u)); }
inline MDistPtr m_combination(std::vector<std::pair<double, MDistPtr>> t) {
  return std::make_shared<MCombination>(std::move(t));
}

}  // namespace gfk
