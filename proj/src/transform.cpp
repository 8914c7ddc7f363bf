#include "jetcheck/transform.hpp"

#include "jetcheck/calculus.hpp"

namespace jetcheck {

Reciprocal::Reciprocal(RingPtr x, RingPtr y,
                       const std::vector<std::pair<std::string, JetExpr>>& images,
                       const JetExpr& density, RelationSet x_relations)
    : x_(std::move(x)),
      y_(std::move(y)),
      density_(density.in_ring(y_)),
      sub_(x_, y_),
      reducer_(x_relations.ring() ? std::move(x_relations) : RelationSet(x_)) {
  for (const auto& [name, img] : images) sub_.map(name, img.in_ring(y_));
  sub_.scale(density_);
}

JetExpr Reciprocal::operator()(const JetExpr& e) {
  return sub_.apply(reducer_.reduce(e.in_ring(unify(e.ring(), x_))));
}

PseudoOp Reciprocal::operator()(const PseudoOp& a) {
  PseudoOp dy = PseudoOp::d(y_).left_mul(density_);
  return a.map([this](const JetExpr& c) { return (*this)(c); }, y_, dy, density_.inverse());
}

OpGrid Reciprocal::operator()(const OpGrid& g) {
  return g.map_cells([this](const PseudoOp& a) { return (*this)(a); }, y_);
}

MatrixOp Reciprocal::operator()(const MatrixOp& m) {
  return m.map_grids([this](const OpGrid& g) { return (*this)(g); });
}

JetExpr through_log_derivative(const JetExpr& e, std::string_view dep, const JetExpr& ell,
                               Substitution& rest) {
  const RingPtr& src = e.ring();
  const std::uint32_t h = src->dependent_index(dep);
  std::vector<JetExpr> bell{JetExpr(ell.ring(), 1)};
  auto bell_at = [&](int k) -> const JetExpr& {
    while (static_cast<int>(bell.size()) <= k) {
      bell.push_back(total_derivative(bell.back()) + ell * bell.back());
    }
    return bell[static_cast<std::size_t>(k)];
  };
  JetExpr out(rest.target());
  for (const auto& t : e.terms()) {
    std::vector<Monomial::Factor> others;
    JetExpr hpart(rest.target(), 1);
    int degree = 0;
    for (const auto& [v, k] : t.mono.factors()) {
      if (!v.is_param() && v.index() == h) {
        degree += k;
        hpart *= bell_at(v.order()).in_ring(rest.target()).pow(k);
      } else {
        others.emplace_back(v, k);
      }
    }
    if (degree != 0) throw Error("expression is not of degree zero in " + std::string(dep));
    out += hpart * rest.apply(JetExpr::monomial(src, Monomial(std::move(others)), t.coeff));
  }
  return out;
}

namespace {

Substitution renaming(const RingPtr& source, const RingPtr& target,
                      const std::vector<std::pair<std::string, JetExpr>>& images) {
  Substitution s(source, target);
  for (const auto& [name, img] : images) s.map(name, img.in_ring(target));
  return s;
}

}  // namespace

JetExpr rename_into(const JetExpr& e, const RingPtr& target,
                    const std::vector<std::pair<std::string, JetExpr>>& images) {
  Substitution s = renaming(e.ring(), target, images);
  return s.apply(e);
}

PseudoOp rename_into(const PseudoOp& a, const RingPtr& target,
                     const std::vector<std::pair<std::string, JetExpr>>& images) {
  Substitution s = renaming(a.ring(), target, images);
  return a.map([&s](const JetExpr& c) { return s.apply(c); }, target, PseudoOp::d(target),
               JetExpr(target, 1));
}

MatrixOp rename_into(const MatrixOp& m, const RingPtr& target,
                     const std::vector<std::pair<std::string, JetExpr>>& images) {
  Substitution s = renaming(m.ring(), target, images);
  auto cell = [&](const PseudoOp& a) {
    return a.map([&s](const JetExpr& c) { return s.apply(c); }, target, PseudoOp::d(target),
                 JetExpr(target, 1));
  };
  return m.map_grids([&](const OpGrid& g) { return g.map_cells(cell, target); });
}

}  // namespace jetcheck
