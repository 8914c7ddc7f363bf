#include "jetcheck/system.hpp"

#include "jetcheck/calculus.hpp"

namespace jetcheck {

void SystemDef::evolve(std::string_view dep, const JetExpr& rhs) {
  evolution[ring->dependent_index(dep)] = rhs.in_ring(ring);
}

JetExpr evolutionary_derivative(const JetExpr& e, const SystemDef& sys) {
  std::map<Var, JetExpr> flows;
  auto flow = [&](Var v) -> const JetExpr& {
    if (auto it = flows.find(v); it != flows.end()) return it->second;
    auto ev = sys.evolution.find(v.index());
    if (ev == sys.evolution.end()) {
      throw MissingEvolution("no evolution rule for " + e.ring()->name_of(v));
    }
    JetExpr f = ev->second;
    for (int k = 0; k < v.order(); ++k) f = total_derivative(f);
    return flows.emplace(v, std::move(f)).first->second;
  };
  JetExpr out(unify(e.ring(), sys.ring));
  for (Var v : e.variables()) {
    JetExpr p = partial(e, v);
    out += p * flow(v);
  }
  return out;
}

}  // namespace jetcheck
