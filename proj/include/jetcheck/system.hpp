#pragma once

#include <map>
#include <string>

#include "jetcheck/relations.hpp"

namespace jetcheck {

/// Evolution system: D_t of each evolving dependent plus constraints.
struct SystemDef {
  std::string name;
  RingPtr ring;
  std::map<std::uint32_t, JetExpr> evolution;
  RelationSet constraints;
  std::string citation;

  void evolve(std::string_view dep, const JetExpr& rhs);
  bool evolves(std::uint32_t dep) const { return evolution.count(dep) != 0; }
};

/// D_t e with D_t(a_k) = D^k(rhs_a). Throws MissingEvolution.
JetExpr evolutionary_derivative(const JetExpr& e, const SystemDef& sys);

}  // namespace jetcheck
