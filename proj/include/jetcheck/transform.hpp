#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jetcheck/operator.hpp"
#include "jetcheck/relations.hpp"

namespace jetcheck {

/// Change of independent variable x -> y with D_x = density * D_y.
///
/// Dependents of the x ring map to expressions of the y ring (names without
/// an image map to themselves). Coefficients are reduced modulo the x-side
/// relations before they are mapped.
class Reciprocal {
 public:
  Reciprocal(RingPtr x, RingPtr y, const std::vector<std::pair<std::string, JetExpr>>& images,
             const JetExpr& density, RelationSet x_relations = {});

  const RingPtr& source() const { return x_; }
  const RingPtr& target() const { return y_; }

  JetExpr operator()(const JetExpr& e);
  PseudoOp operator()(const PseudoOp& a);
  OpGrid operator()(const OpGrid& g);
  MatrixOp operator()(const MatrixOp& m);

 private:
  RingPtr x_, y_;
  JetExpr density_;
  Substitution sub_;
  Reducer reducer_;
};

/// Rewrite an expression of degree zero in `dep` through its logarithmic
/// derivative: dep_k = dep * B_k with B_0 = 1, B_{k+1} = D(B_k) + ell B_k.
/// The remaining dependents map by `rest`. Throws Error when some term has
/// nonzero total degree in dep.
JetExpr through_log_derivative(const JetExpr& e, std::string_view dep, const JetExpr& ell,
                               Substitution& rest);

/// Ring homomorphism into the same independent variable (no scale).
JetExpr rename_into(const JetExpr& e, const RingPtr& target,
                    const std::vector<std::pair<std::string, JetExpr>>& images = {});
PseudoOp rename_into(const PseudoOp& a, const RingPtr& target,
                     const std::vector<std::pair<std::string, JetExpr>>& images = {});
MatrixOp rename_into(const MatrixOp& m, const RingPtr& target,
                     const std::vector<std::pair<std::string, JetExpr>>& images = {});

}  // namespace jetcheck
