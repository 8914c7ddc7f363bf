#pragma once

#include <vector>

#include "jetcheck/expr.hpp"

namespace jetcheck {

/// Total derivative D with respect to the ring's independent variable.
JetExpr total_derivative(const JetExpr& e);
/// D applied n times.
JetExpr total_derivative(const JetExpr& e, int n);

/// Partial derivative with respect to a single jet coordinate.
JetExpr partial(const JetExpr& e, Var v);

/// Sum over k of (-D)^k applied to the partial with respect to dep_k.
JetExpr euler_derivative(const JetExpr& e, std::uint32_t dep);
JetExpr euler_derivative(const JetExpr& e, std::string_view dep);

/// Coefficients c_k of the linearization sum_k c_k D^k with respect to dep.
std::vector<JetExpr> frechet_coeffs(const JetExpr& e, std::uint32_t dep);

/// True when e = D(F) for a Laurent differential polynomial F.
///
/// Equivalent to the Euler test on polynomial input; Laurent input whose only
/// primitives are logarithmic (u_y/u) is rejected.
bool is_total_derivative(const JetExpr& e);

/// F with D(F) = e and no constant term. Throws NotIntegrable.
JetExpr antiderivative(const JetExpr& e);

}  // namespace jetcheck
