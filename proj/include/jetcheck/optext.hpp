#pragma once

#include <string>
#include <string_view>

#include "jetcheck/operator.hpp"

namespace jetcheck {

/// Operator text form:
///   op    := "0" | term (" + " term)*
///   term  := "(" prefix ")*d^" k | "(" prefix ")*dinv*(" prefix ")"
///   grid  := "[[" op (", " op)* "]" (", [" ... "]")* "]"
///   mop   := grid (" + {" grid ("*inv[" NAME "]*" grid)+ "}")*
/// Coefficients use the prefix grammar of serialize.hpp.
std::string to_text(const PseudoOp& op);
std::string to_text(const OpGrid& g);
std::string to_text(const MatrixOp& m);

PseudoOp parse_pseudo(std::string_view text, const RingPtr& ring);
OpGrid parse_grid(std::string_view text, const RingPtr& ring);
MatrixOp parse_matrix_op(std::string_view text, const RingPtr& ring);

}  // namespace jetcheck
