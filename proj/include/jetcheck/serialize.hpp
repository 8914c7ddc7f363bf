#pragma once

#include <string>
#include <string_view>

#include "jetcheck/expr.hpp"

namespace jetcheck {

/// Fully parenthesized prefix form:
///   expr  := rational | coord | (+ expr expr) | (* expr expr)
///          | (^ coord int) | (param name int)
///   coord := name '_' order
std::string to_prefix(const JetExpr& e);
JetExpr parse_prefix(std::string_view text, const RingPtr& ring);

}  // namespace jetcheck
