#pragma once

#include <map>
#include <string>
#include <string_view>

#include "jetcheck/operator.hpp"

namespace jetcheck {

/// Names visible to the infix reader.
///
/// Functions and operators are macros: a function macro f may carry a
/// derivative suffix (f_yy means D^2 f), an operator macro is substituted
/// as a whole.
struct DslEnv {
  RingPtr ring;
  std::map<std::string, JetExpr> functions;
  std::map<std::string, MatrixOp> operators;
  InverseRegistry* registry = nullptr;
};

/// Infix operator language used to transcribe displayed formulas.
///
///   sum     := prod (('+' | '-') prod)*
///   prod    := unary (('*' | '/' | '@') unary)*  '*' composes, '/' divides
///                                                by a monomial on the right,
///                                                '@' applies to functions
///   unary   := '-' unary | power
///   power   := atom ('^' int | '^' '(' '-' int ')')?
///   atom    := number | name | 'd' | 'dinv' | 'inv[' NAME ']'
///            | 'D(' sum ')' | 'adj(' sum ')' | 'T(' sum ')'
///            | '(' sum ')' | '[' row (';' row)* ']'
///
/// Names: macros, dependents, parameters, and jets written with a suffix of
/// the independent variable (u_yy). A 1x1 factor times a matrix acts on
/// every entry. D of a matrix of functions differentiates entrywise.
MatrixOp parse_operator(std::string_view text, const DslEnv& env);
/// The same language, required to denote a multiplication operator.
JetExpr parse_function(std::string_view text, const DslEnv& env);

}  // namespace jetcheck
