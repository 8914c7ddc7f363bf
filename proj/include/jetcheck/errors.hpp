#pragma once

#include <stdexcept>
#include <string>

namespace jetcheck {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in unrelated rings.
class ContextMismatch : public Error {
 public:
  using Error::Error;
};

/// A name is not present in the ring roster.
class UnknownName : public Error {
 public:
  using Error::Error;
};

/// D_t requested for a dependent without an evolution rule.
class MissingEvolution : public Error {
 public:
  using Error::Error;
};

/// antiderivative() on an expression outside the image of D.
class NotIntegrable : public Error {
 public:
  using Error::Error;
};

/// A polynomial (non-monomial) would have to be raised to a negative power.
class NonMonomialInverse : public Error {
 public:
  using Error::Error;
};

/// random_eval hit a zero base under a negative exponent.
class DivisionByZero : public Error {
 public:
  using Error::Error;
};

/// A relation set violates its termination invariant.
class InvalidRelation : public Error {
 public:
  using Error::Error;
};

/// Operator composition leaves a nonlocal core that cannot be closed.
class NonClosedComposition : public Error {
 public:
  using Error::Error;
};

/// Text could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A catalog entry lacks the shape its reading requires, e.g. a constraint
/// without its leading derivative. Checks report this as a failure.
class MalformedInput : public Error {
 public:
  using Error::Error;
};

/// Dimensions of operator matrices do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace jetcheck
