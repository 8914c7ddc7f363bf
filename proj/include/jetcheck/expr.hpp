#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jetcheck/ring.hpp"

namespace jetcheck {

using Rational = mpq_class;

/// Sorted (variable, nonzero exponent) pairs. Exponents may be negative.
class Monomial {
 public:
  using Factor = std::pair<Var, int>;

  Monomial() = default;
  explicit Monomial(std::vector<Factor> factors);  // normalizes

  static Monomial of(Var v, int exponent = 1);

  std::span<const Factor> factors() const { return factors_; }
  bool empty() const { return factors_.empty(); }
  int exponent(Var v) const;
  bool contains(Var v) const { return exponent(v) != 0; }

  /// Product (exponents add).
  friend Monomial operator*(const Monomial& a, const Monomial& b);
  Monomial inverse() const;
  Monomial pow(int n) const;
  Monomial with_exponent(Var v, int exponent) const;

  /// The parameter-only and jet-only parts.
  Monomial parameter_part() const;
  Monomial jet_part() const;

  /// Highest dependent variable (by code), if any.
  bool has_jets() const;
  Var max_jet() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

  std::size_t hash() const;

 private:
  std::vector<Factor> factors_;
};

struct Term {
  Monomial mono;
  Rational coeff;
};

/// Exact Laurent differential polynomial over the rationals.
///
/// The term list is kept sorted by monomial with no zero coefficients and no
/// repeated monomials, so structural equality is mathematical equality.
class JetExpr {
 public:
  JetExpr() = default;
  explicit JetExpr(RingPtr ring) : ring_(std::move(ring)) {}
  JetExpr(RingPtr ring, const Rational& c);
  JetExpr(RingPtr ring, std::vector<Term> terms);  // normalizes

  static JetExpr constant(RingPtr ring, const Rational& c) { return JetExpr(std::move(ring), c); }
  static JetExpr var(RingPtr ring, Var v, int exponent = 1);
  static JetExpr jet(const RingPtr& ring, std::string_view name, int order = 0, int exponent = 1);
  static JetExpr param(const RingPtr& ring, std::string_view name, int exponent = 1);
  static JetExpr monomial(RingPtr ring, Monomial m, const Rational& c = 1);

  const RingPtr& ring() const { return ring_; }
  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;  // no jets and no parameters
  bool is_monomial() const { return terms_.size() == 1; }
  bool has_jets() const;
  /// Coefficient of the empty monomial.
  Rational constant_term() const;

  /// Inverse of a single-term expression; NonMonomialInverse otherwise.
  JetExpr inverse() const;
  JetExpr pow(int n) const;

  JetExpr operator-() const;
  JetExpr& operator+=(const JetExpr& o);
  JetExpr& operator-=(const JetExpr& o);
  JetExpr& operator*=(const JetExpr& o);
  friend JetExpr operator+(JetExpr a, const JetExpr& b) { return a += b; }
  friend JetExpr operator-(JetExpr a, const JetExpr& b) { return a -= b; }
  friend JetExpr operator*(const JetExpr& a, const JetExpr& b);
  friend JetExpr operator*(const Rational& c, const JetExpr& a);
  friend JetExpr operator*(const JetExpr& a, const Rational& c) { return c * a; }

  /// Exact division by a single-term expression.
  friend JetExpr operator/(const JetExpr& a, const JetExpr& b) { return a * b.inverse(); }

  friend bool operator==(const JetExpr& a, const JetExpr& b);

  /// Degree-wise split on one parameter: exponent -> coefficient expression.
  std::vector<std::pair<int, JetExpr>> split_by_param(Var p) const;

  /// All jet variables occurring, sorted.
  std::vector<Var> variables() const;
  bool contains_dependent(std::uint32_t index) const;
  /// Highest order of the given dependent, or -1.
  int max_order(std::uint32_t index) const;
  /// Move this expression into a descendant ring.
  JetExpr in_ring(const RingPtr& target) const;

  std::size_t hash() const;

 private:
  friend JetExpr add_scaled(const JetExpr& a, const JetExpr& b, const Rational& scale);
  RingPtr ring_;
  std::vector<Term> terms_;
};

/// Canonicalize a term list: sort by monomial, merge, drop zeros.
void normalize_terms(std::vector<Term>& terms);

/// a + scale * b.
JetExpr add_scaled(const JetExpr& a, const JetExpr& b, const Rational& scale);

std::string rational_to_string(const Rational& q);

}  // namespace jetcheck
