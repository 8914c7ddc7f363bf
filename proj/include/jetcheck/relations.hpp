#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jetcheck/expr.hpp"

namespace jetcheck {

/// lead -> replacement; every derivative of lead is rewritten through D.
struct Rule {
  Var lead;
  JetExpr replacement;
};

/// Solved, terminating rewrite system.
///
/// At most one rule per dependent. A rule's replacement may contain lower
/// derivatives of its own dependent, and jets of other dependents as long as
/// the dependency graph between ruled dependents stays acyclic.
class RelationSet {
 public:
  RelationSet() = default;
  explicit RelationSet(RingPtr ring) : ring_(std::move(ring)) {}

  const RingPtr& ring() const { return ring_; }
  const std::vector<Rule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

  /// Throws InvalidRelation when the invariant would break.
  void add(Var lead, const JetExpr& replacement);
  void add(const Rule& rule) { add(rule.lead, rule.replacement); }
  /// Same rules, reinterpreted in a descendant ring.
  RelationSet in_ring(const RingPtr& target) const;

  const Rule* rule_for(std::uint32_t dep) const;
  /// True when v is the lead of a rule or one of its derivatives.
  bool governs(Var v) const;

 private:
  RingPtr ring_;
  std::vector<Rule> rules_;
};

/// Reduction engine with memoized images of governed jets.
///
/// Not thread-safe; each check owns its reducers.
class Reducer {
 public:
  explicit Reducer(RelationSet rels, int max_order = 64);

  const RelationSet& relations() const { return rels_; }
  JetExpr reduce(const JetExpr& e);
  /// Number of times each rule (by position) has been used.
  const std::vector<std::size_t>& usage() const { return usage_; }

 private:
  const JetExpr& image(Var v);

  RelationSet rels_;
  int max_order_;
  std::map<Var, JetExpr> memo_;
  std::vector<std::size_t> usage_;
};

/// Unique normal form of e modulo R.
JetExpr reduce_modulo(const JetExpr& e, const RelationSet& rels);

/// Homomorphism between rings defined on order-zero dependents.
///
/// Jet images follow image(a_{k+1}) = scale * D(image(a_k)); without a scale
/// the target derivative is used unchanged. Dependents without a rule map to
/// the same name in the target ring, parameters likewise.
class Substitution {
 public:
  Substitution(RingPtr source, RingPtr target);

  Substitution& map(std::string_view dep, const JetExpr& image);
  Substitution& scale(const JetExpr& factor);
  /// Reduce every jet image in the target (keeps intermediate sizes down).
  Substitution& reduce_with(const RelationSet& rels);

  JetExpr apply(const JetExpr& e);
  const RingPtr& source() const { return source_; }
  const RingPtr& target() const { return target_; }

 private:
  const JetExpr& image(Var v);

  RingPtr source_;
  RingPtr target_;
  std::map<std::uint32_t, JetExpr> base_;
  std::optional<JetExpr> scale_;
  std::optional<Reducer> reducer_;
  std::map<Var, JetExpr> memo_;
};

/// substitute(e, rules) in the spirit of the kernel operation list.
JetExpr substitute(const JetExpr& e, const RingPtr& target,
                   const std::vector<std::pair<std::string, JetExpr>>& rules,
                   const std::optional<JetExpr>& scale = std::nullopt);

/// Solve eq = 0 for v when eq is linear in v with a monomial coefficient.
Rule solve_for(const JetExpr& eq, Var v);

/// Exact evaluation at rational points.
struct Assignment {
  std::map<Var, Rational> values;

  Rational operator[](Var v) const;
};

Rational random_eval(const JetExpr& e, const Assignment& a);

/// Seeded values from {-9..9}\{0} divided by 1..7, for every jet of e.
class AssignmentGenerator {
 public:
  explicit AssignmentGenerator(std::uint64_t seed);
  Assignment next(const std::vector<Var>& vars);
  /// All jets and parameters occurring in any of the expressions.
  static std::vector<Var> variables_of(const std::vector<JetExpr>& exprs);

 private:
  std::uint64_t state_;
  std::uint64_t draw();
};

}  // namespace jetcheck
