#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jetcheck/operator.hpp"
#include "jetcheck/relations.hpp"

namespace jetcheck {

/// Application of nonlocal operators with recorded auxiliaries.
///
/// Every D^{-1} or inverse-atom application either produces a local result or
/// a fresh auxiliary dependent with a defining rule. Auxiliaries are shared:
/// integrals of expressions linear in the generic dependents (test vectors
/// and earlier auxiliaries) are reduced by parts to canonical atoms
/// rho with rho_y = m * g (m a jet monomial, g generic), and everything else
/// is keyed by its monic normal form.
class NonlocalContext {
 public:
  enum class AuxKind { Canonical, Opaque, Inverse };
  struct Aux {
    std::string name;
    AuxKind kind;
    Var lead;
    JetExpr definition;  // replacement of the lead
    std::string atom;    // inverted atom; empty for D^{-1}
  };

  explicit NonlocalContext(RingPtr base, RelationSet rels = {}, InverseRegistry* reg = nullptr,
                           int max_order = 64);

  const RingPtr& ring() const { return ring_; }
  const RelationSet& relations() const { return rels_; }
  const std::vector<Aux>& auxiliaries() const { return aux_; }
  InverseRegistry* registry() const { return reg_; }

  /// Fresh generic dependents prefix0..prefix{n-1}.
  std::vector<JetExpr> test_vector(std::size_t n, const std::string& prefix = "X");
  /// Additional relation in the current ring (e.g. a constraint).
  void add_relation(Var lead, const JetExpr& replacement);

  JetExpr reduce(const JetExpr& e);
  /// D^{-1}(arg) with zero integration constant.
  JetExpr integrate(const JetExpr& arg);
  /// Declare D^{-1}(arg) = primitive, for a relation known outside the rule set.
  void assume_primitive(const JetExpr& arg, const JetExpr& primitive);
  /// inv[atom](arg) for a scalar registered atom.
  JetExpr invert(const std::string& atom, const JetExpr& arg);
  std::vector<JetExpr> apply(const MatrixOp& a, const std::vector<JetExpr>& v);
  std::vector<JetExpr> apply(const OpGrid& a, const std::vector<JetExpr>& v);
  std::vector<JetExpr> apply_chain(const std::vector<MatrixOp>& chain, std::vector<JetExpr> v);

  /// True when e involves an opaque or inverse auxiliary.
  bool has_opaque(const JetExpr& e) const;
  /// True when e cannot vanish: it is a nonzero local expression, it is
  /// affine in a single opaque auxiliary whose rule makes e = 0 inconsistent,
  /// or its integrals are independent. False means not decided.
  bool provably_nonzero(const JetExpr& e);
  bool is_generic(std::uint32_t dep) const;

  /// Rule usage counts of the current reducer, by rule position.
  std::vector<std::size_t> usage();

 private:
  Reducer& reducer();
  Var new_aux(const std::string& stem, AuxKind kind, int order, const JetExpr& definition);
  JetExpr integrate_linear(std::uint32_t g, std::vector<JetExpr> coeffs);
  JetExpr opaque(const JetExpr& e);
  bool integrals_independent(const JetExpr& r) const;
  std::optional<JetExpr> preimage(const PseudoOp& f, const JetExpr& arg);

  RingPtr ring_;
  RelationSet rels_;
  InverseRegistry* reg_;
  int max_order_;
  std::optional<Reducer> reducer_;
  std::vector<std::size_t> usage_carry_;
  std::vector<Aux> aux_;
  std::map<std::uint32_t, AuxKind> generic_;  // test vectors map to Canonical
  std::set<std::uint32_t> test_vectors_;
  std::map<std::pair<Monomial, std::uint32_t>, std::uint32_t> canonical_;
  std::map<std::string, std::uint32_t> opaque_;
  std::map<std::string, JetExpr> primitives_;
  std::size_t counter_ = 0;
};

enum class Rung { NormalForm, TestVector, Numeric };
enum class Verdict { Pass, Fail, Undecidable };

std::string to_string(Rung r);
std::string to_string(Verdict v);

struct IdentityOutcome {
  Verdict verdict = Verdict::Pass;
  Rung decided_by = Rung::NormalForm;
  /// Nonzero residual entries, serialized.
  std::vector<std::string> residual;
  /// Number of numeric assignments at which both sides agreed.
  int numeric_agree = 0;
  int numeric_total = 0;
  std::vector<std::string> notes;
};

struct IdentityOptions {
  RelationSet relations;
  InverseRegistry* registry = nullptr;
  std::uint64_t seed = 0;
  int numeric_points = 5;
  int max_order = 64;
  bool allow_normal_form = true;
};

/// Ladder: normal form of both chains, then test vectors, then numeric
/// confirmation of the rung-2 outcome.
IdentityOutcome verify_operator_identity(const std::vector<MatrixOp>& lhs,
                                         const std::vector<MatrixOp>& rhs,
                                         const IdentityOptions& opts = {});

/// Exact values of both sides agree at `points` seeded assignments.
int numeric_agreement(const std::vector<JetExpr>& lhs, const std::vector<JetExpr>& rhs,
                      std::uint64_t seed, int points, int* evaluated = nullptr);

}  // namespace jetcheck
