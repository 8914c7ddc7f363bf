#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jetcheck/operator.hpp"
#include "jetcheck/system.hpp"

namespace jetcheck {

enum class EntryKind { Expr, Grid, Operator, Chain, Bindings, System };

std::string to_string(EntryKind k);

/// Constraint lhs = rhs, solved for lead when a relation set is built.
struct Constraint {
  std::string dep;
  int order = 0;
  JetExpr residual;  // lhs - rhs
};

/// One transcribed formula with its location in the source text.
struct Entry {
  std::string id;
  std::string citation;
  std::string ring;
  EntryKind kind = EntryKind::Expr;

  JetExpr expr;
  std::vector<std::vector<JetExpr>> grid;
  MatrixOp op;
  std::vector<MatrixOp> chain;
  /// Bindings, or the evolution right-hand sides of a system.
  std::vector<std::pair<std::string, JetExpr>> bindings;
  std::vector<Constraint> constraints;
};

/// Canonical text of an entry's value; parse_value inverts it.
std::string serialize(const Entry& e);
Entry parse_value(const Entry& shape, std::string_view text, const RingPtr& ring);

/// The transcribed objects, immutable once built.
///
/// Modified copies (errata, mutation tests) share nothing mutable with the
/// built-in catalog.
class Catalog {
 public:
  static const Catalog& builtin();

  const RingPtr& ring(std::string_view name) const;
  const std::map<std::string, RingPtr, std::less<>>& rings() const { return data_->rings; }
  bool contains(std::string_view id) const;
  const Entry& get(std::string_view id) const;
  const std::vector<Entry>& entries() const { return data_->entries; }
  std::vector<std::pair<std::string, std::string>> index() const;

  const JetExpr& expr(std::string_view id) const;
  const std::vector<std::vector<JetExpr>>& grid(std::string_view id) const;
  const MatrixOp& op(std::string_view id) const;
  const std::vector<MatrixOp>& chain(std::string_view id) const;
  JetExpr binding(std::string_view id, std::string_view name) const;
  /// Evolution plus constraints, each solved for its lead.
  SystemDef system(std::string_view id) const;

  /// Copy with one entry replaced (same id, kind and ring).
  Catalog with_entry(Entry e) const;
  /// Number of rational coefficients in the entry's value.
  std::size_t coefficient_sites(std::string_view id) const;
  /// Sites in the evolution part of a system; they come first.
  std::size_t evolution_sites(std::string_view id) const;
  /// Copy with coefficient `site` of entry `id` increased by delta.
  Catalog mutated(std::string_view id, std::size_t site, const Rational& delta = 1) const;

 private:
  struct Data {
    std::map<std::string, RingPtr, std::less<>> rings;
    std::vector<Entry> entries;
    std::map<std::string, std::size_t, std::less<>> position;
  };
  explicit Catalog(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  static std::shared_ptr<const Data> build();
  std::shared_ptr<const Data> data_;
};

}  // namespace jetcheck
