#include "doctest.h"
#include "jetcheck/catalog.hpp"
#include "jetcheck/operator.hpp"

using namespace jetcheck;

namespace {

std::vector<JetExpr> values_of(const Entry& e) {
  std::vector<JetExpr> out;
  if (e.kind == EntryKind::Expr) out.push_back(e.expr);
  for (const auto& row : e.grid) out.insert(out.end(), row.begin(), row.end());
  for (const auto& [name, v] : e.bindings) out.push_back(v);
  for (const auto& c : e.constraints) out.push_back(c.residual);
  std::vector<MatrixOp> ops = e.chain;
  if (e.kind == EntryKind::Operator) ops.push_back(e.op);
  for (const auto& m : ops) {
    std::vector<OpGrid> grids{m.plain()};
    for (const auto& w : m.words()) grids.insert(grids.end(), w.mats.begin(), w.mats.end());
    for (const auto& g : grids) {
      for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) {
          const PseudoOp& p = g.at(i, j);
          out.insert(out.end(), p.local().begin(), p.local().end());
          for (const auto& [mono, coeff] : p.tail()) out.push_back(coeff);
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("catalog index is complete") {
  const Catalog& cat = Catalog::builtin();
  auto idx = cat.index();
  CHECK(idx.size() >= 40);
  for (const auto& [id, citation] : idx) {
    CHECK(cat.contains(id));
    CHECK_FALSE(citation.empty());
  }
}

TEST_CASE("every entry re-serializes bit-exactly") {
  const Catalog& cat = Catalog::builtin();
  for (const Entry& e : cat.entries()) {
    std::string text = serialize(e);
    Entry back = parse_value(e, text, cat.ring(e.ring));
    CHECK_MESSAGE(serialize(back) == text, e.id);
  }
}

TEST_CASE("lambda degrees are bounded") {
  const Catalog& cat = Catalog::builtin();
  for (const Entry& e : cat.entries()) {
    for (const JetExpr& v : values_of(e)) {
      for (const auto& t : v.terms()) {
        for (const auto& [var, k] : t.mono.factors()) {
          if (var.is_param()) CHECK_MESSAGE((k >= -2 && k <= 2), e.id);
        }
      }
    }
  }
}

TEST_CASE("sigma matrices are involutions") {
  const Catalog& cat = Catalog::builtin();
  for (const char* id : {"sigma1", "sigma3"}) {
    const MatrixOp& s = cat.op(id);
    CHECK(compose(s, s).plain() == OpGrid::identity(s.ring(), 2));
  }
}

TEST_CASE("mutation changes exactly one entry") {
  const Catalog& cat = Catalog::builtin();
  Catalog m = cat.mutated("F1", 0);
  CHECK(serialize(m.get("F1")) != serialize(cat.get("F1")));
  CHECK(serialize(m.get("F2")) == serialize(cat.get("F2")));
  CHECK(cat.coefficient_sites("F1") > 0);
}
