// Randomized kernel and operator properties, 200 cases each.

#include <random>

#include "doctest.h"
#include "jetcheck/calculus.hpp"
#include "jetcheck/catalog.hpp"
#include "jetcheck/errors.hpp"
#include "jetcheck/operator.hpp"
#include "jetcheck/relations.hpp"
#include "jetcheck/system.hpp"
#include "jetcheck/transform.hpp"

using namespace jetcheck;

namespace {

constexpr int kCases = 200;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  Rational coeff() {
    int n = uniform(-6, 6);
    Rational q(n == 0 ? 1 : n, uniform(1, 4));
    q.canonicalize();
    return q;
  }

  /// Sum of up to `terms` monomials in the jets of deps, orders <= max_order.
  JetExpr expr(const RingPtr& r, const std::vector<std::string>& deps, int terms = 4, int max_order = 3,
               bool laurent = false) {
    JetExpr e(r);
    int n = uniform(1, terms);
    for (int t = 0; t < n; ++t) {
      JetExpr m(r, coeff());
      int factors = uniform(0, 3);
      for (int f = 0; f < factors; ++f) {
        const std::string& d = deps[uniform(0, static_cast<int>(deps.size()) - 1)];
        int order = uniform(0, max_order);
        int exp = (laurent && order == 0 && uniform(0, 3) == 0) ? -uniform(1, 2) : uniform(1, 2);
        m *= JetExpr::jet(r, d, order, exp);
      }
      e += m;
    }
    return e;
  }

  PseudoOp local_op(const RingPtr& r, const std::vector<std::string>& deps, int max_order = 2) {
    std::vector<JetExpr> c;
    int n = uniform(0, max_order);
    for (int k = 0; k <= n; ++k) c.push_back(uniform(0, 2) == 0 ? JetExpr(r) : expr(r, deps, 2, 1));
    return PseudoOp::from_coeffs(r, std::move(c));
  }
};

}  // namespace

TEST_CASE("normal-form soundness under evaluation") {
  Gen g(1);
  auto r = Ring::make("x", {"u", "v"});
  AssignmentGenerator points(11);
  int evaluated = 0;
  for (int c = 0; c < kCases; ++c) {
    JetExpr a = g.expr(r, {"u", "v"}, 4, 3, true), b = g.expr(r, {"u", "v"}, 4, 3, true);
    JetExpr lhs = a * b + a;
    auto vars = AssignmentGenerator::variables_of({a, b, lhs});
    for (int k = 0; k < 20; ++k) {
      Assignment p = points.next(vars);
      Rational ra = random_eval(a, p), rb = random_eval(b, p);
      CHECK(random_eval(lhs, p) == ra * rb + ra);
      ++evaluated;
    }
  }
  CHECK(evaluated == kCases * 20);
}

TEST_CASE("Leibniz rule") {
  Gen g(2);
  auto r = Ring::make("x", {"u", "v"});
  for (int c = 0; c < kCases; ++c) {
    JetExpr a = g.expr(r, {"u", "v"}, 4, 3, true), b = g.expr(r, {"u", "v"}, 4, 3, true);
    CHECK(total_derivative(a * b) == total_derivative(a) * b + a * total_derivative(b));
  }
}

TEST_CASE("Euler operator kills total derivatives") {
  Gen g(3);
  auto r = Ring::make("x", {"u", "v"});
  for (int c = 0; c < kCases; ++c) {
    JetExpr e = total_derivative(g.expr(r, {"u", "v"}, 4, 3, true));
    CHECK(euler_derivative(e, "u").is_zero());
    CHECK(euler_derivative(e, "v").is_zero());
  }
}

TEST_CASE("antiderivative round trip") {
  Gen g(4);
  auto r = Ring::make("x", {"u", "v"});
  int exact = 0;
  for (int c = 0; c < kCases; ++c) {
    JetExpr f = g.expr(r, {"u", "v"}, 4, 3);
    JetExpr e = total_derivative(f);
    if (c % 2 == 1) e += g.expr(r, {"u", "v"}, 2, 2);
    if (!is_total_derivative(e)) {
      CHECK(c % 2 == 1);
      continue;
    }
    ++exact;
    CHECK(total_derivative(antiderivative(e)) == e);
  }
  CHECK(exact >= kCases / 2);
}

TEST_CASE("Frechet derivative linearizes") {
  Gen g(5);
  auto r = Ring::make("x", {"u", "v", "phi"}, {"lambda", "eps"});
  JetExpr phi = JetExpr::jet(r, "phi"), eps = JetExpr::param(r, "eps");
  for (int c = 0; c < kCases; ++c) {
    JetExpr e = g.expr(r, {"u", "v"}, 4, 3);
    JetExpr moved = rename_into(e, r, {{"u", JetExpr::jet(r, "u") + eps * phi}});
    JetExpr first(r);
    for (const auto& [p, part] : moved.split_by_param(r->param("eps"))) {
      if (p == 1) first = part;
    }
    CHECK(first == frechet_row(e, "u").apply_local(phi));
  }
}

TEST_CASE("reduction is idempotent and independent of rule order") {
  Gen g(6);
  const Catalog& cat = Catalog::builtin();
  for (const char* id : {"md.system", "cch.system"}) {
    SystemDef sys = cat.system(id);
    RelationSet reversed(sys.ring);
    const auto& rules = sys.constraints.rules();
    for (auto it = rules.rbegin(); it != rules.rend(); ++it) reversed.add(*it);
    Reducer a(sys.constraints), b(reversed);
    const auto& deps = sys.ring->dependents();
    for (int c = 0; c < kCases; ++c) {
      JetExpr e = g.expr(sys.ring, deps, 4, 6);
      JetExpr once = a.reduce(e);
      CHECK(a.reduce(once) == once);
      CHECK(b.reduce(e) == once);
    }
  }
}

TEST_CASE("D_t and D_x commute under the coupled system") {
  Gen g(7);
  SystemDef sys = Catalog::builtin().system("cch.system");
  for (int c = 0; c < kCases; ++c) {
    JetExpr e = g.expr(sys.ring, {"v", "w"}, 3, 3, true);
    CHECK(evolutionary_derivative(total_derivative(e), sys) == total_derivative(evolutionary_derivative(e, sys)));
  }
}

TEST_CASE("composition is associative when closed") {
  Gen g(8);
  auto r = Ring::make("x", {"u", "v"});
  int closed = 0;
  for (int c = 0; c < kCases; ++c) {
    PseudoOp a = g.local_op(r, {"u", "v"}), b = g.local_op(r, {"u", "v"}), d = g.local_op(r, {"u", "v"});
    if (c % 2 == 0) b += PseudoOp::tail_term(g.expr(r, {"u"}, 1, 1), g.expr(r, {"v"}, 1, 1));
    try {
      PseudoOp lhs = compose(compose(a, b), d), rhs = compose(a, compose(b, d));
      CHECK(lhs == rhs);
      ++closed;
    } catch (const NonClosedComposition&) {
    }
  }
  CHECK(closed >= kCases / 2);
}

TEST_CASE("adjoint reverses composition") {
  Gen g(9);
  auto r = Ring::make("x", {"u", "v"});
  for (int c = 0; c < kCases; ++c) {
    PseudoOp a = g.local_op(r, {"u", "v"}), b = g.local_op(r, {"u", "v"});
    if (c % 3 == 0) a += PseudoOp::tail_term(g.expr(r, {"u"}, 1, 1), g.expr(r, {"v"}, 1, 1));
    CHECK(adjoint(compose(a, b)) == compose(adjoint(b), adjoint(a)));
    CHECK(adjoint(adjoint(a)) == a);
  }
}

TEST_CASE("application agrees with composition") {
  Gen g(10);
  auto r = Ring::make("x", {"u", "v"});
  for (int c = 0; c < kCases; ++c) {
    PseudoOp a = g.local_op(r, {"u", "v"}, 3), b = g.local_op(r, {"u", "v"}, 3);
    JetExpr f = g.expr(r, {"u", "v"}, 3, 2, true);
    CHECK(compose(a, b).apply_local(f) == a.apply_local(b.apply_local(f)));
  }
}
