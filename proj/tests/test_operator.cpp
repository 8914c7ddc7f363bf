#include "doctest.h"
#include "jetcheck/calculus.hpp"
#include "jetcheck/operator.hpp"

using namespace jetcheck;

namespace {
RingPtr ring_u() { return Ring::make("y", {"u", "v"}); }
JetExpr J(const RingPtr& r, const char* n, int k = 0, int e = 1) { return JetExpr::jet(r, n, k, e); }
}  // namespace

TEST_CASE("dinv after u d") {
  auto r = ring_u();
  auto u = J(r, "u");
  auto lhs = compose(PseudoOp::dinv(r), compose(PseudoOp::function(u), PseudoOp::d(r)));
  auto rhs = PseudoOp::function(u) - PseudoOp::tail_term(JetExpr(r, 1), J(r, "u", 1));
  CHECK(lhs == rhs);
}

TEST_CASE("adjoint of u dinv v") {
  auto r = ring_u();
  auto a = PseudoOp::tail_term(J(r, "u"), J(r, "v"));
  CHECK(adjoint(a) == PseudoOp::tail_term(-J(r, "v"), J(r, "u")));
  CHECK(adjoint(adjoint(a)) == a);
}

TEST_CASE("d o dinv is identity") {
  auto r = ring_u();
  auto one = PseudoOp::constant(r, 1);
  CHECK(compose(PseudoOp::d(r), PseudoOp::dinv(r)) == one);
  CHECK(compose(PseudoOp::dinv(r), PseudoOp::d(r)) == one);
}

TEST_CASE("right divide") {
  auto r = ring_u();
  auto f = PseudoOp::d(r, 2) + PseudoOp::function(J(r, "u"));
  auto x = PseudoOp::d(r) + PseudoOp::function(J(r, "v"));
  auto q = right_divide(compose(x, f), f);
  REQUIRE(q);
  CHECK(*q == x);
  auto p = left_divide(compose(f, x), f);
  REQUIRE(p);
  CHECK(*p == x);
}

#include "jetcheck/dsl.hpp"
#include "jetcheck/nonlocal.hpp"
#include "jetcheck/optext.hpp"

TEST_CASE("dsl parses operators and jets") {
  auto r = ring_u();
  DslEnv env{r, {}, {}, nullptr};
  auto op = parse_operator("d*u - u*d", env);
  CHECK(op.at(0, 0) == PseudoOp::function(J(r, "u", 1)));
  CHECK(parse_function("u_yy/u^2 + 1/2", env) == J(r, "u", 2) * J(r, "u", 0, -2) + JetExpr(r, Rational(1, 2)));
}

TEST_CASE("operator text round trip") {
  auto r = ring_u();
  DslEnv env{r, {}, {}, nullptr};
  auto m = parse_operator("[d^2 + u*dinv*v, 3/4; v_y*d, dinv]", env);
  CHECK(parse_matrix_op(to_text(m), r) == m);
}

TEST_CASE("apply dinv") {
  auto r = ring_u();
  NonlocalContext ctx(r);
  auto u = J(r, "u");
  CHECK(ctx.integrate(u * J(r, "u", 1)) == Rational(1, 2) * u * u);
  auto rho = ctx.integrate(J(r, "u", 1) * J(r, "u", 1));
  CHECK(ctx.auxiliaries().size() == 1);
  CHECK(ctx.reduce(total_derivative(rho)) == J(r, "u", 1) * J(r, "u", 1));
}

TEST_CASE("identity ladder d o dinv") {
  auto r = ring_u();
  auto lhs = std::vector<MatrixOp>{MatrixOp::scalar(PseudoOp::d(r)), MatrixOp::scalar(PseudoOp::dinv(r))};
  auto rhs = std::vector<MatrixOp>{MatrixOp::scalar(PseudoOp::constant(r, 1))};
  auto out = verify_operator_identity(lhs, rhs);
  CHECK(out.verdict == Verdict::Pass);
}
