#include "doctest.h"
#include "jetcheck/calculus.hpp"
#include "jetcheck/relations.hpp"
#include "jetcheck/serialize.hpp"

using namespace jetcheck;

namespace {
RingPtr ring_u() { return Ring::make("y", {"u", "s"}); }
JetExpr J(const RingPtr& r, const char* n, int k = 0, int e = 1) { return JetExpr::jet(r, n, k, e); }
}  // namespace

TEST_CASE("derivative of inverse") {
  auto r = ring_u();
  auto u = J(r, "u");
  CHECK(total_derivative(u.inverse()) == -J(r, "u", 1) * J(r, "u", 0, -2));
}

TEST_CASE("antiderivative of q_xxx r + q_xx r_x") {
  auto r = Ring::make("x", {"q", "r"});
  auto e = J(r, "q", 3) * J(r, "r") + J(r, "q", 2) * J(r, "r", 1);
  auto f = antiderivative(e);
  CHECK(f == J(r, "q", 2) * J(r, "r"));
  CHECK(total_derivative(f) == e);
}

TEST_CASE("log derivative is rejected") {
  auto r = ring_u();
  CHECK_FALSE(is_total_derivative(J(r, "u", 1) / J(r, "u")));
  CHECK(euler_derivative(J(r, "u", 1) / J(r, "u"), "u").is_zero());
}

TEST_CASE("prefix round trip") {
  auto r = ring_u();
  auto e = Rational(3, 4) * J(r, "u", 2) * J(r, "s", 0, -1) + JetExpr::param(r, "lambda", -2) - JetExpr(r, 5);
  CHECK(parse_prefix(to_prefix(e), r) == e);
}
