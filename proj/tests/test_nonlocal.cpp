#include <random>

#include "doctest.h"
#include "jetcheck/calculus.hpp"
#include "jetcheck/nonlocal.hpp"

using namespace jetcheck;

namespace {
JetExpr J(const RingPtr& r, const char* n, int k = 0, int e = 1) { return JetExpr::jet(r, n, k, e); }
}  // namespace

TEST_CASE("integral of u_x^2 is opaque and nonzero") {
  auto r = Ring::make("x", {"u"});
  NonlocalContext ctx(r);
  JetExpr u1 = J(r, "u", 1);
  JetExpr rho = ctx.integrate(u1 * u1);
  CHECK(ctx.has_opaque(rho));
  CHECK(ctx.reduce(total_derivative(rho) - u1 * u1).is_zero());
  CHECK(ctx.provably_nonzero(rho));
  CHECK(ctx.provably_nonzero(rho + JetExpr(rho.ring(), 3)));
  CHECK(ctx.provably_nonzero(2 * rho - J(rho.ring(), "u")));
  // The same integral is shared, so the difference is an exact zero.
  CHECK(ctx.reduce(ctx.integrate(u1 * u1) - rho).is_zero());
  CHECK_FALSE(ctx.provably_nonzero(rho - rho));
}

TEST_CASE("exact integrands stay local") {
  auto r = Ring::make("x", {"u"});
  NonlocalContext ctx(r);
  JetExpr e = J(r, "u") * J(r, "u", 2) + J(r, "u", 1) * J(r, "u", 1);
  JetExpr f = ctx.integrate(e);
  CHECK_FALSE(ctx.has_opaque(f));
  CHECK(f == J(f.ring(), "u") * J(f.ring(), "u", 1));
}

TEST_CASE("provably_nonzero never flags a true zero") {
  std::mt19937_64 rng(12);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int c = 0; c < 200; ++c) {
    auto r = Ring::make("x", {"u"});
    NonlocalContext ctx(r);
    std::vector<JetExpr> X = ctx.test_vector(2);
    const RingPtr& R = ctx.ring();
    JetExpr m = JetExpr(R, pick(1, 4)) * J(R, "u", pick(0, 2), pick(1, 2));
    JetExpr g = m * total_derivative(X[pick(0, 1)], pick(0, 2)) + JetExpr(R, pick(-3, 3)) * X[1];
    JetExpr rho = ctx.integrate(g);
    // D^{-1} D f = f and D D^{-1} g = g, written as residuals that must vanish.
    JetExpr f = m * X[0];
    JetExpr zero1 = ctx.reduce(ctx.integrate(total_derivative(f)) - f);
    JetExpr zero2 = ctx.reduce(total_derivative(rho) - g);
    JetExpr zero3 = ctx.reduce(pick(1, 5) * (rho - ctx.integrate(g)));
    CHECK(zero1.is_zero());
    CHECK(zero2.is_zero());
    CHECK(zero3.is_zero());
    CHECK_FALSE(ctx.provably_nonzero(zero1));
    CHECK_FALSE(ctx.provably_nonzero(zero2));
    CHECK_FALSE(ctx.provably_nonzero(zero3));
  }
}

TEST_CASE("independent integrals of a test vector") {
  auto r = Ring::make("x", {"u"});
  NonlocalContext ctx(r);
  std::vector<JetExpr> X = ctx.test_vector(1);
  const RingPtr& R = ctx.ring();
  JetExpr a = ctx.integrate(J(R, "u") * X[0]);
  JetExpr b = ctx.integrate(J(R, "u", 0, 2) * X[0]);
  CHECK(ctx.provably_nonzero(a - b));
  CHECK(ctx.provably_nonzero(a));
  CHECK_FALSE(ctx.provably_nonzero(ctx.reduce(a - ctx.integrate(J(R, "u") * X[0]))));
}
