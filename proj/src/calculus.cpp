#include "jetcheck/calculus.hpp"

#include <algorithm>

namespace jetcheck {

JetExpr total_derivative(const JetExpr& e) {
  std::vector<Term> out;
  for (const auto& t : e.terms()) {
    for (const auto& [v, k] : t.mono.factors()) {
      if (v.is_param()) continue;
      if (v.order() >= Var::kMaxOrder) throw Error("derivative order overflow");
      // d/dy v^k = k v^(k-1) v'
      Monomial step(std::vector<Monomial::Factor>{{v, -1}, {v.shifted(1), 1}});
      out.push_back({t.mono * step, t.coeff * k});
    }
  }
  return JetExpr(e.ring(), std::move(out));
}

JetExpr total_derivative(const JetExpr& e, int n) {
  JetExpr r = e;
  for (int i = 0; i < n; ++i) r = total_derivative(r);
  return r;
}

JetExpr partial(const JetExpr& e, Var v) {
  std::vector<Term> out;
  for (const auto& t : e.terms()) {
    int k = t.mono.exponent(v);
    if (k == 0) continue;
    out.push_back({t.mono.with_exponent(v, k - 1), t.coeff * k});
  }
  return JetExpr(e.ring(), std::move(out));
}

JetExpr euler_derivative(const JetExpr& e, std::uint32_t dep) {
  int top = e.max_order(dep);
  JetExpr acc(e.ring());
  // Horner form: P_0 - D(P_1 - D(P_2 - ...)).
  for (int k = top; k >= 0; --k) {
    acc = partial(e, Var::dependent(dep, k)) - total_derivative(acc);
  }
  return acc;
}

JetExpr euler_derivative(const JetExpr& e, std::string_view dep) {
  return euler_derivative(e, e.ring()->dependent_index(dep));
}

std::vector<JetExpr> frechet_coeffs(const JetExpr& e, std::uint32_t dep) {
  int top = e.max_order(dep);
  std::vector<JetExpr> out;
  for (int k = 0; k <= top; ++k) out.push_back(partial(e, Var::dependent(dep, k)));
  return out;
}

namespace {

// Highest jet of positive order among all terms, or nullopt.
std::optional<Var> top_jet(const JetExpr& e) {
  std::optional<Var> best;
  for (const auto& t : e.terms()) {
    for (const auto& f : t.mono.factors()) {
      Var v = f.first;
      if (v.is_param() || v.order() == 0) continue;
      if (!best || v.order() > best->order() ||
          (v.order() == best->order() && v.index() > best->index())) {
        best = v;
      }
    }
  }
  return best;
}

}  // namespace

JetExpr antiderivative(const JetExpr& e) {
  JetExpr rest = e;
  JetExpr result(e.ring());
  // Each step removes one top jet; the bound guards against non-exact input.
  std::size_t guard = 0;
  const std::size_t limit = 64 * (e.size() + 4);
  while (!rest.is_zero()) {
    if (++guard > limit) throw NotIntegrable("antiderivative did not terminate");
    auto top = top_jet(rest);
    if (!top) throw NotIntegrable("expression has a jet-free or order-zero remainder");
    Var v = *top;
    Var lower = v.shifted(-1);
    std::vector<Term> prim;
    for (const auto& t : rest.terms()) {
      int k = t.mono.exponent(v);
      if (k == 0) continue;
      if (k != 1) throw NotIntegrable("top jet occurs nonlinearly");
      Monomial m = t.mono.with_exponent(v, 0);
      int a = m.exponent(lower);
      if (a == -1) throw NotIntegrable("logarithmic primitive");
      prim.push_back({m.with_exponent(lower, a + 1), t.coeff / (a + 1)});
    }
    JetExpr f(e.ring(), std::move(prim));
    result += f;
    rest -= total_derivative(f);
  }
  return result;
}

bool is_total_derivative(const JetExpr& e) {
  if (e.is_zero()) return true;
  try {
    antiderivative(e);
    return true;
  } catch (const NotIntegrable&) {
    return false;
  }
}

}  // namespace jetcheck
