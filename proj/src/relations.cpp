#include "jetcheck/relations.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "jetcheck/calculus.hpp"

namespace jetcheck {

// ---- RelationSet -----------------------------------------------------------

namespace {

std::set<std::uint32_t> dependents_of(const JetExpr& e) {
  std::set<std::uint32_t> out;
  for (Var v : e.variables()) out.insert(v.index());
  return out;
}

}  // namespace

void RelationSet::add(Var lead, const JetExpr& replacement) {
  if (!ring_) ring_ = replacement.ring();
  if (lead.is_param()) throw InvalidRelation("rule lead must be a jet coordinate");
  if (rule_for(lead.index())) {
    throw InvalidRelation("dependent already has a rule: " + ring_->name_of(lead));
  }
  const JetExpr& repl = replacement;
  ring_ = unify(ring_, repl.ring());
  if (repl.max_order(lead.index()) >= lead.order()) {
    throw InvalidRelation("replacement contains its own lead or a higher derivative: " +
                          ring_->name_of(lead));
  }
  // Acyclicity: following dependents with rules from the new rule must never
  // reach the new lead again.
  std::vector<std::uint32_t> stack;
  std::set<std::uint32_t> seen;
  for (auto d : dependents_of(repl)) {
    if (d != lead.index()) stack.push_back(d);
  }
  while (!stack.empty()) {
    auto d = stack.back();
    stack.pop_back();
    if (!seen.insert(d).second) continue;
    if (d == lead.index()) throw InvalidRelation("cyclic relation set at " + ring_->name_of(lead));
    if (const Rule* r = rule_for(d)) {
      for (auto n : dependents_of(r->replacement)) {
        if (n != d) stack.push_back(n);
      }
    }
  }
  rules_.push_back({lead, repl});
}

RelationSet RelationSet::in_ring(const RingPtr& target) const {
  RelationSet out(target);
  for (const auto& r : rules_) out.rules_.push_back({r.lead, r.replacement.in_ring(target)});
  return out;
}

const Rule* RelationSet::rule_for(std::uint32_t dep) const {
  for (const auto& r : rules_) {
    if (r.lead.index() == dep) return &r;
  }
  return nullptr;
}

bool RelationSet::governs(Var v) const {
  if (v.is_param()) return false;
  const Rule* r = rule_for(v.index());
  return r && v.order() >= r->lead.order();
}

// ---- products of images ----------------------------------------------------

namespace {

template <class ImageFn, class Test>
JetExpr map_terms(const JetExpr& e, const RingPtr& target, ImageFn&& image, Test&& rewrites) {
  std::vector<Term> kept;
  JetExpr acc(target);
  for (const auto& t : e.terms()) {
    std::vector<Monomial::Factor> keep;
    std::vector<Monomial::Factor> change;
    for (const auto& f : t.mono.factors()) {
      (rewrites(f.first) ? change : keep).push_back(f);
    }
    if (change.empty()) {
      kept.push_back({Monomial(std::move(keep)), t.coeff});
      continue;
    }
    JetExpr prod = JetExpr::monomial(target, Monomial(std::move(keep)), t.coeff);
    for (const auto& [v, k] : change) {
      const JetExpr& img = image(v);
      prod = prod * img.pow(k);
    }
    acc += prod;
  }
  acc += JetExpr(target, std::move(kept));
  return acc;
}

}  // namespace

// ---- Reducer ---------------------------------------------------------------

Reducer::Reducer(RelationSet rels, int max_order)
    : rels_(std::move(rels)), max_order_(max_order), usage_(rels_.rules().size(), 0) {}

const JetExpr& Reducer::image(Var v) {
  if (auto it = memo_.find(v); it != memo_.end()) return it->second;
  if (v.order() > max_order_) {
    throw Error("derivative order exceeds the configured max_order during reduction");
  }
  const Rule* r = rels_.rule_for(v.index());
  usage_[static_cast<std::size_t>(r - rels_.rules().data())]++;
  JetExpr img = v.order() == r->lead.order()
                    ? reduce(r->replacement)
                    : reduce(total_derivative(image(v.shifted(-1))));
  return memo_.emplace(v, std::move(img)).first->second;
}

JetExpr Reducer::reduce(const JetExpr& e) {
  if (rels_.empty()) return e;
  bool any = false;
  for (const auto& t : e.terms()) {
    for (const auto& f : t.mono.factors()) {
      if (rels_.governs(f.first)) {
        any = true;
        break;
      }
    }
    if (any) break;
  }
  if (!any) return e;
  RingPtr ring = unify(e.ring(), rels_.ring());
  return map_terms(
      e, ring, [this](Var v) -> const JetExpr& { return image(v); },
      [this](Var v) { return rels_.governs(v); });
}

JetExpr reduce_modulo(const JetExpr& e, const RelationSet& rels) {
  Reducer r(rels);
  return r.reduce(e);
}

// ---- Substitution ----------------------------------------------------------

Substitution::Substitution(RingPtr source, RingPtr target)
    : source_(std::move(source)), target_(std::move(target)) {}

Substitution& Substitution::map(std::string_view dep, const JetExpr& image) {
  auto idx = source_->dependent_index(dep);
  base_[idx] = image.in_ring(target_);
  memo_.clear();
  return *this;
}

Substitution& Substitution::scale(const JetExpr& factor) {
  scale_ = factor.in_ring(target_);
  memo_.clear();
  return *this;
}

Substitution& Substitution::reduce_with(const RelationSet& rels) {
  reducer_.emplace(rels);
  memo_.clear();
  return *this;
}

const JetExpr& Substitution::image(Var v) {
  if (auto it = memo_.find(v); it != memo_.end()) return it->second;
  JetExpr img(target_);
  if (v.is_param()) {
    img = JetExpr::param(target_, source_->name_of(v));
  } else if (v.order() == 0) {
    if (auto it = base_.find(v.index()); it != base_.end()) {
      img = it->second;
    } else {
      img = JetExpr::jet(target_, source_->name_of(v), 0);
    }
  } else if (!scale_ && !base_.count(v.index())) {
    img = JetExpr::jet(target_, source_->name_of(v), v.order());
  } else {
    img = total_derivative(image(v.shifted(-1)));
    if (scale_) img = *scale_ * img;
  }
  if (reducer_) img = reducer_->reduce(img);
  return memo_.emplace(v, std::move(img)).first->second;
}

JetExpr Substitution::apply(const JetExpr& e) {
  if (e.ring() && e.ring() != source_ && !source_->descends_from(e.ring().get())) {
    throw ContextMismatch("substitution applied to an expression of another ring");
  }
  JetExpr out = map_terms(
      e, target_, [this](Var v) -> const JetExpr& { return image(v); },
      [](Var) { return true; });
  return out;
}

JetExpr substitute(const JetExpr& e, const RingPtr& target,
                   const std::vector<std::pair<std::string, JetExpr>>& rules,
                   const std::optional<JetExpr>& scale) {
  Substitution s(e.ring(), target);
  for (const auto& [name, img] : rules) s.map(name, img);
  if (scale) s.scale(*scale);
  return s.apply(e);
}

Rule solve_for(const JetExpr& eq, Var v) {
  std::vector<Term> with;
  std::vector<Term> without;
  for (const auto& t : eq.terms()) {
    int k = t.mono.exponent(v);
    if (k == 0) {
      without.push_back(t);
    } else if (k == 1) {
      with.push_back({t.mono.with_exponent(v, 0), t.coeff});
    } else {
      throw InvalidRelation("equation is not linear in " + eq.ring()->name_of(v));
    }
  }
  JetExpr coeff(eq.ring(), std::move(with));
  if (coeff.is_zero()) throw InvalidRelation("variable does not occur: " + eq.ring()->name_of(v));
  JetExpr rest(eq.ring(), std::move(without));
  return {v, -rest * coeff.inverse()};
}

// ---- numeric oracle --------------------------------------------------------

Rational Assignment::operator[](Var v) const {
  auto it = values.find(v);
  if (it == values.end()) throw Error("assignment misses a coordinate");
  return it->second;
}

Rational random_eval(const JetExpr& e, const Assignment& a) {
  Rational total = 0;
  for (const auto& t : e.terms()) {
    Rational v = t.coeff;
    for (const auto& [var, k] : t.mono.factors()) {
      Rational base = a[var];
      if (k < 0 && base == 0) throw DivisionByZero("zero base under a negative exponent");
      Rational p = 1;
      Rational b = k < 0 ? Rational(1 / base) : base;
      for (int i = 0; i < std::abs(k); ++i) p *= b;
      v *= p;
    }
    total += v;
  }
  total.canonicalize();
  return total;
}

AssignmentGenerator::AssignmentGenerator(std::uint64_t seed) : state_(seed) {}

std::uint64_t AssignmentGenerator::draw() {
  // One fresh engine per draw keyed by a counter keeps streams reproducible
  // independently of how many values earlier callers consumed per call.
  std::mt19937_64 eng(state_++);
  return eng();
}

Assignment AssignmentGenerator::next(const std::vector<Var>& vars) {
  Assignment a;
  for (Var v : vars) {
    std::uint64_t r = draw();
    long num = static_cast<long>(r % 18);
    num = num < 9 ? num - 9 : num - 8;  // -9..-1, 1..9
    long den = static_cast<long>((r / 18) % 7) + 1;
    Rational q(num, den);
    q.canonicalize();
    a.values[v] = q;
  }
  return a;
}

std::vector<Var> AssignmentGenerator::variables_of(const std::vector<JetExpr>& exprs) {
  std::set<Var> vs;
  for (const auto& e : exprs) {
    for (const auto& t : e.terms()) {
      for (const auto& f : t.mono.factors()) vs.insert(f.first);
    }
  }
  return {vs.begin(), vs.end()};
}

}  // namespace jetcheck
