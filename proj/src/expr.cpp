#include "jetcheck/expr.hpp"

#include <algorithm>
#include <functional>

namespace jetcheck {

// ---- Monomial --------------------------------------------------------------

Monomial::Monomial(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::sort(factors_.begin(), factors_.end(),
            [](const Factor& a, const Factor& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < factors_.size();) {
    Var v = factors_[i].first;
    int e = 0;
    while (i < factors_.size() && factors_[i].first == v) e += factors_[i++].second;
    if (e != 0) factors_[out++] = {v, e};
  }
  factors_.resize(out);
}

Monomial Monomial::of(Var v, int exponent) {
  Monomial m;
  if (exponent != 0) m.factors_.push_back({v, exponent});
  return m;
}

int Monomial::exponent(Var v) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                             [](const Factor& f, Var x) { return f.first < x; });
  return (it != factors_.end() && it->first == v) ? it->second : 0;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors_.reserve(a.factors_.size() + b.factors_.size());
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() && j != b.factors_.end()) {
    if (i->first < j->first) {
      out.factors_.push_back(*i++);
    } else if (j->first < i->first) {
      out.factors_.push_back(*j++);
    } else {
      int e = i->second + j->second;
      if (e != 0) out.factors_.push_back({i->first, e});
      ++i;
      ++j;
    }
  }
  out.factors_.insert(out.factors_.end(), i, a.factors_.end());
  out.factors_.insert(out.factors_.end(), j, b.factors_.end());
  return out;
}

Monomial Monomial::inverse() const { return pow(-1); }

Monomial Monomial::pow(int n) const {
  Monomial out;
  if (n == 0) return out;
  out.factors_ = factors_;
  for (auto& f : out.factors_) f.second *= n;
  return out;
}

Monomial Monomial::with_exponent(Var v, int exponent) const {
  std::vector<Factor> fs;
  fs.reserve(factors_.size() + 1);
  for (const auto& f : factors_) {
    if (f.first != v) fs.push_back(f);
  }
  if (exponent != 0) fs.push_back({v, exponent});
  return Monomial(std::move(fs));
}

Monomial Monomial::parameter_part() const {
  Monomial out;
  for (const auto& f : factors_) {
    if (f.first.is_param()) out.factors_.push_back(f);
  }
  return out;
}

Monomial Monomial::jet_part() const {
  Monomial out;
  for (const auto& f : factors_) {
    if (!f.first.is_param()) out.factors_.push_back(f);
  }
  return out;
}

bool Monomial::has_jets() const {
  return !factors_.empty() && !factors_.front().first.is_param();
}

Var Monomial::max_jet() const {
  Var best{};
  bool found = false;
  for (const auto& f : factors_) {
    if (!f.first.is_param()) {
      best = f.first;
      found = true;
    }
  }
  if (!found) throw Error("monomial has no jet variables");
  return best;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  const auto n = std::min(a.factors_.size(), b.factors_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.factors_[i].first <=> b.factors_[i].first; c != 0) return c;
    if (auto c = a.factors_[i].second <=> b.factors_[i].second; c != 0) return c;
  }
  return a.factors_.size() <=> b.factors_.size();
}

std::size_t Monomial::hash() const {
  std::size_t h = 1469598103934665603ull;
  for (const auto& f : factors_) {
    h ^= f.first.code + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(f.second) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

// ---- JetExpr ---------------------------------------------------------------

void normalize_terms(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.mono < b.mono; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    std::size_t j = i + 1;
    Rational c = terms[i].coeff;
    while (j < terms.size() && terms[j].mono == terms[i].mono) c += terms[j++].coeff;
    if (c != 0) {
      if (out != i) terms[out].mono = std::move(terms[i].mono);
      terms[out].coeff = c;
      ++out;
    }
    i = j;
  }
  terms.resize(out);
}

JetExpr::JetExpr(RingPtr ring, const Rational& c) : ring_(std::move(ring)) {
  if (c != 0) terms_.push_back({Monomial{}, c});
}

JetExpr::JetExpr(RingPtr ring, std::vector<Term> terms)
    : ring_(std::move(ring)), terms_(std::move(terms)) {
  normalize_terms(terms_);
}

JetExpr JetExpr::var(RingPtr ring, Var v, int exponent) {
  return monomial(std::move(ring), Monomial::of(v, exponent));
}

JetExpr JetExpr::jet(const RingPtr& ring, std::string_view name, int order, int exponent) {
  return var(ring, ring->jet(name, order), exponent);
}

JetExpr JetExpr::param(const RingPtr& ring, std::string_view name, int exponent) {
  return var(ring, ring->param(name), exponent);
}

JetExpr JetExpr::monomial(RingPtr ring, Monomial m, const Rational& c) {
  JetExpr e(std::move(ring));
  if (c != 0) e.terms_.push_back({std::move(m), c});
  return e;
}

bool JetExpr::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty());
}

bool JetExpr::has_jets() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.mono.has_jets(); });
}

Rational JetExpr::constant_term() const {
  if (!terms_.empty() && terms_[0].mono.empty()) return terms_[0].coeff;
  return 0;
}

JetExpr JetExpr::inverse() const {
  if (terms_.size() != 1) {
    throw NonMonomialInverse("cannot invert a non-monomial expression");
  }
  return monomial(ring_, terms_[0].mono.inverse(), 1 / terms_[0].coeff);
}

JetExpr JetExpr::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  JetExpr result(ring_, 1);
  JetExpr base = *this;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

JetExpr JetExpr::operator-() const {
  JetExpr e = *this;
  for (auto& t : e.terms_) t.coeff = -t.coeff;
  return e;
}

JetExpr add_scaled(const JetExpr& a, const JetExpr& b, const Rational& scale) {
  JetExpr out(unify(a.ring_, b.ring_));
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  while (i != a.terms_.end() || j != b.terms_.end()) {
    if (j == b.terms_.end() || (i != a.terms_.end() && i->mono < j->mono)) {
      out.terms_.push_back(*i++);
    } else if (i == a.terms_.end() || j->mono < i->mono) {
      out.terms_.push_back({j->mono, j->coeff * scale});
      ++j;
    } else {
      Rational c = i->coeff + j->coeff * scale;
      if (c != 0) out.terms_.push_back({i->mono, c});
      ++i;
      ++j;
    }
  }
  return out;
}

JetExpr& JetExpr::operator+=(const JetExpr& o) {
  if (o.terms_.empty()) {
    ring_ = unify(ring_, o.ring_);
    return *this;
  }
  *this = add_scaled(*this, o, 1);
  return *this;
}

JetExpr& JetExpr::operator-=(const JetExpr& o) {
  *this = add_scaled(*this, o, -1);
  return *this;
}

JetExpr operator*(const JetExpr& a, const JetExpr& b) {
  RingPtr ring = unify(a.ring_, b.ring_);
  if (a.terms_.empty() || b.terms_.empty()) return JetExpr(ring);
  std::vector<Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) out.push_back({x.mono * y.mono, x.coeff * y.coeff});
  }
  return JetExpr(ring, std::move(out));
}

JetExpr& JetExpr::operator*=(const JetExpr& o) {
  *this = *this * o;
  return *this;
}

JetExpr operator*(const Rational& c, const JetExpr& a) {
  if (c == 0) return JetExpr(a.ring_);
  JetExpr e = a;
  for (auto& t : e.terms_) t.coeff *= c;
  return e;
}

bool operator==(const JetExpr& a, const JetExpr& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coeff != b.terms_[i].coeff) {
      return false;
    }
  }
  return true;
}

std::vector<std::pair<int, JetExpr>> JetExpr::split_by_param(Var p) const {
  std::vector<std::pair<int, std::vector<Term>>> buckets;
  for (const auto& t : terms_) {
    int e = t.mono.exponent(p);
    auto it = std::find_if(buckets.begin(), buckets.end(), [e](const auto& b) { return b.first == e; });
    if (it == buckets.end()) {
      buckets.push_back({e, {}});
      it = buckets.end() - 1;
    }
    it->second.push_back({t.mono.with_exponent(p, 0), t.coeff});
  }
  std::sort(buckets.begin(), buckets.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, JetExpr>> out;
  for (auto& [e, ts] : buckets) out.push_back({e, JetExpr(ring_, std::move(ts))});
  return out;
}

std::vector<Var> JetExpr::variables() const {
  std::vector<Var> vs;
  for (const auto& t : terms_) {
    for (const auto& f : t.mono.factors()) {
      if (!f.first.is_param()) vs.push_back(f.first);
    }
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

bool JetExpr::contains_dependent(std::uint32_t index) const { return max_order(index) >= 0; }

int JetExpr::max_order(std::uint32_t index) const {
  int best = -1;
  for (const auto& t : terms_) {
    for (const auto& f : t.mono.factors()) {
      if (!f.first.is_param() && f.first.index() == index) best = std::max(best, f.first.order());
    }
  }
  return best;
}

JetExpr JetExpr::in_ring(const RingPtr& target) const {
  if (ring_ && !target->descends_from(ring_.get())) {
    throw ContextMismatch("target ring does not extend the expression's ring");
  }
  JetExpr e = *this;
  e.ring_ = target;
  return e;
}

std::size_t JetExpr::hash() const {
  std::size_t h = 0;
  std::hash<std::string> hs;
  for (const auto& t : terms_) {
    h = h * 1000003u ^ t.mono.hash();
    h = h * 1000003u ^ hs(t.coeff.get_str());
  }
  return h;
}

std::string rational_to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

}  // namespace jetcheck
