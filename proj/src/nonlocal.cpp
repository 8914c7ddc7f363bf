#include "jetcheck/nonlocal.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "jetcheck/calculus.hpp"
#include "jetcheck/optext.hpp"
#include "jetcheck/serialize.hpp"

namespace jetcheck {

namespace {

int weight(const Monomial& m) {
  int w = 0;
  for (const auto& [v, k] : m.factors()) {
    if (!v.is_param()) w += v.order() * k;
  }
  return w;
}

using DegreeVector = std::vector<std::pair<std::uint32_t, int>>;

DegreeVector degrees(const Monomial& m) {
  std::map<std::uint32_t, int> d;
  for (const auto& [v, k] : m.factors()) {
    if (!v.is_param()) d[v.index()] += k;
  }
  return {d.begin(), d.end()};
}

bool polynomial(const Monomial& m) {
  return std::all_of(m.factors().begin(), m.factors().end(),
                     [](const Monomial::Factor& f) { return f.second > 0; });
}

// Nondecreasing order sequences for each dependent, total weight fixed.
void enumerate(const DegreeVector& deg, std::size_t pos, int remaining, int min_order, int left,
               std::vector<Monomial::Factor>& acc, std::vector<Monomial>& out, std::size_t cap) {
  if (out.size() > cap) return;
  if (pos == deg.size()) {
    if (remaining == 0) out.emplace_back(acc);
    return;
  }
  if (left == 0) {
    std::size_t next = pos + 1;
    int next_left = next < deg.size() ? deg[next].second : 0;
    enumerate(deg, next, remaining, 0, next_left, acc, out, cap);
    return;
  }
  for (int o = min_order; o * left <= remaining; ++o) {
    acc.push_back({Var::dependent(deg[pos].first, o), 1});
    enumerate(deg, pos, remaining - o, o, left - 1, acc, out, cap);
    acc.pop_back();
  }
}

// Gaussian elimination over the rationals; rows are equations [A | b].
std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> m,
                                                  std::size_t unknowns) {
  std::size_t rows = m.size();
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < unknowns && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    Rational inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t k = c; k <= unknowns; ++k) m[i][k] -= f * m[r][k];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i) {
    if (m[i][unknowns] != 0) return std::nullopt;
  }
  std::vector<Rational> x(unknowns, 0);
  for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = m[i][unknowns];
  return x;
}

// Laplace expansion; the matrices here are at most 4 x 4.
JetExpr determinant(const std::vector<std::vector<JetExpr>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  JetExpr out(m[0][0].ring());
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c].is_zero()) continue;
    std::vector<std::vector<JetExpr>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<JetExpr> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(std::move(row));
    }
    JetExpr term = m[0][c] * determinant(minor);
    out += c % 2 == 0 ? term : -term;
  }
  return out;
}

// Rank test for rational row vectors keyed by (dependent, monomial).
bool rows_independent(const std::vector<std::map<std::pair<std::uint32_t, Monomial>, Rational>>& rows) {
  std::map<std::pair<std::uint32_t, Monomial>, std::size_t> col;
  for (const auto& r : rows) {
    for (const auto& [k, v] : r) col.emplace(k, col.size());
  }
  std::vector<std::vector<Rational>> m(rows.size(), std::vector<Rational>(col.size() + 1, 0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [k, v] : rows[i]) m[i][col.at(k)] = v;
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < col.size() && rank < m.size(); ++c) {
    std::size_t p = rank;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[rank]);
    for (std::size_t i = rank + 1; i < m.size(); ++i) {
      if (m[i][c] == 0) continue;
      Rational f = m[i][c] / m[rank][c];
      for (std::size_t k = c; k < col.size(); ++k) m[i][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank == rows.size();
}

// Monic form: divide by the rational and parameter factor of the leading term.
JetExpr scaled(const JetExpr& e, JetExpr* c) {
  const Term& lead = e.terms().back();
  *c = JetExpr::monomial(e.ring(), lead.mono.parameter_part(), lead.coeff);
  return e * c->inverse();
}

}  // namespace

NonlocalContext::NonlocalContext(RingPtr base, RelationSet rels, InverseRegistry* reg,
                                 int max_order)
    : ring_(std::move(base)), rels_(std::move(rels)), reg_(reg), max_order_(max_order) {
  if (rels_.ring()) ring_ = unify(ring_, rels_.ring());
  rels_ = rels_.in_ring(ring_);
  usage_carry_.assign(rels_.rules().size(), 0);
}

Reducer& NonlocalContext::reducer() {
  if (!reducer_) reducer_.emplace(rels_, max_order_);
  return *reducer_;
}

std::vector<std::size_t> NonlocalContext::usage() {
  std::vector<std::size_t> u = usage_carry_;
  u.resize(rels_.rules().size(), 0);
  if (reducer_) {
    const auto& cur = reducer_->usage();
    for (std::size_t k = 0; k < cur.size(); ++k) u[k] += cur[k];
  }
  return u;
}

void NonlocalContext::add_relation(Var lead, const JetExpr& replacement) {
  usage_carry_ = usage();
  rels_.add(lead, replacement.in_ring(ring_));
  usage_carry_.resize(rels_.rules().size(), 0);
  reducer_.reset();
}

std::vector<JetExpr> NonlocalContext::test_vector(std::size_t n, const std::string& prefix) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) names.push_back(prefix + std::to_string(k));
  ring_ = Ring::extend(ring_, names);
  rels_ = rels_.in_ring(ring_);
  reducer_.reset();
  usage_carry_ = usage();
  std::vector<JetExpr> out;
  for (const auto& nm : names) {
    generic_[ring_->dependent_index(nm)] = AuxKind::Canonical;
    out.push_back(JetExpr::jet(ring_, nm));
  }
  // Test vectors are generic but not auxiliaries; mark them apart.
  for (const auto& nm : names) test_vectors_.insert(ring_->dependent_index(nm));
  return out;
}

bool NonlocalContext::is_generic(std::uint32_t dep) const { return generic_.count(dep) != 0; }

Var NonlocalContext::new_aux(const std::string& stem, AuxKind kind, int order,
                             const JetExpr& definition) {
  std::string name = stem + std::to_string(++counter_);
  while (ring_->find_dependent(name)) name = stem + std::to_string(++counter_);
  usage_carry_ = usage();
  ring_ = Ring::extend(ring_, {name});
  rels_ = rels_.in_ring(ring_);
  Var lead = ring_->jet(name, order);
  rels_.add(lead, definition.in_ring(ring_));
  usage_carry_.resize(rels_.rules().size(), 0);
  reducer_.reset();
  generic_[lead.index()] = kind;
  aux_.push_back({name, kind, lead, definition.in_ring(ring_), ""});
  return lead;
}

JetExpr NonlocalContext::reduce(const JetExpr& e) {
  JetExpr x = e.ring() ? e.in_ring(unify(e.ring(), ring_)) : e;
  return reducer().reduce(x);
}

bool NonlocalContext::has_opaque(const JetExpr& e) const {
  for (Var v : e.variables()) {
    if (v.is_param()) continue;
    auto it = generic_.find(v.index());
    if (it != generic_.end() && it->second != AuxKind::Canonical) return true;
  }
  return false;
}

bool NonlocalContext::integrals_independent(const JetExpr& r) const {
  // Integrals whose primitives are linearly independent modulo total
  // derivatives are algebraically independent over the local functions, so a
  // nonzero reduced polynomial in them cannot vanish. Iterated integrals are
  // covered when every first-level primitive is linear in the test vectors
  // and every higher primitive is a rational combination of lower integrals.
  // No constraints or parameters.
  for (const auto& rule : rels_.rules()) {
    if (!generic_.count(rule.lead.index()) || test_vectors_.count(rule.lead.index())) return false;
  }
  auto is_aux = [&](std::uint32_t d) { return generic_.count(d) && !test_vectors_.count(d); };
  auto find = [&](std::uint32_t d) -> const Aux* {
    for (const auto& x : aux_) {
      if (x.lead.index() == d) return &x;
    }
    return nullptr;
  };

  std::map<std::uint32_t, int> level;
  std::vector<std::uint32_t> todo;
  for (Var v : r.variables()) {
    if (v.is_param()) return false;
    if (is_aux(v.index())) todo.push_back(v.index());
  }
  std::function<int(std::uint32_t)> level_of = [&](std::uint32_t d) -> int {
    if (auto it = level.find(d); it != level.end()) return it->second;
    const Aux* a = find(d);
    if (!a || !a->atom.empty() || a->lead.order() != 1) return -1;
    int l = 1;
    for (Var v : a->definition.variables()) {
      if (v.is_param()) return -1;
      if (!is_aux(v.index())) continue;
      int k = level_of(v.index());
      if (k < 0) return -1;
      l = std::max(l, k + 1);
    }
    level[d] = l;
    return l;
  };
  int top = 1;
  for (std::uint32_t d : todo) {
    int l = level_of(d);
    if (l < 0) return false;
    top = std::max(top, l);
  }

  // First-level rows are Euler images; higher rows are coefficient vectors
  // over the lower integrals. The column sets are disjoint.
  using Row = std::map<std::pair<std::uint32_t, Monomial>, Rational>;
  std::vector<Row> rows;
  for (const auto& [d, l] : level) {
    JetExpr f = find(d)->definition.in_ring(ring_);
    Row row;
    if (l == 1) {
      for (std::uint32_t k = 0; k < ring_->dependents().size(); ++k) {
        JetExpr ed = euler_derivative(f, k);
        for (const auto& t : ed.terms()) row[{k, t.mono}] = t.coeff;
      }
      // A total derivative vanishes where all derivatives do; the Euler
      // operator misses that part.
      const auto at_rest = static_cast<std::uint32_t>(ring_->dependents().size());
      for (const auto& t : f.terms()) {
        bool rest = true;
        for (const auto& [v, k] : t.mono.factors()) rest = rest && v.order() == 0;
        if (rest) row[{at_rest, t.mono}] = t.coeff;
      }
      if (top > 1) {
        for (const auto& t : f.terms()) {
          int deg = 0;
          for (const auto& [v, k] : t.mono.factors()) {
            if (test_vectors_.count(v.index())) deg += k;
          }
          if (deg != 1) return false;
        }
      }
    } else {
      for (const auto& t : f.terms()) {
        const auto& fs = t.mono.factors();
        if (fs.size() != 1 || fs[0].second != 1 || fs[0].first.order() != 0 || !is_aux(fs[0].first.index())) {
          return false;
        }
        row[{fs[0].first.index(), Monomial()}] = t.coeff;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows_independent(rows);
}

bool NonlocalContext::provably_nonzero(const JetExpr& e) {
  JetExpr r = reduce(e);
  if (r.is_zero()) return false;
  std::optional<std::uint32_t> dep;
  bool several = false;
  for (Var v : r.variables()) {
    if (v.is_param()) continue;
    auto it = generic_.find(v.index());
    if (it == generic_.end() || it->second == AuxKind::Canonical) continue;
    several = several || (dep && *dep != v.index());
    dep = v.index();
  }
  if (several) return integrals_independent(r);
  if (!dep) return true;
  if (integrals_independent(r)) return true;
  const Aux* a = nullptr;
  for (const auto& x : aux_) {
    if (x.lead.index() == *dep) a = &x;
  }
  if (!a) return false;

  // If r vanished, so would D^i r for every i. With a^(n) eliminated by its
  // rule each is affine in a, ..., a^(n-1); the system is inconsistent when
  // some maximal minor of the augmented matrix exceeds the unknowns' rank.
  const int n = a->lead.order();
  std::vector<std::vector<JetExpr>> m;
  JetExpr ri = r;
  for (int i = 0; i <= n + 1; ++i) {
    std::vector<std::vector<Term>> parts(static_cast<std::size_t>(n) + 1);
    for (const auto& t : ri.terms()) {
      int deg = 0;
      Var hit{};
      for (const auto& [v, k] : t.mono.factors()) {
        if (!v.is_param() && v.index() == *dep) {
          deg += k;
          hit = v;
        }
      }
      if (deg == 0) {
        parts[static_cast<std::size_t>(n)].push_back(t);
      } else if (deg == 1 && hit.order() < n) {
        parts[static_cast<std::size_t>(hit.order())].push_back({t.mono.with_exponent(hit, 0), t.coeff});
      } else {
        return false;
      }
    }
    std::vector<JetExpr> row;
    for (auto& p : parts) row.emplace_back(ring_, std::move(p));
    m.push_back(std::move(row));
    if (i <= n) ri = reduce(total_derivative(ri));
  }
  // Unknowns that never occur drop out.
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
    if (std::any_of(m.begin(), m.end(), [&](const auto& row) { return !row[j].is_zero(); })) cols.push_back(j);
  }
  cols.push_back(static_cast<std::size_t>(n));
  const std::size_t k = cols.size();
  std::vector<std::size_t> pick(k);
  // Row subsets of size k in lexicographic order.
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<JetExpr>> sq;
    for (std::size_t i : pick) {
      std::vector<JetExpr> row;
      for (std::size_t j : cols) row.push_back(m[i][j]);
      sq.push_back(std::move(row));
    }
    if (!reduce(determinant(sq)).is_zero()) return true;
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == m.size() - k + i - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

JetExpr NonlocalContext::opaque(const JetExpr& e) {
  JetExpr c;
  JetExpr monic = scaled(e, &c);
  std::string key = to_prefix(monic);
  auto it = opaque_.find(key);
  Var lead;
  if (it == opaque_.end()) {
    lead = new_aux("rho", AuxKind::Opaque, 1, monic);
    opaque_.emplace(key, lead.index());
  } else {
    lead = Var::dependent(it->second, 1);
  }
  return c * JetExpr::var(ring_, lead.shifted(-1));
}

JetExpr NonlocalContext::integrate_linear(std::uint32_t g, std::vector<JetExpr> c) {
  JetExpr out(ring_);
  for (std::size_t n = c.size(); n-- > 1;) {
    if (c[n].is_zero()) continue;
    out += c[n] * JetExpr::var(ring_, Var::dependent(g, static_cast<int>(n) - 1));
    c[n - 1] = reduce(c[n - 1] - total_derivative(c[n]));
  }
  const JetExpr a = c.empty() ? JetExpr(ring_) : c[0];
  if (a.is_zero()) return out;
  JetExpr gv = JetExpr::var(ring_, Var::dependent(g, 0));
  if (test_vectors_.count(g)) {
    for (const auto& t : a.terms()) {
      Monomial m = t.mono.jet_part();
      auto key = std::make_pair(m, g);
      auto it = canonical_.find(key);
      Var lead;
      if (it == canonical_.end()) {
        lead = new_aux("rho", AuxKind::Canonical, 1, JetExpr::monomial(ring_, m) * gv);
        canonical_.emplace(key, lead.index());
      } else {
        lead = Var::dependent(it->second, 1);
      }
      out += JetExpr::monomial(ring_, t.mono.parameter_part(), t.coeff) *
             JetExpr::var(ring_, lead.shifted(-1));
    }
    return out;
  }
  AuxKind kind = generic_.at(g);
  const Rule* rule = rels_.rule_for(g);
  if (kind != AuxKind::Inverse && rule && rule->lead.order() == 1) {
    try {
      JetExpr big_a = antiderivative(a);
      // a rho = D(A rho) - A rho_y
      out += big_a * gv;
      out -= integrate(big_a * rule->replacement);
      return out;
    } catch (const NotIntegrable&) {
    }
  }
  out += opaque(a * gv);
  return out;
}

void NonlocalContext::assume_primitive(const JetExpr& arg, const JetExpr& primitive) {
  JetExpr e = reduce(arg);
  if (e.is_zero()) throw Error("primitive declared for a vanishing integrand");
  JetExpr c;
  JetExpr monic = scaled(e, &c);
  primitives_[to_prefix(monic)] = reduce(primitive) * c.inverse();
}

JetExpr NonlocalContext::integrate(const JetExpr& arg) {
  JetExpr e = reduce(arg);
  if (e.is_zero()) return e;
  if (!primitives_.empty()) {
    JetExpr c;
    JetExpr monic = scaled(e, &c);
    if (auto it = primitives_.find(to_prefix(monic)); it != primitives_.end()) {
      return reduce(c * it->second.in_ring(ring_));
    }
  }
  std::vector<Term> base;
  std::map<std::uint32_t, std::vector<JetExpr>> lin;
  bool nonlinear = false;
  for (const auto& t : e.terms()) {
    int deg = 0;
    Var gvar{};
    for (const auto& [v, k] : t.mono.factors()) {
      if (!v.is_param() && is_generic(v.index())) {
        deg += k;
        gvar = v;
        if (k != 1) deg += 100;
      }
    }
    if (deg == 0) {
      base.push_back(t);
    } else if (deg == 1) {
      auto& cs = lin[gvar.index()];
      std::size_t n = static_cast<std::size_t>(gvar.order());
      if (cs.size() <= n) cs.resize(n + 1, JetExpr(ring_));
      cs[n] += JetExpr::monomial(ring_, t.mono.with_exponent(gvar, 0), t.coeff);
    } else {
      nonlinear = true;
    }
  }
  if (nonlinear) return opaque(e);
  JetExpr out(ring_);
  if (!base.empty()) {
    JetExpr b(ring_, std::move(base));
    try {
      out += antiderivative(b);
    } catch (const NotIntegrable&) {
      out += opaque(b);
    }
  }
  for (auto& [g, cs] : lin) out += integrate_linear(g, std::move(cs));
  return reduce(out);
}

std::optional<JetExpr> NonlocalContext::preimage(const PseudoOp& f, const JetExpr& arg) {
  for (const auto& c : f.local()) {
    if (!c.is_zero() && !c.is_constant()) return std::nullopt;
  }
  std::map<std::pair<Monomial, DegreeVector>, std::vector<Term>> groups;
  for (const auto& t : arg.terms()) {
    if (!polynomial(t.mono)) return std::nullopt;
    groups[{t.mono.parameter_part(), degrees(t.mono.jet_part())}].push_back(t);
  }
  JetExpr result(ring_);
  for (const auto& [key, terms] : groups) {
    const auto& [param, deg] = key;
    if (deg.empty()) return std::nullopt;
    std::set<int> cand_weights;
    for (const auto& t : terms) {
      int w = weight(t.mono);
      for (std::size_t k = 0; k < f.local().size(); ++k) {
        if (!f.local()[k].is_zero() && w >= static_cast<int>(k)) cand_weights.insert(w - static_cast<int>(k));
      }
    }
    std::vector<Monomial> cands;
    for (int w : cand_weights) {
      std::vector<Monomial::Factor> acc;
      enumerate(deg, 0, w, 0, deg[0].second, acc, cands, 600);
    }
    if (cands.empty() || cands.size() > 600) return std::nullopt;
    std::vector<JetExpr> images;
    std::map<Monomial, std::size_t> row_of;
    for (const auto& m : cands) {
      images.push_back(f.apply_local(JetExpr::monomial(ring_, m)));
      for (const auto& t : images.back().terms()) row_of.try_emplace(t.mono, row_of.size());
    }
    for (const auto& t : terms) row_of.try_emplace(t.mono.jet_part(), row_of.size());
    std::vector<std::vector<Rational>> mat(row_of.size(), std::vector<Rational>(cands.size() + 1, 0));
    for (std::size_t c = 0; c < images.size(); ++c) {
      for (const auto& t : images[c].terms()) mat[row_of.at(t.mono)][c] = t.coeff;
    }
    for (const auto& t : terms) mat[row_of.at(t.mono.jet_part())][cands.size()] = t.coeff;
    auto sol = solve_linear(std::move(mat), cands.size());
    if (!sol) return std::nullopt;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if ((*sol)[c] != 0) result += JetExpr::monomial(ring_, cands[c] * param, (*sol)[c]);
    }
  }
  return result;
}

JetExpr NonlocalContext::invert(const std::string& atom, const JetExpr& arg) {
  if (!reg_) throw Error("inverse atom applied without a registry");
  const OpGrid& fg = reg_->forward(atom);
  if (fg.rows() != 1) throw DimensionMismatch("only scalar inverse atoms can be applied");
  PseudoOp f = fg.at(0, 0);
  if (!f.is_local() || f.order() < 1) throw Error("inverse atom must be a local operator");
  JetExpr e = reduce(arg);
  if (e.is_zero()) return e;
  if (auto p = preimage(f, e)) {
    JetExpr check = reduce(f.apply_local(*p) - e);
    if (check.is_zero()) return *p;
  }
  JetExpr c;
  JetExpr monic = scaled(e, &c);
  std::string key = atom + "|" + to_prefix(monic);
  Var lead;
  if (auto it = opaque_.find(key); it != opaque_.end()) {
    lead = Var::dependent(it->second, f.order());
  } else {
    JetExpr fn = f.local().back();
    std::string name = "chi";
    // chi_n = (arg - sum_{k<n} f_k chi_k) / f_n, built in the extended ring below.
    std::string nm = name + std::to_string(counter_ + 1);
    RingPtr next = Ring::extend(ring_, {nm});
    JetExpr rhs = monic.in_ring(next);
    for (int k = 0; k < f.order(); ++k) {
      if (!f.local()[k].is_zero()) rhs -= f.local()[k].in_ring(next) * JetExpr::jet(next, nm, k);
    }
    rhs = rhs * fn.in_ring(next).inverse();
    ++counter_;
    usage_carry_ = usage();
    ring_ = next;
    rels_ = rels_.in_ring(ring_);
    lead = ring_->jet(nm, f.order());
    rels_.add(lead, rhs);
    usage_carry_.resize(rels_.rules().size(), 0);
    reducer_.reset();
    generic_[lead.index()] = AuxKind::Inverse;
    aux_.push_back({nm, AuxKind::Inverse, lead, rhs, atom});
    opaque_.emplace(key, lead.index());
  }
  return c * JetExpr::var(ring_, Var::dependent(lead.index(), 0));
}

std::vector<JetExpr> NonlocalContext::apply(const OpGrid& a, const std::vector<JetExpr>& v) {
  if (a.cols() != v.size()) throw DimensionMismatch("operator applied to a vector of wrong size");
  std::vector<JetExpr> out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    JetExpr acc(ring_);
    std::map<Monomial, JetExpr> integrands;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const PseudoOp& op = a.at(i, j);
      if (op.is_zero()) continue;
      JetExpr g = v[j];
      for (std::size_t k = 0; k < op.local().size(); ++k) {
        if (k > 0) g = total_derivative(g);
        if (!op.local()[k].is_zero()) acc += op.local()[k] * g;
      }
      for (const auto& [m, p] : op.tail()) {
        JetExpr inner = JetExpr::monomial(ring_, m) * v[j];
        for (const auto& t : p.terms()) {
          auto [it, ins] = integrands.try_emplace(t.mono.jet_part(), JetExpr(ring_));
          it->second += JetExpr::monomial(ring_, t.mono.parameter_part(), t.coeff) * inner;
        }
      }
    }
    acc = reduce(acc);
    for (const auto& [p, arg] : integrands) {
      if (arg.is_zero()) continue;
      JetExpr prim = integrate(arg);
      acc += JetExpr::monomial(ring_, p) * prim;
    }
    out.push_back(reduce(acc));
  }
  return out;
}

std::vector<JetExpr> NonlocalContext::apply(const MatrixOp& a, const std::vector<JetExpr>& v) {
  std::vector<JetExpr> out = apply(a.plain(), v);
  for (const auto& w : a.words()) {
    std::vector<JetExpr> cur = v;
    for (std::size_t k = w.mats.size(); k-- > 0;) {
      cur = apply(w.mats[k], cur);
      if (k == 0) break;
      if (cur.size() != 1) throw DimensionMismatch("only scalar inverse atoms can be applied");
      cur[0] = invert(w.atoms[k - 1], cur[0]);
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = reduce(out[i] + cur[i]);
  }
  return out;
}

std::vector<JetExpr> NonlocalContext::apply_chain(const std::vector<MatrixOp>& chain,
                                                  std::vector<JetExpr> v) {
  for (std::size_t k = chain.size(); k-- > 0;) v = apply(chain[k], v);
  return v;
}

// ---- identity ladder -------------------------------------------------------

std::string to_string(Rung r) {
  switch (r) {
    case Rung::NormalForm: return "normal-form";
    case Rung::TestVector: return "test-vector";
    case Rung::Numeric: return "numeric";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Undecidable: return "undecidable";
  }
  return "?";
}

int numeric_agreement(const std::vector<JetExpr>& lhs, const std::vector<JetExpr>& rhs,
                      std::uint64_t seed, int points, int* evaluated) {
  std::vector<JetExpr> all = lhs;
  all.insert(all.end(), rhs.begin(), rhs.end());
  auto vars = AssignmentGenerator::variables_of(all);
  AssignmentGenerator gen(seed);
  int agree = 0;
  int done = 0;
  for (int attempt = 0; done < points && attempt < points * 20; ++attempt) {
    Assignment a = gen.next(vars);
    try {
      bool same = true;
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (random_eval(lhs[i], a) != random_eval(rhs[i], a)) same = false;
      }
      ++done;
      if (same) ++agree;
    } catch (const DivisionByZero&) {
    }
  }
  if (evaluated) *evaluated = done;
  return agree;
}

namespace {

MatrixOp reduce_coeffs(const MatrixOp& a, const RelationSet& rels) {
  if (rels.empty()) return a;
  auto reducer = std::make_shared<Reducer>(rels);
  auto cell = [reducer](const PseudoOp& p) {
    std::vector<JetExpr> cs;
    for (const auto& c : p.local()) cs.push_back(reducer->reduce(c));
    PseudoOp out = PseudoOp::from_coeffs(p.ring(), cs);
    for (const auto& [m, q] : p.tail()) {
      out += PseudoOp::tail_term(reducer->reduce(q), JetExpr::monomial(p.ring(), m));
    }
    return out;
  };
  return simplify(a.map_grids([&](const OpGrid& g) { return g.map_cells(cell, g.ring()); }),
                  nullptr);
}

}  // namespace

IdentityOutcome verify_operator_identity(const std::vector<MatrixOp>& lhs,
                                         const std::vector<MatrixOp>& rhs,
                                         const IdentityOptions& opts) {
  IdentityOutcome out;
  if (lhs.empty() || rhs.empty()) throw Error("empty identity side");
  if (lhs.front().rows() != rhs.front().rows() || lhs.back().cols() != rhs.back().cols()) {
    throw DimensionMismatch("identity sides have different shapes");
  }
  RingPtr ring;
  for (const auto& m : lhs) ring = unify(ring, m.ring());
  for (const auto& m : rhs) ring = unify(ring, m.ring());

  if (opts.allow_normal_form) {
    try {
      MatrixOp l = compose_chain(lhs, opts.registry);
      MatrixOp r = compose_chain(rhs, opts.registry);
      MatrixOp d = reduce_coeffs(simplify(l - r, opts.registry), opts.relations);
      if (d.is_zero()) {
        out.verdict = Verdict::Pass;
        out.decided_by = Rung::NormalForm;
        return out;
      }
      if (!d.has_words()) {
        out.verdict = Verdict::Fail;
        out.decided_by = Rung::NormalForm;
        for (std::size_t i = 0; i < d.rows(); ++i) {
          for (std::size_t j = 0; j < d.cols(); ++j) {
            if (!d.at(i, j).is_zero()) {
              out.residual.push_back("(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                     "): " + to_text(d.at(i, j)));
            }
          }
        }
        // Numeric confirmation: some coefficient evaluates nonzero.
        std::vector<JetExpr> coeffs;
        for (std::size_t i = 0; i < d.rows(); ++i) {
          for (std::size_t j = 0; j < d.cols(); ++j) {
            for (const auto& c : d.at(i, j).local()) coeffs.push_back(c);
            for (const auto& [m, p] : d.at(i, j).tail()) coeffs.push_back(p);
          }
        }
        std::vector<JetExpr> zeros(coeffs.size(), JetExpr(ring));
        int evaluated = 0;
        int agree = numeric_agreement(coeffs, zeros, opts.seed, opts.numeric_points, &evaluated);
        out.numeric_agree = agree;
        out.numeric_total = evaluated;
        return out;
      }
      out.notes.push_back("normal form leaves inverse words; falling back to test vectors");
    } catch (const NonClosedComposition& e) {
      out.notes.push_back(std::string("composition not closed: ") + e.what());
    }
  }

  NonlocalContext ctx(ring, opts.relations, opts.registry, opts.max_order);
  auto x = ctx.test_vector(lhs.back().cols());
  auto l = ctx.apply_chain(lhs, x);
  auto r = ctx.apply_chain(rhs, x);
  out.decided_by = Rung::TestVector;
  bool decided = false;
  for (std::size_t i = 0; i < l.size(); ++i) {
    JetExpr res = ctx.reduce(l[i] - r[i]);
    if (!res.is_zero()) {
      out.residual.push_back("(" + std::to_string(i + 1) + "): " + to_prefix(res));
      decided = decided || ctx.provably_nonzero(res);
    }
  }
  out.verdict = out.residual.empty() ? Verdict::Pass : decided ? Verdict::Fail : Verdict::Undecidable;
  int evaluated = 0;
  out.numeric_agree = numeric_agreement(l, r, opts.seed, opts.numeric_points, &evaluated);
  out.numeric_total = evaluated;
  if (out.verdict == Verdict::Pass && out.numeric_agree != evaluated) {
    out.verdict = Verdict::Fail;
    out.notes.push_back("numeric oracle disagrees with the symbolic pass");
  }
  if (out.verdict == Verdict::Fail && out.numeric_agree == evaluated) {
    out.verdict = Verdict::Undecidable;
    out.notes.push_back("numeric oracle could not separate the sides");
  }
  out.notes.push_back("auxiliaries: " + std::to_string(ctx.auxiliaries().size()));
  return out;
}

}  // namespace jetcheck
