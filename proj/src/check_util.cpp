#include "check_util.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

#include "jetcheck/relations.hpp"

namespace jetcheck::detail {

bool numerically_nonzero(const JetExpr& e, std::uint64_t seed, int points) {
  AssignmentGenerator gen(seed ^ 0x9e3779b97f4a7c15ull);
  auto vars = AssignmentGenerator::variables_of({e});
  for (int k = 0; k < points; ++k) {
    try {
      if (random_eval(e, gen.next(vars)) != 0) return true;
    } catch (const DivisionByZero&) {
    }
  }
  return false;
}

SubCheck zero_sub(const std::string& name, const Labeled& residuals, std::uint64_t seed) {
  SubCheck s;
  s.name = name;
  for (const auto& [label, e] : residuals) {
    if (e.is_zero()) continue;
    s.status = Status::Fail;
    std::string text = label + ": " + to_prefix(e);
    if (!numerically_nonzero(e, seed)) text += " (vanishes at the sampled points)";
    s.residual.push_back(std::move(text));
  }
  return s;
}

SubCheck op_equal(const std::string& name, const MatrixOp& a, const MatrixOp& b,
                  InverseRegistry* reg, std::uint64_t seed) {
  MatrixOp d = simplify(a - b, reg);
  SubCheck s;
  s.name = name;
  if (d.is_zero()) return s;
  s.status = Status::Fail;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      const PseudoOp& c = d.at(i, j);
      if (c.is_zero()) continue;
      std::string text = "[" + std::to_string(i) + "," + std::to_string(j) + "]: " + to_text(c);
      bool seen = false;
      for (const auto& k : c.local()) seen = seen || numerically_nonzero(k, seed);
      for (const auto& [m, p] : c.tail()) seen = seen || numerically_nonzero(p, seed);
      if (!seen) text += " (vanishes at the sampled points)";
      s.residual.push_back(std::move(text));
    }
  }
  if (d.has_words()) s.residual.push_back(std::to_string(d.words().size()) + " inverse words remain");
  return s;
}

SubCheck info(const std::string& name, std::vector<std::string> notes) {
  SubCheck s;
  s.name = name;
  s.informational = true;
  s.notes = std::move(notes);
  return s;
}

SubCheck failing(const std::string& name, std::vector<std::string> residual) {
  SubCheck s;
  s.name = name;
  s.status = Status::Fail;
  s.residual = std::move(residual);
  return s;
}

SubCheck merged(const std::string& name, const std::vector<SubCheck>& parts) {
  SubCheck s;
  s.name = name;
  for (const auto& p : parts) {
    if (p.status == Status::Fail) s.status = Status::Fail;
    if (p.status == Status::Undecidable && s.status == Status::Pass) s.status = Status::Undecidable;
    if (static_cast<int>(p.decided_by) > static_cast<int>(s.decided_by)) s.decided_by = p.decided_by;
    for (const auto& r : p.residual) s.residual.push_back(p.name.empty() ? r : p.name + " " + r);
    s.notes.insert(s.notes.end(), p.notes.begin(), p.notes.end());
  }
  return s;
}

SubCheck undecidable(const std::string& name, const std::string& why) {
  SubCheck s;
  s.name = name;
  s.status = Status::Undecidable;
  s.residual.push_back(why);
  return s;
}

Labeled by_lambda(const std::string& label, const Grid& g) {
  Labeled out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g[i].size(); ++j) {
      const JetExpr& e = g[i][j];
      if (e.is_zero()) continue;
      Var lam = e.ring()->param("lambda");
      for (const auto& [k, part] : e.split_by_param(lam)) {
        out.emplace_back(label + "[" + std::to_string(i) + "," + std::to_string(j) + "] lambda^" +
                             std::to_string(k),
                         part);
      }
    }
  }
  return out;
}

Labeled cells(const std::string& label, const Grid& g) {
  Labeled out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g[i].size(); ++j) {
      out.emplace_back(label + "[" + std::to_string(i) + "," + std::to_string(j) + "]", g[i][j]);
    }
  }
  return out;
}

Grid grid_add(const Grid& a, const Grid& b, const Rational& scale) {
  if (a.size() != b.size()) throw DimensionMismatch("grid_add");
  Grid out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) throw DimensionMismatch("grid_add");
    for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] = add_scaled(a[i][j], b[i][j], scale);
  }
  return out;
}

Grid grid_mul(const Grid& a, const Grid& b) {
  std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
  Grid out(n, std::vector<JetExpr>(m));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != k) throw DimensionMismatch("grid_mul");
    for (std::size_t j = 0; j < m; ++j) {
      JetExpr s(unify(a[i][0].ring(), b[0][j].ring()));
      for (std::size_t l = 0; l < k; ++l) s += a[i][l] * b[l][j];
      out[i][j] = std::move(s);
    }
  }
  return out;
}

Grid grid_map(const Grid& g, const std::function<JetExpr(const JetExpr&)>& f) {
  Grid out = g;
  for (auto& row : out) {
    for (auto& c : row) c = f(c);
  }
  return out;
}

Grid grid_in_ring(const Grid& g, const RingPtr& r) {
  return grid_map(g, [&](const JetExpr& e) { return e.in_ring(r); });
}

std::vector<JetExpr> grid_flat(const Grid& g) {
  std::vector<JetExpr> out;
  for (const auto& row : g) out.insert(out.end(), row.begin(), row.end());
  return out;
}

MatrixOp as_op(const Grid& g) {
  std::vector<std::vector<PseudoOp>> rows;
  for (const auto& row : g) {
    std::vector<PseudoOp> r;
    for (const auto& c : row) r.push_back(PseudoOp::function(c));
    rows.push_back(std::move(r));
  }
  return MatrixOp(OpGrid::from_rows(g[0][0].ring(), std::move(rows)));
}

MatrixOp scalar(const PseudoOp& p) { return MatrixOp::scalar(p); }
MatrixOp scalar(const JetExpr& f) { return MatrixOp::scalar(PseudoOp::function(f)); }

std::vector<std::vector<MatrixOp>> split_terms(const MatrixOp& m) {
  const RingPtr& r = m.ring();
  std::vector<std::vector<MatrixOp>> out;
  const OpGrid& g = m.plain();
  OpGrid local(r, g.rows(), g.cols());
  std::vector<std::tuple<std::size_t, std::size_t, Monomial, JetExpr>> tails;
  std::vector<std::pair<std::size_t, Monomial>> keys;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      local.at(i, j) = PseudoOp::from_coeffs(r, g.at(i, j).local());
      for (const auto& [mono, p] : g.at(i, j).tail()) {
        tails.emplace_back(i, j, mono, p);
        std::pair<std::size_t, Monomial> key{j, mono};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
      }
    }
  }
  if (!local.is_zero()) out.push_back({MatrixOp(local)});
  if (!keys.empty()) {
    OpGrid L(r, g.rows(), keys.size()), R(r, keys.size(), g.cols());
    for (const auto& [i, j, mono, p] : tails) {
      std::size_t k = std::find(keys.begin(), keys.end(), std::make_pair(j, mono)) - keys.begin();
      L.at(i, k) += PseudoOp::function(p);
    }
    OpGrid D(r, keys.size(), keys.size());
    for (std::size_t k = 0; k < keys.size(); ++k) {
      R.at(k, keys[k].first) = PseudoOp::function(JetExpr::monomial(r, keys[k].second));
      D.at(k, k) = PseudoOp::dinv(r);
    }
    out.push_back({MatrixOp(L), MatrixOp(D), MatrixOp(R)});
  }
  for (const auto& w : m.words()) {
    std::vector<MatrixOp> chain{MatrixOp(w.mats[0])};
    for (std::size_t k = 0; k < w.atoms.size(); ++k) {
      chain.push_back(MatrixOp::atom(r, w.atoms[k], w.mats[k].cols()));
      chain.push_back(MatrixOp(w.mats[k + 1]));
    }
    out.push_back(std::move(chain));
  }
  return out;
}

MatrixOp compose_through(const std::vector<MatrixOp>& left, const MatrixOp& m,
                         const std::vector<MatrixOp>& right, InverseRegistry* reg) {
  std::optional<MatrixOp> sum;
  for (const auto& term : split_terms(m)) {
    std::vector<MatrixOp> chain = left;
    chain.insert(chain.end(), term.begin(), term.end());
    chain.insert(chain.end(), right.begin(), right.end());
    MatrixOp c = compose_chain(chain, reg);
    sum = sum ? *sum + c : c;
  }
  if (!sum) {
    std::vector<MatrixOp> chain = left;
    chain.push_back(m);
    chain.insert(chain.end(), right.begin(), right.end());
    return compose_chain(chain, reg);
  }
  return simplify(*sum, reg);
}

JetExpr jet(const RingPtr& r, const std::string& name, int k) { return JetExpr::jet(r, name, k); }
JetExpr lambda(const RingPtr& r, int exponent) { return JetExpr::param(r, "lambda", exponent); }

JetExpr monomial_sqrt(const JetExpr& e) {
  if (!e.is_monomial()) throw Error("square root of a non-monomial");
  const Term& t = e.terms()[0];
  std::vector<Monomial::Factor> f;
  for (const auto& [v, k] : t.mono.factors()) {
    if (k % 2 != 0) throw Error("square root of a monomial with an odd exponent");
    f.emplace_back(v, k / 2);
  }
  mpz_class num, den;
  if (!mpz_perfect_square_p(t.coeff.get_num_mpz_t()) || !mpz_perfect_square_p(t.coeff.get_den_mpz_t()) ||
      t.coeff < 0) {
    throw Error("square root of a non-square coefficient");
  }
  mpz_sqrt(num.get_mpz_t(), t.coeff.get_num_mpz_t());
  mpz_sqrt(den.get_mpz_t(), t.coeff.get_den_mpz_t());
  return JetExpr::monomial(e.ring(), Monomial(std::move(f)), Rational(num, den));
}

JetExpr substitute_square(const JetExpr& e, const std::string& dep, const JetExpr& image) {
  const std::uint32_t h = e.ring()->dependent_index(dep);
  JetExpr out(image.ring());
  for (const auto& t : e.terms()) {
    std::vector<Monomial::Factor> rest;
    int k = 0;
    for (const auto& [v, n] : t.mono.factors()) {
      if (!v.is_param() && v.index() == h) {
        if (v.order() != 0 || n % 2 != 0) throw Error("odd or differentiated occurrence of " + dep);
        k = n / 2;
      } else {
        rest.emplace_back(v, n);
      }
    }
    JetExpr m = JetExpr::monomial(e.ring(), Monomial(std::move(rest)), t.coeff);
    out += rename_into(m, image.ring()) * image.pow(k);
  }
  return out;
}

JetExpr log_derivative_of_root(const JetExpr& c_sq) {
  return Rational(1, 2) * total_derivative(c_sq) * c_sq.inverse();
}

SubCheck density_sub(const Catalog& cat, const JetExpr& P, std::uint64_t seed) {
  const RingPtr& ys = cat.ring("y.us");
  JetExpr u = jet(ys, "u");
  return zero_sub("density against the substitution",
                  {{"P - u^4", rename_into(P, ys, vw_images(cat)) - u.pow(4)}}, seed);
}

std::vector<std::pair<std::string, JetExpr>> ij_images(const Catalog& cat) {
  return {{"i", cat.expr("ij.i")}, {"j", cat.expr("ij.j")}};
}

std::vector<std::pair<std::string, JetExpr>> vw_images(const Catalog& cat) {
  return {{"v", cat.binding("recip.substitution", "v")}, {"w", cat.binding("recip.substitution", "w")}};
}

Rule radical_rule(const RingPtr& r, const std::string& U, const JetExpr& P) {
  JetExpr p = rename_into(P, r);
  return Rule{r->jet(U, 1), Rational(1, 4) * JetExpr::jet(r, U) * total_derivative(p) * p.inverse()};
}

// ---- linear span ---------------------------------------------------------------

namespace {

std::map<Monomial, Rational> to_vec(const JetExpr& e) {
  std::map<Monomial, Rational> v;
  for (const auto& t : e.terms()) v.emplace(t.mono, t.coeff);
  return v;
}

}  // namespace

void LinearSpan::reduce(Vec& v) const {
  auto it = v.end();
  while (it != v.begin()) {
    --it;
    auto b = basis_.find(it->first);
    if (b == basis_.end()) continue;
    const Monomial key = it->first;
    const Rational c = it->second;
    for (const auto& [m, x] : b->second) {
      Rational& slot = v[m];
      slot -= c * x;
      if (slot == 0) v.erase(m);
    }
    // Everything at or above key is final; continue strictly below it.
    it = v.lower_bound(key);
  }
}

void LinearSpan::add(const JetExpr& e) {
  if (!ring_) ring_ = e.ring();
  ring_ = unify(ring_, e.ring());
  Vec v = to_vec(e);
  reduce(v);
  if (v.empty()) return;
  auto lead = std::prev(v.end());
  Rational c = lead->second;
  Monomial key = lead->first;
  for (auto& [m, x] : v) x /= c;
  basis_.emplace(key, std::move(v));
}

JetExpr LinearSpan::remainder(const JetExpr& e) const {
  Vec v = to_vec(e);
  reduce(v);
  std::vector<Term> terms;
  for (auto& [m, c] : v) terms.push_back(Term{m, c});
  return JetExpr(ring_ ? unify(ring_, e.ring()) : e.ring(), std::move(terms));
}

// ---- weighted monomials ---------------------------------------------------------

std::vector<JetExpr> weighted_monomials(const RingPtr& r, const std::vector<std::string>& deps,
                                        const std::vector<int>& weights, int lambda_weight,
                                        int lambda_min, int lambda_max, int w) {
  // Jet coordinates with positive weight not exceeding the largest budget.
  int budget = w - lambda_weight * lambda_min;
  std::vector<std::pair<Var, int>> coords;
  for (std::size_t k = 0; k < deps.size(); ++k) {
    for (int n = 0; weights[k] + n <= budget; ++n) {
      if (weights[k] + n <= 0) throw Error("weighted_monomials needs positive weights");
      coords.emplace_back(r->jet(deps[k], n), weights[k] + n);
    }
  }
  std::vector<JetExpr> out;
  for (int p = lambda_min; p <= lambda_max; ++p) {
    int rest = w - lambda_weight * p;
    if (rest < 0) continue;
    // Multisets of coords with total weight `rest`, built in coordinate order.
    std::vector<Monomial::Factor> cur;
    std::function<void(std::size_t, int)> go = [&](std::size_t from, int left) {
      if (left == 0) {
        std::vector<Monomial::Factor> f = cur;
        if (p != 0) f.emplace_back(r->param("lambda"), p);
        out.push_back(JetExpr::monomial(r, Monomial(std::move(f))));
        return;
      }
      for (std::size_t c = from; c < coords.size(); ++c) {
        if (coords[c].second > left) continue;
        bool same = !cur.empty() && cur.back().first == coords[c].first;
        if (same) {
          ++cur.back().second;
        } else {
          cur.emplace_back(coords[c].first, 1);
        }
        go(c, left - coords[c].second);
        if (same) {
          --cur.back().second;
        } else {
          cur.pop_back();
        }
      }
    };
    go(0, rest);
  }
  return out;
}

std::optional<int> weight_of(const JetExpr& e, const std::map<std::uint32_t, int>& dep_weights,
                             int lambda_weight) {
  std::optional<int> w;
  for (const auto& t : e.terms()) {
    int s = 0;
    for (const auto& [v, k] : t.mono.factors()) {
      if (v.is_param()) {
        s += lambda_weight * k;
      } else {
        auto it = dep_weights.find(v.index());
        if (it == dep_weights.end()) return std::nullopt;
        s += (it->second + v.order()) * k;
      }
    }
    if (w && *w != s) return std::nullopt;
    w = s;
  }
  return w;
}

}  // namespace jetcheck::detail
