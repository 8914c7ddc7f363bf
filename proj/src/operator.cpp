#include "jetcheck/operator.hpp"

#include <algorithm>
#include <optional>

#include "jetcheck/calculus.hpp"

namespace jetcheck {

namespace {

Rational binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(r);
}

JetExpr one(const RingPtr& ring) { return JetExpr(ring, 1); }

}  // namespace

// ---- PseudoOp --------------------------------------------------------------

PseudoOp PseudoOp::function(const JetExpr& f) {
  PseudoOp op(f.ring());
  if (!f.is_zero()) op.local_.push_back(f);
  return op;
}

PseudoOp PseudoOp::constant(const RingPtr& ring, const Rational& c) {
  return function(JetExpr(ring, c));
}

PseudoOp PseudoOp::d(const RingPtr& ring, int k) {
  PseudoOp op(ring);
  op.local_.assign(static_cast<std::size_t>(k) + 1, JetExpr(ring));
  op.local_[static_cast<std::size_t>(k)] = one(ring);
  return op;
}

PseudoOp PseudoOp::dinv(const RingPtr& ring) { return tail_term(one(ring), one(ring)); }

PseudoOp PseudoOp::tail_term(const JetExpr& p, const JetExpr& q) {
  PseudoOp op(unify(p.ring(), q.ring()));
  op.add_tail(p, q);
  op.trim();
  return op;
}

PseudoOp PseudoOp::from_coeffs(const RingPtr& ring, std::vector<JetExpr> coeffs) {
  PseudoOp op(ring);
  op.local_ = std::move(coeffs);
  for (auto& c : op.local_) c = c.is_zero() ? JetExpr(ring) : c.in_ring(unify(ring, c.ring()));
  op.trim();
  return op;
}

void PseudoOp::add_tail(const JetExpr& p, const JetExpr& q) {
  if (p.is_zero()) return;
  for (const auto& t : q.terms()) {
    JetExpr scalar = JetExpr::monomial(ring_, t.mono.parameter_part(), t.coeff);
    auto [it, inserted] = tail_.try_emplace(t.mono.jet_part(), JetExpr(ring_));
    it->second += scalar * p;
    if (it->second.is_zero()) tail_.erase(it);
  }
}

void PseudoOp::trim() {
  while (!local_.empty() && local_.back().is_zero()) local_.pop_back();
  for (auto it = tail_.begin(); it != tail_.end();) {
    it = it->second.is_zero() ? tail_.erase(it) : std::next(it);
  }
}

JetExpr PseudoOp::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(local_.size())) return JetExpr(ring_);
  return local_[static_cast<std::size_t>(k)];
}

JetExpr PseudoOp::as_function() const {
  if (!tail_.empty() || local_.size() > 1) throw Error("operator is not a multiplication operator");
  return coeff(0);
}

PseudoOp PseudoOp::operator-() const {
  PseudoOp r = *this;
  for (auto& c : r.local_) c = -c;
  for (auto& [m, p] : r.tail_) p = -p;
  return r;
}

PseudoOp& PseudoOp::operator+=(const PseudoOp& o) {
  ring_ = unify(ring_, o.ring_);
  if (local_.size() < o.local_.size()) local_.resize(o.local_.size(), JetExpr(ring_));
  for (std::size_t k = 0; k < o.local_.size(); ++k) local_[k] += o.local_[k];
  for (const auto& [m, p] : o.tail_) {
    auto [it, inserted] = tail_.try_emplace(m, JetExpr(ring_));
    it->second += p;
  }
  trim();
  return *this;
}

PseudoOp& PseudoOp::operator-=(const PseudoOp& o) { return *this += -o; }

PseudoOp operator*(const Rational& c, const PseudoOp& a) {
  if (c == 0) return PseudoOp(a.ring_);
  PseudoOp r = a;
  for (auto& x : r.local_) x = c * x;
  for (auto& [m, p] : r.tail_) p = c * p;
  return r;
}

bool operator==(const PseudoOp& a, const PseudoOp& b) {
  if (a.local_.size() != b.local_.size() || a.tail_.size() != b.tail_.size()) return false;
  for (std::size_t k = 0; k < a.local_.size(); ++k) {
    if (!(a.local_[k] == b.local_[k])) return false;
  }
  auto i = a.tail_.begin();
  auto j = b.tail_.begin();
  for (; i != a.tail_.end(); ++i, ++j) {
    if (i->first != j->first || !(i->second == j->second)) return false;
  }
  return true;
}

PseudoOp PseudoOp::left_mul(const JetExpr& f) const {
  PseudoOp r(unify(ring_, f.ring()));
  for (const auto& c : local_) r.local_.push_back(f * c);
  for (const auto& [m, p] : tail_) r.tail_.emplace(m, f * p);
  r.trim();
  return r;
}

PseudoOp PseudoOp::right_mul(const JetExpr& f) const {
  PseudoOp r(unify(ring_, f.ring()));
  if (f.is_zero()) return r;
  // c D^k o f = sum_l C(k,l) c D^{k-l}(f) D^l
  std::vector<JetExpr> derivs{f};
  for (std::size_t k = 1; k < local_.size(); ++k) derivs.push_back(total_derivative(derivs.back()));
  r.local_.assign(local_.size(), JetExpr(r.ring_));
  for (std::size_t k = 0; k < local_.size(); ++k) {
    if (local_[k].is_zero()) continue;
    for (std::size_t l = 0; l <= k; ++l) {
      r.local_[l] += binomial(static_cast<int>(k), static_cast<int>(l)) * (local_[k] * derivs[k - l]);
    }
  }
  for (const auto& [m, p] : tail_) r.add_tail(p, JetExpr::monomial(r.ring_, m) * f);
  r.trim();
  return r;
}

PseudoOp PseudoOp::right_d() const {
  PseudoOp r(ring_);
  r.local_.assign(local_.size() + 1, JetExpr(ring_));
  for (std::size_t k = 0; k < local_.size(); ++k) r.local_[k + 1] = local_[k];
  // P D^{-1} m D = P m - P D^{-1} m_y
  for (const auto& [m, p] : tail_) {
    JetExpr mm = JetExpr::monomial(ring_, m);
    r.local_[0] += p * mm;
    r.add_tail(-p, total_derivative(mm));
  }
  r.trim();
  return r;
}

PseudoOp PseudoOp::right_dinv() const {
  PseudoOp r(ring_);
  for (std::size_t k = 1; k < local_.size(); ++k) r.local_.push_back(local_[k]);
  if (!local_.empty()) r.add_tail(local_[0], one(ring_));
  // Regroup the tail by the jet monomial of the left factor; each core must
  // be exact:  p D^{-1} B' D^{-1} = p B D^{-1} - p D^{-1} B.
  std::map<Monomial, JetExpr> cores;
  for (const auto& [m, p] : tail_) {
    for (const auto& t : p.terms()) {
      JetExpr scalar = JetExpr::monomial(ring_, t.mono.parameter_part(), t.coeff);
      auto [it, inserted] = cores.try_emplace(t.mono.jet_part(), JetExpr(ring_));
      it->second += scalar * JetExpr::monomial(ring_, m);
    }
  }
  for (const auto& [pm, q] : cores) {
    if (q.is_zero()) continue;
    JetExpr b(ring_);
    try {
      b = antiderivative(q);
    } catch (const NotIntegrable&) {
      throw NonClosedComposition("tail core is not a total derivative");
    }
    JetExpr pe = JetExpr::monomial(ring_, pm);
    r.add_tail(pe * b, one(ring_));
    r.add_tail(-pe, b);
  }
  r.trim();
  return r;
}

JetExpr PseudoOp::apply_local(const JetExpr& f) const {
  if (!tail_.empty()) throw Error("apply_local on an operator with a tail");
  JetExpr out(unify(ring_, f.ring()));
  JetExpr g = f;
  for (std::size_t k = 0; k < local_.size(); ++k) {
    if (k > 0) g = total_derivative(g);
    if (!local_[k].is_zero()) out += local_[k] * g;
  }
  return out;
}

PseudoOp PseudoOp::map(const std::function<JetExpr(const JetExpr&)>& coeff_map,
                       const RingPtr& target, const PseudoOp& dmap,
                       const JetExpr& dinv_right) const {
  PseudoOp out(target);
  PseudoOp dpow = PseudoOp::constant(target, 1);
  for (std::size_t k = 0; k < local_.size(); ++k) {
    if (k > 0) dpow = compose(dpow, dmap);
    if (!local_[k].is_zero()) out += compose(PseudoOp::function(coeff_map(local_[k])), dpow);
  }
  for (const auto& [m, p] : tail_) {
    JetExpr q = coeff_map(JetExpr::monomial(ring_, m));
    out += PseudoOp::tail_term(coeff_map(p), dinv_right * q);
  }
  return out;
}

PseudoOp PseudoOp::in_ring(const RingPtr& target) const {
  PseudoOp r(target);
  for (const auto& c : local_) r.local_.push_back(c.in_ring(target));
  for (const auto& [m, p] : tail_) r.tail_.emplace(m, p.in_ring(target));
  return r;
}

PseudoOp compose(const PseudoOp& a, const PseudoOp& b) {
  RingPtr ring = unify(a.ring(), b.ring());
  PseudoOp out(ring);
  for (std::size_t k = 0; k < b.local().size(); ++k) {
    if (b.local()[k].is_zero()) continue;
    PseudoOp t = a.right_mul(b.local()[k]);
    for (std::size_t i = 0; i < k; ++i) t = t.right_d();
    out += t;
  }
  for (const auto& [m, p] : b.tail()) {
    out += a.right_mul(p).right_dinv().right_mul(JetExpr::monomial(ring, m));
  }
  return out;
}

PseudoOp pow(const PseudoOp& a, int n) {
  if (n < 0) throw Error("negative operator power");
  PseudoOp r = PseudoOp::constant(a.ring(), 1);
  for (int i = 0; i < n; ++i) r = compose(r, a);
  return r;
}

PseudoOp adjoint(const PseudoOp& a) {
  const RingPtr& ring = a.ring();
  PseudoOp out(ring);
  for (std::size_t k = 0; k < a.local().size(); ++k) {
    if (a.local()[k].is_zero()) continue;
    Rational sign = (k % 2) ? -1 : 1;
    out += sign * compose(PseudoOp::d(ring, static_cast<int>(k)), PseudoOp::function(a.local()[k]));
  }
  for (const auto& [m, p] : a.tail()) {
    out += PseudoOp::tail_term(-JetExpr::monomial(ring, m), p);
  }
  return out;
}

PseudoOp conjugate_by_gauge(const PseudoOp& a, const JetExpr& ell) {
  if (!a.is_local()) throw Error("gauge conjugation needs a local operator");
  RingPtr ring = unify(a.ring(), ell.ring());
  PseudoOp shifted = PseudoOp::d(ring) + PseudoOp::function(ell);
  PseudoOp out(ring);
  PseudoOp p = PseudoOp::constant(ring, 1);
  for (std::size_t k = 0; k < a.local().size(); ++k) {
    if (k > 0) p = compose(p, shifted);
    if (!a.local()[k].is_zero()) out += p.left_mul(a.local()[k]);
  }
  return out;
}

PseudoOp frechet_row(const JetExpr& e, std::uint32_t dep) {
  return PseudoOp::from_coeffs(e.ring(), frechet_coeffs(e, dep));
}

PseudoOp frechet_row(const JetExpr& e, std::string_view dep) {
  return frechet_row(e, e.ring()->dependent_index(dep));
}

std::optional<PseudoOp> right_divide(const PseudoOp& a, const PseudoOp& f) {
  if (!a.is_local() || !f.is_local() || f.is_zero()) return std::nullopt;
  const JetExpr& lead = f.local().back();
  if (!lead.is_monomial()) return std::nullopt;
  JetExpr inv = lead.inverse();
  PseudoOp rem = a;
  PseudoOp q(unify(a.ring(), f.ring()));
  while (!rem.is_zero() && rem.order() >= f.order()) {
    int k = rem.order() - f.order();
    PseudoOp term = PseudoOp::d(q.ring(), k).left_mul(rem.local().back() * inv);
    q += term;
    rem -= compose(term, f);
  }
  if (!rem.is_zero()) return std::nullopt;
  return q;
}

std::optional<PseudoOp> left_divide(const PseudoOp& a, const PseudoOp& f) {
  if (!a.is_local() || !f.is_local() || f.is_zero()) return std::nullopt;
  const JetExpr& lead = f.local().back();
  if (!lead.is_monomial()) return std::nullopt;
  JetExpr inv = lead.inverse();
  PseudoOp rem = a;
  PseudoOp q(unify(a.ring(), f.ring()));
  while (!rem.is_zero() && rem.order() >= f.order()) {
    int k = rem.order() - f.order();
    PseudoOp term = PseudoOp::d(q.ring(), k).left_mul(rem.local().back() * inv);
    q += term;
    rem -= compose(f, term);
  }
  if (!rem.is_zero()) return std::nullopt;
  return q;
}

// ---- OpGrid ----------------------------------------------------------------

OpGrid::OpGrid(RingPtr ring, std::size_t rows, std::size_t cols)
    : ring_(std::move(ring)), rows_(rows), cols_(cols), cells_(rows * cols, PseudoOp(ring_)) {}

OpGrid OpGrid::from_rows(const RingPtr& ring, std::vector<std::vector<PseudoOp>> rows) {
  std::size_t n = rows.size();
  std::size_t m = n ? rows[0].size() : 0;
  OpGrid g(ring, n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m) throw DimensionMismatch("ragged operator grid");
    for (std::size_t j = 0; j < m; ++j) {
      g.ring_ = unify(g.ring_, rows[i][j].ring());
      g.at(i, j) = std::move(rows[i][j]);
    }
  }
  for (auto& c : g.cells_) c = c.in_ring(g.ring_);
  return g;
}

OpGrid OpGrid::identity(const RingPtr& ring, std::size_t n) {
  OpGrid g(ring, n, n);
  for (std::size_t i = 0; i < n; ++i) g.at(i, i) = PseudoOp::constant(ring, 1);
  return g;
}

bool OpGrid::is_zero() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const PseudoOp& p) { return p.is_zero(); });
}

OpGrid OpGrid::operator-() const {
  OpGrid r = *this;
  for (auto& c : r.cells_) c = -c;
  return r;
}

OpGrid& OpGrid::operator+=(const OpGrid& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("grid sum shape mismatch");
  ring_ = unify(ring_, o.ring_);
  for (std::size_t k = 0; k < cells_.size(); ++k) cells_[k] += o.cells_[k];
  return *this;
}

OpGrid operator*(const Rational& c, const OpGrid& a) {
  OpGrid r = a;
  for (auto& x : r.cells_) x = c * x;
  return r;
}

bool operator==(const OpGrid& a, const OpGrid& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t k = 0; k < a.cells_.size(); ++k) {
    if (!(a.cells_[k] == b.cells_[k])) return false;
  }
  return true;
}

OpGrid OpGrid::map_cells(const std::function<PseudoOp(const PseudoOp&)>& f,
                         const RingPtr& target) const {
  OpGrid r(target, rows_, cols_);
  for (std::size_t k = 0; k < cells_.size(); ++k) r.cells_[k] = f(cells_[k]);
  return r;
}

OpGrid compose(const OpGrid& a, const OpGrid& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("inner dimensions disagree");
  OpGrid r(unify(a.ring(), b.ring()), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      PseudoOp acc(r.ring());
      for (std::size_t l = 0; l < a.cols(); ++l) {
        if (a.at(i, l).is_zero() || b.at(l, j).is_zero()) continue;
        acc += compose(a.at(i, l), b.at(l, j));
      }
      r.at(i, j) = std::move(acc);
    }
  }
  return r;
}

OpGrid adjoint(const OpGrid& a) {
  OpGrid r(a.ring(), a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r.at(j, i) = adjoint(a.at(i, j));
  }
  return r;
}

// ---- MatrixOp --------------------------------------------------------------

MatrixOp::MatrixOp(OpGrid plain, std::vector<Word> words)
    : plain_(std::move(plain)), words_(std::move(words)) {}

MatrixOp MatrixOp::scalar(const PseudoOp& op) {
  return MatrixOp(OpGrid::from_rows(op.ring(), {{op}}));
}

MatrixOp MatrixOp::atom(const RingPtr& ring, const std::string& name, std::size_t dim) {
  Word w;
  w.mats = {OpGrid::identity(ring, dim), OpGrid::identity(ring, dim)};
  w.atoms = {name};
  return MatrixOp(OpGrid(ring, dim, dim), {w});
}

MatrixOp MatrixOp::operator-() const {
  MatrixOp r = *this;
  r.plain_ = -r.plain_;
  for (auto& w : r.words_) w.mats.front() = -w.mats.front();
  return r;
}

MatrixOp& MatrixOp::operator+=(const MatrixOp& o) {
  plain_ += o.plain_;
  words_.insert(words_.end(), o.words_.begin(), o.words_.end());
  *this = simplify(*this, nullptr);
  return *this;
}

MatrixOp operator*(const Rational& c, const MatrixOp& a) {
  MatrixOp r(c * a.plain_, a.words_);
  for (auto& w : r.words_) w.mats.front() = c * w.mats.front();
  return simplify(r, nullptr);
}

MatrixOp MatrixOp::map_grids(const std::function<OpGrid(const OpGrid&)>& f) const {
  MatrixOp r(f(plain_), words_);
  for (auto& w : r.words_) {
    for (auto& m : w.mats) m = f(m);
  }
  return r;
}

bool operator==(const MatrixOp& a, const MatrixOp& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).is_zero();
}

// ---- InverseRegistry -------------------------------------------------------

void InverseRegistry::register_atom(const std::string& name, const OpGrid& forward) {
  if (forward.rows() != forward.cols()) throw DimensionMismatch("inverse atom must be square");
  forward_[name] = forward;
}

void InverseRegistry::register_conjugation(const std::string& result_name,
                                           const std::string& atom, const JetExpr& left,
                                           const JetExpr& right, const OpGrid& result) {
  const OpGrid& a = forward(atom);
  if (a.rows() != 1) throw Error("conjugations are supported for scalar atoms");
  OpGrid l = OpGrid::from_rows(left.ring(), {{PseudoOp::function(left)}});
  OpGrid r = OpGrid::from_rows(right.ring(), {{PseudoOp::function(right)}});
  if (!(compose(compose(l, a), r) == result)) {
    throw Error("conjugation identity for " + result_name + " does not hold");
  }
  register_atom(result_name, result);
  conj_[atom].push_back({left, right, result_name});
}

const OpGrid& InverseRegistry::forward(const std::string& name) const {
  auto it = forward_.find(name);
  if (it == forward_.end()) throw UnknownName("unregistered inverse atom: " + name);
  return it->second;
}

const std::vector<InverseRegistry::Conjugation>& InverseRegistry::conjugations(
    const std::string& name) const {
  static const std::vector<Conjugation> none;
  auto it = conj_.find(name);
  return it == conj_.end() ? none : it->second;
}

std::pair<std::string, int> InverseRegistry::adjoint_atom(const std::string& name) {
  if (auto it = adjoint_.find(name); it != adjoint_.end()) return it->second;
  const OpGrid& f = forward(name);
  OpGrid fa = adjoint(f);
  std::pair<std::string, int> res;
  if (fa == f) {
    res = {name, 1};
  } else if (fa == -f) {
    res = {name, -1};
  } else {
    std::string star = name + "^*";
    register_atom(star, fa);
    adjoint_[star] = {name, 1};
    res = {star, 1};
  }
  adjoint_[name] = res;
  return res;
}

// ---- words -----------------------------------------------------------------

namespace {

bool column_divide(const OpGrid& m, const PseudoOp& f, bool on_right, OpGrid& out) {
  out = OpGrid(m.ring(), m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      auto q = on_right ? right_divide(m.at(i, j), f) : left_divide(m.at(i, j), f);
      if (!q) return false;
      out.at(i, j) = *q;
    }
  }
  return true;
}

// Removes atom k when an adjacent grid is divisible by its forward operator.
bool try_cancel(Word& w, std::size_t k, const InverseRegistry& reg) {
  const OpGrid& f = reg.forward(w.atoms[k]);
  OpGrid q;
  if (f.rows() == 1) {
    if (column_divide(w.mats[k], f.at(0, 0), true, q)) {
      w.mats[k] = compose(q, w.mats[k + 1]);
    } else if (column_divide(w.mats[k + 1], f.at(0, 0), false, q)) {
      w.mats[k] = compose(w.mats[k], q);
    } else {
      return false;
    }
  } else if (w.mats[k] == f) {
    w.mats[k] = w.mats[k + 1];
  } else if (w.mats[k + 1] == f) {
    // mats[k] stays
  } else {
    return false;
  }
  w.mats.erase(w.mats.begin() + static_cast<long>(k) + 1);
  w.atoms.erase(w.atoms.begin() + static_cast<long>(k));
  return true;
}

bool simplify_word(Word& w, InverseRegistry& reg) {
  bool changed = false;
  for (std::size_t k = 0; k < w.atoms.size();) {
    if (try_cancel(w, k, reg)) {
      changed = true;
      k = 0;
      continue;
    }
    bool rewrote = false;
    for (const auto& c : reg.conjugations(w.atoms[k])) {
      Word trial = w;
      OpGrid right = OpGrid::from_rows(c.right.ring(), {{PseudoOp::function(c.right)}});
      OpGrid left = OpGrid::from_rows(c.left.ring(), {{PseudoOp::function(c.left)}});
      trial.mats[k] = compose(trial.mats[k], right);
      trial.mats[k + 1] = compose(left, trial.mats[k + 1]);
      trial.atoms[k] = c.result;
      if (try_cancel(trial, k, reg)) {
        w = std::move(trial);
        rewrote = true;
        break;
      }
    }
    if (rewrote) {
      changed = true;
      k = 0;
      continue;
    }
    ++k;
  }
  return changed;
}

}  // namespace

MatrixOp simplify(const MatrixOp& a, InverseRegistry* reg) {
  OpGrid plain = a.plain();
  std::vector<Word> words;
  for (Word w : a.words()) {
    if (reg) simplify_word(w, *reg);
    if (std::any_of(w.mats.begin(), w.mats.end(), [](const OpGrid& g) { return g.is_zero(); })) {
      continue;
    }
    if (w.atoms.empty()) {
      plain += w.mats.front();
      continue;
    }
    // Merge with an existing word that differs only in its first grid.
    bool merged = false;
    for (auto& o : words) {
      if (o.atoms == w.atoms &&
          std::equal(o.mats.begin() + 1, o.mats.end(), w.mats.begin() + 1, w.mats.end())) {
        o.mats.front() += w.mats.front();
        merged = true;
        break;
      }
    }
    if (!merged) words.push_back(std::move(w));
  }
  words.erase(std::remove_if(words.begin(), words.end(),
                             [](const Word& w) { return w.mats.front().is_zero(); }),
              words.end());
  return MatrixOp(std::move(plain), std::move(words));
}

MatrixOp compose(const MatrixOp& a, const MatrixOp& b, InverseRegistry* reg) {
  OpGrid plain = compose(a.plain(), b.plain());
  std::vector<Word> words;
  for (const auto& w : a.words()) {
    Word x = w;
    x.mats.back() = compose(x.mats.back(), b.plain());
    words.push_back(std::move(x));
  }
  for (const auto& w : b.words()) {
    Word x = w;
    x.mats.front() = compose(a.plain(), x.mats.front());
    words.push_back(std::move(x));
  }
  for (const auto& wa : a.words()) {
    for (const auto& wb : b.words()) {
      Word x;
      x.mats.assign(wa.mats.begin(), wa.mats.end() - 1);
      x.mats.push_back(compose(wa.mats.back(), wb.mats.front()));
      x.mats.insert(x.mats.end(), wb.mats.begin() + 1, wb.mats.end());
      x.atoms = wa.atoms;
      x.atoms.insert(x.atoms.end(), wb.atoms.begin(), wb.atoms.end());
      words.push_back(std::move(x));
    }
  }
  return simplify(MatrixOp(std::move(plain), std::move(words)), reg);
}

namespace {

// Some bracketing of factors[lo..hi] whose every composition closes.
std::optional<MatrixOp> closed_product(const std::vector<MatrixOp>& f, std::size_t lo,
                                       std::size_t hi, InverseRegistry* reg,
                                       std::map<std::pair<std::size_t, std::size_t>,
                                                std::optional<MatrixOp>>& memo) {
  if (lo == hi) return f[lo];
  auto key = std::make_pair(lo, hi);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::optional<MatrixOp> out;
  // Right to left first, that is the cheapest order for operator-times-vector chains.
  for (std::size_t k = lo; k < hi && !out; ++k) {
    auto a = closed_product(f, lo, k, reg, memo);
    if (!a) continue;
    auto b = closed_product(f, k + 1, hi, reg, memo);
    if (!b) continue;
    try {
      out = compose(*a, *b, reg);
    } catch (const NonClosedComposition&) {
    }
  }
  memo.emplace(key, out);
  return out;
}

}  // namespace

MatrixOp compose_chain(const std::vector<MatrixOp>& factors, InverseRegistry* reg) {
  if (factors.empty()) throw Error("empty operator chain");
  std::map<std::pair<std::size_t, std::size_t>, std::optional<MatrixOp>> memo;
  auto r = closed_product(factors, 0, factors.size() - 1, reg, memo);
  if (!r) throw NonClosedComposition("no bracketing of the chain closes");
  return *r;
}

MatrixOp adjoint(const MatrixOp& a, InverseRegistry* reg) {
  std::vector<Word> words;
  for (const auto& w : a.words()) {
    if (!reg) throw Error("adjoint of inverse words needs a registry");
    Word x;
    int sign = 1;
    for (std::size_t k = w.mats.size(); k-- > 0;) x.mats.push_back(adjoint(w.mats[k]));
    for (std::size_t k = w.atoms.size(); k-- > 0;) {
      auto [name, s] = reg->adjoint_atom(w.atoms[k]);
      x.atoms.push_back(name);
      sign *= s;
    }
    if (sign < 0) x.mats.front() = -x.mats.front();
    words.push_back(std::move(x));
  }
  return simplify(MatrixOp(adjoint(a.plain()), std::move(words)), reg);
}

}  // namespace jetcheck
