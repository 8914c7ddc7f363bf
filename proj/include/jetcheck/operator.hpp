#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "jetcheck/expr.hpp"

namespace jetcheck {

/// Scalar weakly nonlocal operator  sum_k c_k D^k + sum_m P_m D^{-1} m.
///
/// Tails are keyed by the jet-only monomial m on the right of D^{-1}; any
/// rational or parameter factor of the right-hand function is moved into
/// P_m, so the representation is canonical.
class PseudoOp {
 public:
  PseudoOp() = default;
  explicit PseudoOp(RingPtr ring) : ring_(std::move(ring)) {}

  static PseudoOp function(const JetExpr& f);
  static PseudoOp constant(const RingPtr& ring, const Rational& c);
  static PseudoOp d(const RingPtr& ring, int k = 1);
  static PseudoOp dinv(const RingPtr& ring);
  /// p D^{-1} q.
  static PseudoOp tail_term(const JetExpr& p, const JetExpr& q);
  static PseudoOp from_coeffs(const RingPtr& ring, std::vector<JetExpr> coeffs);

  const RingPtr& ring() const { return ring_; }
  const std::vector<JetExpr>& local() const { return local_; }
  const std::map<Monomial, JetExpr>& tail() const { return tail_; }
  bool is_zero() const { return local_.empty() && tail_.empty(); }
  bool is_local() const { return tail_.empty(); }
  /// Highest power of D, -1 for the zero or purely nonlocal operator.
  int order() const { return static_cast<int>(local_.size()) - 1; }
  JetExpr coeff(int k) const;
  /// The multiplication operator's function; Error unless order <= 0 and local.
  JetExpr as_function() const;

  PseudoOp operator-() const;
  PseudoOp& operator+=(const PseudoOp& o);
  PseudoOp& operator-=(const PseudoOp& o);
  friend PseudoOp operator+(PseudoOp a, const PseudoOp& b) { return a += b; }
  friend PseudoOp operator-(PseudoOp a, const PseudoOp& b) { return a -= b; }
  friend PseudoOp operator*(const Rational& c, const PseudoOp& a);
  friend bool operator==(const PseudoOp& a, const PseudoOp& b);

  /// f o A.
  PseudoOp left_mul(const JetExpr& f) const;
  /// A o f.
  PseudoOp right_mul(const JetExpr& f) const;
  /// A o D.
  PseudoOp right_d() const;
  /// A o D^{-1}; NonClosedComposition when a tail core is not exact.
  PseudoOp right_dinv() const;

  /// sum_k c_k D^k(f); the tail must be empty.
  JetExpr apply_local(const JetExpr& f) const;

  /// Image under a coefficient map into another ring. Tails p D^{-1} q map
  /// to map(p) D^{-1} map(q); `dmap` gives the image of D (for x -> y it is
  /// u D_y) and `dinv_left` the function g with D^{-1} -> D^{-1} o g.
  PseudoOp map(const std::function<JetExpr(const JetExpr&)>& coeff_map, const RingPtr& target,
               const PseudoOp& dmap, const JetExpr& dinv_right) const;

  PseudoOp in_ring(const RingPtr& target) const;

 private:
  void trim();
  void add_tail(const JetExpr& p, const JetExpr& q);

  RingPtr ring_;
  std::vector<JetExpr> local_;
  std::map<Monomial, JetExpr> tail_;
};

using LocalOp = PseudoOp;

PseudoOp compose(const PseudoOp& a, const PseudoOp& b);
PseudoOp pow(const PseudoOp& a, int n);
PseudoOp adjoint(const PseudoOp& a);
/// c^{-1} o A o c for a gauge factor c with logarithmic derivative ell = c_y/c.
PseudoOp conjugate_by_gauge(const PseudoOp& a, const JetExpr& ell);
/// sum_k (d e / d dep_k) D^k.
PseudoOp frechet_row(const JetExpr& e, std::uint32_t dep);
PseudoOp frechet_row(const JetExpr& e, std::string_view dep);

/// X with X o F = A, or nullopt. F needs a monomial leading coefficient.
std::optional<PseudoOp> right_divide(const PseudoOp& a, const PseudoOp& f);
/// Y with F o Y = A, or nullopt.
std::optional<PseudoOp> left_divide(const PseudoOp& a, const PseudoOp& f);

/// Dense grid of scalar operators without inverse atoms.
class OpGrid {
 public:
  OpGrid() = default;
  OpGrid(RingPtr ring, std::size_t rows, std::size_t cols);
  static OpGrid from_rows(const RingPtr& ring, std::vector<std::vector<PseudoOp>> rows);
  static OpGrid identity(const RingPtr& ring, std::size_t n);

  const RingPtr& ring() const { return ring_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  PseudoOp& at(std::size_t i, std::size_t j) { return cells_[i * cols_ + j]; }
  const PseudoOp& at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
  bool is_zero() const;

  OpGrid operator-() const;
  OpGrid& operator+=(const OpGrid& o);
  friend OpGrid operator+(OpGrid a, const OpGrid& b) { return a += b; }
  friend OpGrid operator-(OpGrid a, const OpGrid& b) { return a += -b; }
  friend OpGrid operator*(const Rational& c, const OpGrid& a);
  friend bool operator==(const OpGrid& a, const OpGrid& b);

  OpGrid map_cells(const std::function<PseudoOp(const PseudoOp&)>& f, const RingPtr& target) const;

 private:
  RingPtr ring_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<PseudoOp> cells_;
};

OpGrid compose(const OpGrid& a, const OpGrid& b);
OpGrid adjoint(const OpGrid& a);

/// M0 inv[A1] M1 inv[A2] ... Mn with word-free grids M_k.
struct Word {
  std::vector<OpGrid> mats;
  std::vector<std::string> atoms;

  friend bool operator==(const Word&, const Word&) = default;
};

class InverseRegistry;

/// Matrix of pseudo-differential operators plus formal inverse words.
class MatrixOp {
 public:
  MatrixOp() = default;
  explicit MatrixOp(OpGrid plain) : plain_(std::move(plain)) {}
  MatrixOp(OpGrid plain, std::vector<Word> words);
  static MatrixOp scalar(const PseudoOp& op);
  static MatrixOp atom(const RingPtr& ring, const std::string& name, std::size_t dim);

  const RingPtr& ring() const { return plain_.ring(); }
  std::size_t rows() const { return plain_.rows(); }
  std::size_t cols() const { return plain_.cols(); }
  const OpGrid& plain() const { return plain_; }
  const std::vector<Word>& words() const { return words_; }
  bool has_words() const { return !words_.empty(); }
  bool is_zero() const { return plain_.is_zero() && words_.empty(); }
  const PseudoOp& at(std::size_t i, std::size_t j) const { return plain_.at(i, j); }

  MatrixOp operator-() const;
  MatrixOp& operator+=(const MatrixOp& o);
  friend MatrixOp operator+(MatrixOp a, const MatrixOp& b) { return a += b; }
  friend MatrixOp operator-(MatrixOp a, const MatrixOp& b) { return a += -b; }
  friend MatrixOp operator*(const Rational& c, const MatrixOp& a);

  MatrixOp map_grids(const std::function<OpGrid(const OpGrid&)>& f) const;

 private:
  OpGrid plain_;
  std::vector<Word> words_;
};

bool operator==(const MatrixOp& a, const MatrixOp& b);

/// Registered invertible operators and conjugation identities.
///
/// Populated during check setup and read-only afterwards.
class InverseRegistry {
 public:
  struct Conjugation {
    JetExpr left;
    JetExpr right;
    std::string result;  // A^{-1} = right o result^{-1} o left
  };

  void register_atom(const std::string& name, const OpGrid& forward);
  /// Verifies left o A o right = result, then records result as an atom and
  /// the rewriting of A^{-1}. Throws Error when the identity fails.
  void register_conjugation(const std::string& result_name, const std::string& atom,
                            const JetExpr& left, const JetExpr& right, const OpGrid& result);

  bool knows(const std::string& name) const { return forward_.count(name) != 0; }
  const OpGrid& forward(const std::string& name) const;
  const std::vector<Conjugation>& conjugations(const std::string& name) const;
  /// Name and sign of the atom representing (A^{-1})^*.
  std::pair<std::string, int> adjoint_atom(const std::string& name);

 private:
  std::map<std::string, OpGrid> forward_;
  std::map<std::string, std::vector<Conjugation>> conj_;
  std::map<std::string, std::pair<std::string, int>> adjoint_;
};

/// Composition. Words are simplified against the registry (cancellation and
/// conjugation) when one is supplied.
MatrixOp compose(const MatrixOp& a, const MatrixOp& b, InverseRegistry* reg = nullptr);
MatrixOp compose_chain(const std::vector<MatrixOp>& factors, InverseRegistry* reg = nullptr);
MatrixOp adjoint(const MatrixOp& a, InverseRegistry* reg = nullptr);
/// Cancel and merge words; words without atoms fold into the plain part.
MatrixOp simplify(const MatrixOp& a, InverseRegistry* reg);

}  // namespace jetcheck
