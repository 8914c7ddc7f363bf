#pragma once

// Helpers shared by the check bodies; private to the library.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jetcheck/calculus.hpp"
#include "jetcheck/optext.hpp"
#include "jetcheck/serialize.hpp"
#include "jetcheck/transform.hpp"
#include "jetcheck/verify.hpp"

namespace jetcheck::detail {

using Labeled = std::vector<std::pair<std::string, JetExpr>>;
using Grid = std::vector<std::vector<JetExpr>>;

/// Pass iff every expression is zero. Nonzero residuals are confirmed at a
/// random point and serialized.
SubCheck zero_sub(const std::string& name, const Labeled& residuals, std::uint64_t seed);
/// Pass iff a - b simplifies to zero.
SubCheck op_equal(const std::string& name, const MatrixOp& a, const MatrixOp& b,
                  InverseRegistry* reg, std::uint64_t seed);
SubCheck info(const std::string& name, std::vector<std::string> notes);
SubCheck failing(const std::string& name, std::vector<std::string> residual);
/// One sub-check failing when any part fails; residuals keep the part names.
SubCheck merged(const std::string& name, const std::vector<SubCheck>& parts);
SubCheck undecidable(const std::string& name, const std::string& why);

/// Entries of a grid split by powers of the parameter lambda.
Labeled by_lambda(const std::string& label, const Grid& g);
Labeled cells(const std::string& label, const Grid& g);

Grid grid_add(const Grid& a, const Grid& b, const Rational& scale = 1);
Grid grid_mul(const Grid& a, const Grid& b);
Grid grid_map(const Grid& g, const std::function<JetExpr(const JetExpr&)>& f);
Grid grid_in_ring(const Grid& g, const RingPtr& r);
std::vector<JetExpr> grid_flat(const Grid& g);

/// Multiplication-operator grid of a function grid.
MatrixOp as_op(const Grid& g);
MatrixOp scalar(const PseudoOp& p);
MatrixOp scalar(const JetExpr& f);

/// m as a sum of chains whose factors are local grids, diagonal D^{-1} and
/// single inverse atoms (tails p D^{-1} q become L o D^{-1} o R).
std::vector<std::vector<MatrixOp>> split_terms(const MatrixOp& m);
/// Sum over the terms of m of left o term o right, each bracketed to close.
MatrixOp compose_through(const std::vector<MatrixOp>& left, const MatrixOp& m,
                         const std::vector<MatrixOp>& right, InverseRegistry* reg);

/// Dependent `name` at order k in ring r.
JetExpr jet(const RingPtr& r, const std::string& name, int k = 0);
JetExpr lambda(const RingPtr& r, int exponent = 1);

/// Square root of a monomial with even exponents. Throws Error otherwise.
JetExpr monomial_sqrt(const JetExpr& e);
/// Replace c^(2k) by image^k; any other occurrence of dep throws Error.
JetExpr substitute_square(const JetExpr& e, const std::string& dep, const JetExpr& image);
/// Logarithmic derivative D(c)/c of c given c^2.
JetExpr log_derivative_of_root(const JetExpr& c_sq);

/// The u,s images of i and j from the catalog.
std::vector<std::pair<std::string, JetExpr>> ij_images(const Catalog& cat);
/// v, w as functions of u, s.
std::vector<std::pair<std::string, JetExpr>> vw_images(const Catalog& cat);
/// P is u^4 under v, w -> functions of u, s.
SubCheck density_sub(const Catalog& cat, const JetExpr& P, std::uint64_t seed);

/// Rule U_x -> U D(P)/(4P) for U^4 = P in ring r.
Rule radical_rule(const RingPtr& r, const std::string& U, const JetExpr& P);

/// Numerical confirmation: nonzero at some seeded assignment.
bool numerically_nonzero(const JetExpr& e, std::uint64_t seed, int points = 4);

/// Sparse linear span of expressions over the rationals.
class LinearSpan {
 public:
  void add(const JetExpr& e);
  JetExpr remainder(const JetExpr& e) const;
  std::size_t dimension() const { return basis_.size(); }

 private:
  using Vec = std::map<Monomial, Rational>;
  void reduce(Vec& v) const;
  RingPtr ring_;
  std::map<Monomial, Vec> basis_;
};

/// Jet monomials in the given dependents of exact weight w, where dependent
/// k at order n weighs weights[k] + n, parameter lambda weighs lambda_weight
/// and may appear with exponents in [lambda_min, lambda_max].
std::vector<JetExpr> weighted_monomials(const RingPtr& r, const std::vector<std::string>& deps,
                                        const std::vector<int>& weights, int lambda_weight,
                                        int lambda_min, int lambda_max, int w);

/// Weight of a homogeneous expression; nullopt when inhomogeneous or zero.
std::optional<int> weight_of(const JetExpr& e, const std::map<std::uint32_t, int>& dep_weights,
                             int lambda_weight);

/// Check tables, one per source file.
void add_coupled_checks(std::vector<CheckInfo>& out);
void add_spectral_checks(std::vector<CheckInfo>& out);
void add_hamiltonian_checks(std::vector<CheckInfo>& out);
void add_appendix_checks(std::vector<CheckInfo>& out);

}  // namespace jetcheck::detail
