// Hamiltonian operators of the coupled system and their reciprocal images.

#include "check_util.hpp"
#include "jetcheck/calculus.hpp"
#include "jetcheck/dsl.hpp"
#include "jetcheck/nonlocal.hpp"

namespace jetcheck::detail {

namespace {

/// The radical ring (v, w, U) with U^4 = wv, and its map to (u, s).
struct RadicalMap {
  RingPtr x, y;
  JetExpr U, P4;
  RelationSet rels;
  Reducer red;
  Reciprocal Y;

  explicit RadicalMap(const Catalog& c)
      : x(c.ring("x.radical")),
        y(c.ring("y.us")),
        U(jet(x, "U")),
        P4(rename_into(c.expr("cch.density4"), x)),
        rels(make_rels(x, P4)),
        red(rels),
        Y(x, y, images(c, y), jet(y, "u"), rels) {}

  static RelationSet make_rels(const RingPtr& x, const JetExpr& P4) {
    RelationSet r(x);
    r.add(radical_rule(x, "U", P4));
    return r;
  }
  static std::vector<std::pair<std::string, JetExpr>> images(const Catalog& c, const RingPtr& y) {
    auto im = vw_images(c);
    im.emplace_back("U", jet(y, "u"));
    return im;
  }

  MatrixOp op(const MatrixOp& m) { return Y(rename_into(m, x)); }

  /// Frechet row in dep, with U differentiated through U^4 = P4.
  PseudoOp frechet(const JetExpr& e, const std::string& dep) {
    JetExpr f = red.reduce(e);
    if (f.max_order(x->dependent_index("U")) > 0) throw Error("U derivatives survive reduction");
    PseudoOp through_u = compose(PseudoOp::function(partial(f, x->jet("U")) * U * Rational(1, 4) * P4.inverse()),
                                 frechet_row(P4, dep));
    return frechet_row(f, dep) + through_u;
  }
};

struct OpCase {
  std::string label;
  MatrixOp lhs, rhs;
};

SubCheck ops_equal(const std::string& name, const std::vector<OpCase>& cases, InverseRegistry* reg,
                   std::uint64_t seed) {
  std::vector<SubCheck> parts;
  for (const auto& c : cases) parts.push_back(op_equal(c.label, c.lhs, c.rhs, reg, seed));
  return merged(name, parts);
}

SubCheck from_outcome(const std::string& name, const IdentityOutcome& o) {
  SubCheck s;
  s.name = name;
  s.decided_by = o.decided_by;
  s.status = o.verdict == Verdict::Pass   ? Status::Pass
             : o.verdict == Verdict::Fail ? Status::Fail
                                          : Status::Undecidable;
  s.residual = o.residual;
  s.notes = o.notes;
  if (o.numeric_total > 0) {
    s.notes.push_back("numeric agreement " + std::to_string(o.numeric_agree) + "/" +
                      std::to_string(o.numeric_total));
  }
  return s;
}

MatrixOp diag(const RingPtr& r, const JetExpr& a, const JetExpr& b) {
  return MatrixOp(OpGrid::from_rows(r, {{PseudoOp::function(a), PseudoOp::constant(r, 0)},
                                        {PseudoOp::constant(r, 0), PseudoOp::function(b)}}));
}

// ---- propositions ---------------------------------------------------------------

std::vector<SubCheck> prop1(CheckEnv& env) {
  const Catalog& c = env.cat;
  RadicalMap m(c);
  const RingPtr& x = m.x;
  JetExpr v = jet(x, "v"), w = jet(x, "w");
  PseudoOp E = c.op("E").at(0, 0).in_ring(c.ring("x.cch"));
  E = rename_into(E, x);
  auto conj = [&](const JetExpr& l, const JetExpr& r) {
    return scalar(m.Y(compose(compose(PseudoOp::function(l), E), PseudoOp::function(r))));
  };
  auto ij = ij_images(c);
  MatrixOp th = rename_into(c.op("Theta1"), m.y, ij);
  MatrixOp th_adj = rename_into(c.op("Theta1.adj_neg"), m.y, ij);
  return {
      density_sub(c, c.expr("cch.density4"), env.seed),
      ops_equal("v^{-1} E u w^{-1} = Theta1", {{"", conj(v.inverse(), m.U * w.inverse()), th}}, nullptr, env.seed),
      ops_equal("w^{-1} E u v^{-1} = -Theta1*", {{"", conj(w.inverse(), m.U * v.inverse()), th_adj}}, nullptr,
                env.seed),
      ops_equal("adjoint of Theta1", {{"", adjoint(c.op("Theta1")), -c.op("Theta1.adj_neg")}}, nullptr, env.seed),
  };
}

std::vector<SubCheck> prop2(CheckEnv& env) {
  const Catalog& c = env.cat;
  RadicalMap m(c);
  PseudoOp E = rename_into(c.op("E").at(0, 0), m.x);
  MatrixOp lhs = scalar(m.Y(compose(compose(PseudoOp::function(m.U.pow(-2)), E), PseudoOp::function(m.U.inverse()))));
  MatrixOp th = rename_into(c.op("Theta2"), m.y, ij_images(c));
  return {density_sub(c, c.expr("cch.density4"), env.seed),
          ops_equal("u^{-2} E u^{-1} = Theta2", {{"", lhs, th}}, nullptr, env.seed),
          ops_equal("Theta2 skew", {{"", adjoint(c.op("Theta2")), -c.op("Theta2")}}, nullptr, env.seed)};
}

// ---- theorem --------------------------------------------------------------------

std::vector<SubCheck> theorem1(CheckEnv& env) {
  const Catalog& c = env.cat;
  std::vector<SubCheck> out{density_sub(c, c.expr("cch.density4"), env.seed)};
  RadicalMap m(c);
  const RingPtr& x = m.x;
  const RingPtr& y = m.y;
  const std::string deps[2] = {"v", "w"};
  auto ij = ij_images(c);

  // Conserved densities Q_a = (wv)^e poly_a with (wv)^e = U^{4e}.
  JetExpr Q[2];
  {
    std::vector<std::string> bad;
    for (int a = 0; a < 2; ++a) {
      std::string stem = "Q" + std::to_string(a + 1);
      Rational e4 = 4 * c.expr(stem + ".exponent").constant_term();
      if (e4.get_den() != 1) {
        bad.push_back(stem + ": exponent is not a multiple of 1/4");
        continue;
      }
      Q[a] = m.red.reduce(m.U.pow(static_cast<int>(e4.get_num().get_si())) * c.expr(stem + ".poly"));
    }
    if (!bad.empty()) return {failing("Q exponents", bad)};
  }
  JetExpr Qy[2] = {m.Y(Q[0]), m.Y(Q[1])};
  out.push_back(zero_sub("Q1, Q2 map to i, j", {{"Q1 - i", Qy[0] - ij[0].second}, {"Q2 - j", Qy[1] - ij[1].second}},
                         env.seed));

  // P' and Q' with P = D^{-1} of the density.
  JetExpr DxP = c.expr("P.density");
  PseudoOp Pp[2], Qp[2][2];
  for (int b = 0; b < 2; ++b) {
    Pp[b] = compose(PseudoOp::dinv(x), m.frechet(DxP, deps[b]));
    for (int a = 0; a < 2; ++a) Qp[a][b] = m.frechet(Q[a], deps[b]);
  }
  out.push_back(ops_equal("P' displays",
                          {{"P'_v", scalar(m.Y(Pp[0])), c.op("Pv")},
                           {"P'_w", scalar(m.Y(Pp[1])), c.op("Pw")},
                           {"P'*_v", scalar(m.Y(adjoint(Pp[0]))), c.op("Pv.adj")},
                           {"P'*_w", scalar(m.Y(adjoint(Pp[1]))), c.op("Pw.adj")}},
                          nullptr, env.seed));
  std::vector<OpCase> qcases, qadj;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      std::string id = "Q" + std::to_string(a + 1) + deps[b];
      qcases.push_back({id, scalar(m.Y(Qp[a][b])), c.op(id)});
      qadj.push_back({id + ".adj_DxP", scalar(m.Y(adjoint(Qp[a][b]).right_mul(DxP))), c.op(id + ".adj_DxP")});
    }
  }
  out.push_back(ops_equal("Q' displays", qcases, nullptr, env.seed));
  out.push_back(ops_equal("Q'*(D_x P) displays", qadj, nullptr, env.seed));

  // T1 = Q_y P' - Q', rows indexed by Q, columns by v, w.
  std::vector<std::vector<PseudoOp>> t1(2, std::vector<PseudoOp>(2));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) t1[a][b] = m.Y(Pp[b]).left_mul(total_derivative(Qy[a])) - m.Y(Qp[a][b]);
  }
  const MatrixOp& T1 = c.op("T1");
  const MatrixOp& T2 = c.op("T2");
  out.push_back(ops_equal("T1 recomputed", {{"T1", MatrixOp(OpGrid::from_rows(y, t1)), T1}}, nullptr, env.seed));

  // T2 = Q'* o D_x P - P'* o D_x Q; the other reading multiplies on the left.
  std::vector<std::vector<PseudoOp>> right(2, std::vector<PseudoOp>(2)), left = right;
  for (int a = 0; a < 2; ++a) {
    JetExpr DxQ = m.red.reduce(total_derivative(Q[a]));
    for (int b = 0; b < 2; ++b) {
      right[b][a] = m.Y(adjoint(Qp[a][b]).right_mul(DxP) - adjoint(Pp[b]).right_mul(DxQ));
      left[b][a] = m.Y(adjoint(Qp[a][b]).left_mul(DxP) - adjoint(Pp[b]).left_mul(DxQ));
    }
  }
  MatrixOp T2left(OpGrid::from_rows(y, left));
  SubCheck t2 = ops_equal("T2 recomputed", {{"T2", MatrixOp(OpGrid::from_rows(y, right)), T2}}, nullptr, env.seed);
  t2.notes.push_back(std::string("reading Q'* o (D_x P), composition on the right; the left-multiplication "
                                 "reading ") +
                     (simplify(T2left - T2, nullptr).is_zero() ? "also matches" : "does not match"));
  out.push_back(std::move(t2));

  // Factored forms through Lambda.
  JetExpr v = rename_into(c.binding("recip.substitution", "v"), y);
  JetExpr w = rename_into(c.binding("recip.substitution", "w"), y);
  JetExpr u = jet(y, "u");
  MatrixOp Lam = rename_into(c.op("Lambda"), y, ij);
  MatrixOp D1 = diag(y, v.inverse(), w.inverse()), D2 = diag(y, u * v.inverse(), u * w.inverse());
  out.push_back(ops_equal("factored forms",
                          {{"T1 = Lambda D1/4", T1, Rational(1, 4) * compose(Lam, D1)},
                           {"T2 = -D2 Lambda*/4", T2, Rational(-1, 4) * compose(D2, adjoint(Lam))}},
                          nullptr, env.seed));

  // -T1 J1 T2 against the displayed quadratic operator.
  InverseRegistry reg;
  MatrixOp Ey = m.op(c.op("E"));
  reg.register_atom("E", Ey.plain());
  MatrixOp th2 = rename_into(c.op("Theta2"), y, ij);
  bool conj_ok = true;
  try {
    reg.register_conjugation("Theta2", "E", u.pow(-2), u.inverse(), th2.plain());
  } catch (const Error& e) {
    conj_ok = false;
    out.push_back(failing("-T1 J1 T2 = J2t", {e.what()}));
  }
  MatrixOp J2t = rename_into(c.op("J2t"), y, ij);
  if (conj_ok) {
    MatrixOp J1y = m.op(c.op("J1"));
    try {
      MatrixOp lhs = compose_through({-T1}, J1y, {T2}, &reg);
      out.push_back(ops_equal("-T1 J1 T2 = J2t", {{"", lhs, J2t}}, &reg, env.seed));
    } catch (const NonClosedComposition& e) {
      IdentityOptions io;
      io.registry = &reg;
      io.seed = env.seed;
      io.max_order = env.max_order;
      io.allow_normal_form = false;
      SubCheck s = from_outcome("-T1 J1 T2 = J2t", verify_operator_identity({-T1, J1y, T2}, {J2t}, io));
      s.notes.push_back(std::string("normal form not closed: ") + e.what());
      out.push_back(std::move(s));
    }
  }
  out.push_back(ops_equal("J2t factored", {{"", c.op("J2t.factored"), c.op("J2t")}}, nullptr, env.seed));
  out.push_back(ops_equal("J2t skew", {{"", adjoint(c.op("J2t")), -c.op("J2t")}}, nullptr, env.seed));

  // -T1 J2 T2 = (1/16) Lambda (D1 J2 D2) Lambda* against the displayed chain.
  MatrixOp J2y = m.op(c.op("J2"));
  std::vector<MatrixOp> j1t;
  for (const auto& f : c.chain("J1t")) j1t.push_back(rename_into(f, y, ij));
  if (j1t.size() != 3) throw Error("J1t chain must have three factors");
  out.push_back(ops_equal("J1t outer factors",
                          {{"left", j1t[0], Rational(-1, 16) * Lam}, {"right", j1t[2], adjoint(Lam)}}, nullptr,
                          env.seed));
  out.push_back(ops_equal("middle factor D1 J2 D2", {{"", compose_chain({D1, J2y, D2}), -j1t[1]}}, nullptr, env.seed));
  IdentityOptions io;
  io.seed = env.seed;
  io.max_order = env.max_order;
  out.push_back(from_outcome("-T1 J2 T2 = J1t", verify_operator_identity({-T1, J2y, T2}, j1t, io)));

  out.push_back(info("pairing", {"-T1 J1 T2 yields the displayed J2t and -T1 J2 T2 the displayed J1t"}));
  return out;
}

// ---- bi-Hamiltonian form in x ---------------------------------------------------------

std::vector<SubCheck> bihamiltonian_x(CheckEnv& env) {
  const Catalog& c = env.cat;
  std::vector<SubCheck> out;
  SystemDef sys = c.system("cch.system");
  const RingPtr& x = sys.ring;
  InverseRegistry reg;
  reg.register_atom("E", c.op("E").plain());

  // Gradient with r = E^{-1} v and q = E^{-1} w eliminated:
  // grad = (E_v - E^{-1} E_r, E_w - E^{-1} E_q) since E is skew.
  // A = [1, 0, -inv[E], 0; 0, 1, 0, -inv[E]]
  DslEnv denv{x, {}, {}, &reg};
  MatrixOp A = parse_operator("[1, 0, 0, 0; 0, 1, 0, 0]", denv);
  for (const auto& [col, sel] : {std::pair{"[-1; 0]", "[0, 0, 1, 0]"}, std::pair{"[0; -1]", "[0, 0, 0, 1]"}}) {
    A = A + compose_chain({parse_operator(col, denv), MatrixOp::atom(x, "E", 1), parse_operator(sel, denv)}, &reg);
  }
  auto grad = [&](const JetExpr& h) {
    std::vector<JetExpr> g;
    for (const char* d : {"v", "w", "r", "q"}) g.push_back(euler_derivative(h, d));
    return g;
  };

  Labeled res;
  bool opaque = false, decided = false;
  for (const auto& [label, J, H] : std::vector<std::tuple<std::string, std::string, std::string>>{
           {"J2 grad H0", "J2", "H0"}, {"J1 grad H1", "J1", "H1"}}) {
    NonlocalContext ctx(x, sys.constraints, &reg, env.max_order);
    std::vector<JetExpr> flow = ctx.apply(c.op(J), ctx.apply(A, grad(c.expr(H))));
    for (std::size_t k = 0; k < 2; ++k) {
      JetExpr rhs = ctx.reduce(sys.evolution.at(x->dependent_index(k ? "w" : "v")));
      JetExpr d = ctx.reduce(flow[k] - rhs);
      opaque = opaque || ctx.has_opaque(d);
      decided = decided || ctx.provably_nonzero(d);
      res.emplace_back(label + (k ? " w" : " v"), d);
    }
  }
  SubCheck flows = zero_sub("flows", res, env.seed);
  if (flows.status == Status::Fail && opaque && !decided) {
    flows.status = Status::Undecidable;
    flows.notes.push_back("an inverse of E has no local preimage");
  }
  out.push_back(std::move(flows));

  Reducer red(sys.constraints, env.max_order);
  std::vector<std::string> trivial;
  for (const char* H : {"H0", "H1"}) {
    if (is_total_derivative(red.reduce(c.expr(H)))) {
      trivial.push_back(std::string(H) + " is a total derivative on the constraints");
    }
  }
  out.push_back(trivial.empty() ? zero_sub("Hamiltonians are not total derivatives", {}, env.seed)
                                : failing("Hamiltonians are not total derivatives", trivial));
  return out;
}

}  // namespace

void add_hamiltonian_checks(std::vector<CheckInfo>& out) {
  out.push_back({"prop1", "Let $\\Theta_1={\\cal U}^{*}{\\cal E}{\\cal U}$",
                 "v^{-1} E u w^{-1}, mapped to y, is the displayed third-order operator in i, j, and the "
                 "mirrored product is minus its adjoint.",
                 "Compose in the radical ring, reduce U_x, map with D_x = u D_y and compare with the displays "
                 "expanded through the definitions of i and j.",
                 {"E", "cch.density4", "recip.substitution", "ij.i", "ij.j", "Theta1", "Theta1.adj_neg"},
                 {},
                 prop1});
  out.push_back({"prop2", "Let $\\Theta_2={\\cal V}^{*}{\\cal E}{\\cal V}$",
                 "u^{-2} E u^{-1}, mapped to y, is the displayed skew operator Theta2.",
                 "Same pipeline as prop1.",
                 {"E", "cch.density4", "recip.substitution", "ij.i", "ij.j", "Theta2"},
                 {},
                 prop2});
  out.push_back({"theorem1", "Under the reciprocal transformation",
                 "The Jacobian operators T1, T2 recomputed from P, Q1, Q2 match the displays, and they carry "
                 "the two Hamiltonian operators of the coupled system to the displayed pair in i, j.",
                 "Recompute P', Q', T1 and T2 in the radical ring; check the Lambda factorization; compose "
                 "-T1 J1 T2 with E^{-1} rewritten through the Theta2 conjugation; reduce -T1 J2 T2 to a "
                 "local middle factor and confirm with test vectors.",
                 {"E", "J1", "J2", "cch.density4", "recip.substitution", "ij.i", "ij.j", "P.density", "Q1.poly",
                  "Q1.exponent", "Q2.poly", "Q2.exponent", "Pv", "Pw", "Pv.adj", "Pw.adj", "Q1v", "Q1w", "Q2v",
                  "Q2w", "Q1v.adj_DxP", "Q1w.adj_DxP", "Q2v.adj_DxP", "Q2w.adj_DxP", "T1", "T2", "Lambda",
                  "Theta2", "J1t", "J2t", "J2t.factored"},
                 {"prop1", "prop2"},
                 theorem1});
  out.push_back({"bihamiltonian_x", "the system (\\ref{cubicCH}) can be written as",
                 "J2 grad H0 and J1 grad H1 both give the coupled CH flow.",
                 "Gradients account for r = E^{-1} v and q = E^{-1} w; E^{-1} is applied through local "
                 "preimages modulo the constraints.",
                 {"E", "J1", "J2", "H0", "H1", "cch.system"},
                 {},
                 bihamiltonian_x});
}

}  // namespace jetcheck::detail
