// Spectral problems: the fourth-order scalar reduction, its factorizations
// and the connection with the negative flow.

#include "check_util.hpp"
#include "jetcheck/nonlocal.hpp"

namespace jetcheck::detail {

namespace {

using Images = std::vector<std::pair<std::string, JetExpr>>;

/// Square of h from a binding s = c u^a h^b with b = +-2.
JetExpr h_squared(const Catalog& c, const RingPtr& us) {
  const Entry& e = c.get("scalar.s_of_h");
  const RingPtr& uh = c.ring(e.ring);
  JetExpr b = c.binding("scalar.s_of_h", "s");
  if (!b.is_monomial()) throw Error("s binding is not a monomial");
  int k = b.terms()[0].mono.exponent(uh->jet("h", 0));
  if (k != 2 && k != -2) throw Error("s binding is not of the form c u^a h^(+-2)");
  JetExpr rest = b * jet(uh, "h").pow(-k);
  JetExpr rest_s = rename_into(rest, us);
  JetExpr s = jet(us, "s");
  // h^k = s / rest
  JetExpr hk = s * rest_s.inverse();
  return k == 2 ? hk : hk.inverse();
}

/// e(u, h) rewritten in (u, s) through h_y / h.
JetExpr to_s_form(const JetExpr& e, const Catalog& c, const RingPtr& us) {
  JetExpr ell = log_derivative_of_root(h_squared(c, us));
  Substitution rest(e.ring(), us);
  rest.map("u", jet(us, "u"));
  return through_log_derivative(e, "h", ell, rest);
}

MatrixOp scalar_L(const Catalog& c, const RingPtr& target, const JetExpr& m, const JetExpr& n) {
  return rename_into(c.op("scalar.L"), target, {{"m", m}, {"n", n}});
}

std::vector<SubCheck> scalar_reduction(CheckEnv& env) {
  const Catalog& c = env.cat;
  std::vector<SubCheck> out;
  const RingPtr& us = c.ring("y.us");
  const Grid& U = c.grid("cch.U");
  Images vw = vw_images(c);

  // Phi_x = [[0, I], [C, 0]] Phi.
  {
    Labeled shape;
    const RingPtr& x = U[0][0].ring();
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        bool in_c = i >= 2 && j < 2;
        if (in_c) continue;
        JetExpr want(x, (i < 2 && j == i + 2) ? 1 : 0);
        shape.emplace_back("U[" + std::to_string(i) + "," + std::to_string(j) + "]", U[i][j] - want);
      }
    }
    SubCheck s = zero_sub("block shape of U", shape, env.seed);
    if (s.status != Status::Pass) return {s};
  }
  JetExpr C[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) C[i][j] = rename_into(U[2 + i][j], us, vw);
  }
  JetExpr u = jet(us, "u");
  PseudoOp X = PseudoOp::d(us).left_mul(u);
  PseudoOp X2 = compose(X, X);
  auto second = [&](int k) { return X2 - PseudoOp::function(C[k][k]); };
  JetExpr lam_sq = lambda(us, 2);
  PseudoOp L4 = compose(compose(PseudoOp::function(lam_sq * C[1][0].inverse()), second(1)),
                        compose(PseudoOp::function(C[0][1].inverse()), second(0)));

  JetExpr m_s = to_s_form(c.expr("scalar.m_h"), c, us);
  JetExpr n_s = to_s_form(c.expr("scalar.n_h"), c, us);
  JetExpr g1_sq = substitute_square(c.expr("scalar.gauge_sq"), "h", h_squared(c, us));
  JetExpr g2_sq = rename_into(c.expr("twocomp.gauge_sq"), us).inverse();
  JetExpr l1 = log_derivative_of_root(g1_sq), l2 = log_derivative_of_root(g2_sq);
  MatrixOp L = scalar_L(c, us, m_s, n_s);
  out.push_back(op_equal("fourth-order operator", scalar(conjugate_by_gauge(L4, l1)), L, nullptr, env.seed));

  // Two-component form: original components are c1 phi and c2 psi.
  JetExpr r12;  // c1 / c2
  try {
    r12 = monomial_sqrt(g1_sq * g2_sq.inverse());
  } catch (const Error& e) {
    out.push_back(failing("two-component form",
                          {std::string("c1/c2 is not a rational monomial (") + e.what() +
                           "); the displayed operators have rational coefficients"}));
    return out;
  }
  JetExpr lam = lambda(us);
  PseudoOp phi_op = conjugate_by_gauge(second(0), l1).left_mul(r12 * lam * C[0][1].inverse());
  PseudoOp psi_op = conjugate_by_gauge(second(1), l2).left_mul(r12.inverse() * lam * C[1][0].inverse());
  const MatrixOp& phi = c.op("twocomp.phi");
  const MatrixOp& psi = c.op("twocomp.psi");
  {
    SubCheck a = op_equal("phi", scalar(phi_op), phi, nullptr, env.seed);
    SubCheck b = op_equal("psi", scalar(psi_op), psi, nullptr, env.seed);
    out.push_back(merged("two-component form", {a, b}));
  }
  out.push_back(op_equal("L = psi-operator o phi-operator", compose(psi, phi), L, nullptr, env.seed));

  // Rows of the transformed spatial matrix.
  {
    const Grid& Up = c.grid("md.U");
    Images ijm = ij_images(c);
    auto at = [&](int i, int j) { return rename_into(Up[i][j], us, ijm); };
    PseudoOp d2 = PseudoOp::d(us, 2), d = PseudoOp::d(us);
    PseudoOp row2 = d2 - d.left_mul(at(2, 2)) - PseudoOp::function(at(2, 0));
    PseudoOp row3 = d2 - d.left_mul(at(3, 3)) - PseudoOp::function(at(3, 1));
    SubCheck s = op_equal("phi", scalar(row2), phi, nullptr, env.seed);
    SubCheck t = op_equal("psi", scalar(row3), psi, nullptr, env.seed);
    Labeled lam_cells{{"U'[2,1] - lambda", at(2, 1) - lam}, {"U'[3,0] - lambda", at(3, 0) - lam}};
    SubCheck l = zero_sub("lambda", lam_cells, env.seed);
    Labeled top;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 4; ++j) {
        top.emplace_back("U'[" + std::to_string(i) + "," + std::to_string(j) + "]",
                         at(i, j) - JetExpr(us, j == i + 2 ? 1 : 0));
      }
    }
    SubCheck b = zero_sub("upper block [0, I]", top, env.seed);
    out.push_back(merged("rows of the transformed spatial matrix", {b, s, t, l}));
  }
  return out;
}

std::vector<SubCheck> factorizations(CheckEnv& env) {
  const Catalog& c = env.cat;
  std::vector<SubCheck> out;
  const RingPtr& ij = c.ring("y.ij");
  JetExpr m = c.expr("miura.m"), n = c.expr("miura.n");

  out.push_back(op_equal("second-order factors", compose(c.op("miura.left"), c.op("miura.right")),
                         scalar_L(c, ij, m, n), nullptr, env.seed));
  out.push_back(zero_sub("Omega", {{"m", c.binding("Omega", "m") - m}, {"n", c.binding("Omega", "n") - n}},
                         env.seed));

  // First-order factors in a1, b1.
  const RingPtr& ab = c.ring("y.ab");
  Images ij_ab{{"i", c.binding("miura.ij_ab", "i")}, {"j", c.binding("miura.ij_ab", "j")}};
  const auto& f = c.chain("miura.factors");
  if (f.size() != 4) throw Error("miura.factors needs four factors");
  MatrixOp L_ab = scalar_L(c, ab, rename_into(m, ab, ij_ab), rename_into(n, ab, ij_ab));
  out.push_back(op_equal("first-order factors", compose_chain(f), L_ab, nullptr, env.seed));
  {
    SubCheck a = op_equal("left pair", compose(f[0], f[1]), rename_into(c.op("miura.left"), ab, ij_ab), nullptr,
                          env.seed);
    SubCheck b = op_equal("right pair", compose(f[2], f[3]), rename_into(c.op("miura.right"), ab, ij_ab), nullptr,
                          env.seed);
    out.push_back(merged("pairwise products", {a, b}));
  }

  // a1, b1 in (u, h) recover i, j and m, n.
  const RingPtr& uh = c.ring("y.uh");
  Images abh{{"a1", c.expr("miura.a1")}, {"b1", c.expr("miura.b1")}};
  JetExpr i_h = rename_into(ij_ab[0].second, uh, abh), j_h = rename_into(ij_ab[1].second, uh, abh);
  Images s_h{{"s", c.binding("scalar.s_of_h", "s")}};
  out.push_back(zero_sub("i, j from a1, b1",
                         {{"i", i_h - rename_into(c.expr("ij.i"), uh, s_h)},
                          {"j", j_h - rename_into(c.expr("ij.j"), uh, s_h)}},
                         env.seed));
  Images ijh{{"i", i_h}, {"j", j_h}};
  out.push_back(zero_sub("m, n from a1, b1",
                         {{"m", rename_into(m, uh, ijh) - c.expr("scalar.m_h")},
                          {"n", rename_into(n, uh, ijh) - c.expr("scalar.n_h")}},
                         env.seed));
  return out;
}

std::vector<SubCheck> connecting_identity(CheckEnv& env) {
  const Catalog& c = env.cat;
  std::vector<SubCheck> out;
  const MatrixOp& G = c.op("connect.G");
  const MatrixOp& M = c.op("connect.M");
  out.push_back(op_equal("G as an operator on (F1, F2)", G, M, nullptr, env.seed));

  const RingPtr& fg = c.ring("y.ijfg");
  NonlocalContext ctx(fg, {}, nullptr, env.max_order);
  std::vector<JetExpr> F{c.expr("F1"), c.expr("F2")};
  MatrixOp Gf = rename_into(G, fg), Mf = rename_into(M, fg);
  std::vector<JetExpr> lhs = ctx.apply(Gf, F), rhs = ctx.apply(Mf, F);
  out.push_back(zero_sub("applied to (F1, F2)", {{"G1", ctx.reduce(lhs[0] - rhs[0])}, {"G2", ctx.reduce(lhs[1] - rhs[1])}},
                         env.seed));

  // On the constraints F1 = F2 = -1 of the reformulated system, G vanishes.
  SystemDef md = c.system("md.system");
  NonlocalContext on_md(md.ring, md.constraints, nullptr, env.max_order);
  std::vector<JetExpr> at_md = on_md.apply(rename_into(G, md.ring), {F[0].in_ring(md.ring), F[1].in_ring(md.ring)});
  Labeled g_md{{"G1", on_md.reduce(at_md[0])}, {"G2", on_md.reduce(at_md[1])}};
  SubCheck red = zero_sub("G = 0 on the constraints of the reformulated system", g_md, env.seed);
  bool decided = false;
  for (const auto& [label, e] : g_md) decided = decided || on_md.provably_nonzero(e);
  if (red.status == Status::Fail && !decided) {
    red.status = Status::Undecidable;
    red.notes.push_back("the residual involves integrals that are not shown independent");
  }
  out.push_back(std::move(red));

  bool exact = is_total_derivative(F[0] - F[1]);
  out.push_back(info("F1 - F2", {std::string("F1 - F2 is ") + (exact ? "" : "not ") +
                                 "a total derivative, so D^{-1}(F1 - F2) is " + (exact ? "local" : "nonlocal")}));
  return out;
}

}  // namespace

void add_spectral_checks(std::vector<CheckInfo>& out) {
  out.push_back({"scalar_reduction", "the spectral problem in (\\ref{lax1}) is transformed to",
                 "Under the reciprocal map and the gauge factors, the 4x4 spatial problem becomes the "
                 "fourth-order scalar problem and the two-component problem of the transformed Lax pair.",
                 "Map C to y with D_x = u D_y, eliminate psi, conjugate by the gauges, and compare with L(m, n) "
                 "after rewriting h through h_y/h; match the second-order rows of the transformed matrix.",
                 {"cch.U", "recip.substitution", "scalar.m_h", "scalar.n_h", "scalar.gauge_sq", "scalar.s_of_h",
                  "scalar.L", "twocomp.phi", "twocomp.psi", "twocomp.gauge_sq", "md.U", "ij.i", "ij.j"},
                 {},
                 scalar_reduction});
  out.push_back({"factorizations", "the operator $L$ can be factorized as",
                 "L factors into two second-order and four first-order operators; the Miura-type maps agree.",
                 "Compose normal forms; substitute a1, b1 in (u, h) and compare with the definitions of i, j, "
                 "m and n.",
                 {"scalar.L", "miura.left", "miura.right", "miura.m", "miura.n", "Omega", "miura.factors",
                  "miura.ij_ab", "miura.a1", "miura.b1", "ij.i", "ij.j", "scalar.s_of_h:scale", "scalar.m_h",
                  "scalar.n_h"},
                 {},
                 factorizations});
  out.push_back({"connecting_identity", "it is clear that the following identity holds",
                 "(G1, G2) is the displayed operator applied to (F1, F2), so the reformulated system, whose "
                 "constraints are F1 = F2 = -1, is a reduction of the negative flow G = 0.",
                 "Operator equality in normal form, then application to the explicit F1, F2 with shared "
                 "auxiliaries for D^{-1}(F1 - F2), once freely and once modulo the constraints.",
                 {"connect.G", "connect.M", "F1", "F2", "md.system:constraints"},
                 {},
                 connecting_identity});
}

}  // namespace jetcheck::detail
