// Zero curvature, conservation and the reciprocal map, for the main system
// and the Appendix B system.

#include "check_util.hpp"
#include "jetcheck/system.hpp"

namespace jetcheck::detail {

namespace {

/// D_t U - D_x V + [U, V], with D_t taken before any reduction.
Grid zero_curvature(const Grid& U, const Grid& V, const SystemDef& sys, Reducer& red) {
  const std::size_t n = U.size();
  Grid UV = grid_mul(U, V), VU = grid_mul(V, U);
  Grid Z(n, std::vector<JetExpr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      JetExpr z = evolutionary_derivative(U[i][j].in_ring(sys.ring), sys) -
                  total_derivative(V[i][j].in_ring(sys.ring)) + UV[i][j] - VU[i][j];
      Z[i][j] = red.reduce(z.in_ring(sys.ring));
    }
  }
  return Z;
}

std::string lead_name(const RingPtr& r, Var v) {
  return r->name_of(v) + "_" + std::to_string(v.order());
}

std::vector<std::string> usage_notes(const Reducer& red, const RingPtr& r) {
  std::vector<std::string> out;
  const auto& rules = red.relations().rules();
  for (std::size_t k = 0; k < rules.size(); ++k) {
    std::size_t used = k < red.usage().size() ? red.usage()[k] : 0;
    out.push_back("rule " + lead_name(r, rules[k].lead) + " used " + std::to_string(used) + " times");
  }
  return out;
}

SubCheck zc_sub(const std::string& name, const Grid& U, const Grid& V, const SystemDef& sys,
                std::uint64_t seed, int max_order) {
  Reducer red(sys.constraints, max_order);
  SubCheck s = zero_sub(name, by_lambda("Z", zero_curvature(U, V, sys, red)), seed);
  s.notes = usage_notes(red, sys.ring);
  return s;
}

/// D_t(P) - 4 P D(c) - c D(P) for P = density^4 and dy = u dx + u c dt.
SubCheck conservation_sub(const std::string& name, const JetExpr& P, const JetExpr& c,
                          const SystemDef& sys, std::uint64_t seed, int max_order) {
  JetExpr p = P.in_ring(sys.ring), f = c.in_ring(sys.ring);
  JetExpr r = evolutionary_derivative(p, sys) - Rational(4) * p * total_derivative(f) -
              f * total_derivative(p);
  (void)max_order;
  return zero_sub(name, {{"D_t(P) - 4 P c_x - c P_x", r}}, seed);
}

/// x-side ring with the radical U = P^(1/4) adjoined.
struct RadicalSide {
  RingPtr ring;
  SystemDef sys;  // evolution of the source plus U
  RelationSet rels;
  JetExpr flux;
};

RadicalSide radical_side(const SystemDef& src, const JetExpr& P, const JetExpr& flux) {
  RadicalSide side;
  side.ring = Ring::extend(src.ring, {"U"});
  side.sys.name = src.name;
  side.sys.ring = side.ring;
  side.sys.constraints = RelationSet(side.ring);
  for (const auto& [dep, rhs] : src.evolution) side.sys.evolution[dep] = rhs.in_ring(side.ring);
  JetExpr p = P.in_ring(side.ring), U = jet(side.ring, "U");
  side.sys.evolve("U", Rational(1, 4) * U * evolutionary_derivative(p, side.sys) * p.inverse());
  side.rels = RelationSet(side.ring);
  side.rels.add(radical_rule(side.ring, "U", p));
  side.flux = flux.in_ring(side.ring);
  return side;
}

/// Pull back a y-expression in u, s to the radical ring: u -> U, s from the
/// w binding (w = c u^a s), D_y -> U^{-1} D_x.
JetExpr pull_back(const JetExpr& e, const Catalog& cat, const RingPtr& xr) {
  const RingPtr& ys = cat.ring("y.us");
  JetExpr wb = cat.binding("recip.substitution", "w");
  JetExpr s = jet(ys, "s");
  JetExpr rest = wb * s.inverse();
  if (!rest.is_monomial() || rest.terms()[0].mono.contains(ys->jet("s", 0))) {
    throw Error("w binding is not of the form c u^a s");
  }
  JetExpr U = jet(xr, "U");
  Substitution to_x(ys, xr);
  to_x.map("u", U).scale(U.inverse());
  JetExpr rest_x = to_x.apply(rest);
  to_x = Substitution(ys, xr);
  to_x.map("u", U).map("s", jet(xr, "w") * rest_x.inverse()).scale(U.inverse());
  return to_x.apply(e.in_ring(ys));
}

/// D_tau = D_t - c D_x applied to f, reduced by the U rule.
JetExpr d_tau(const JetExpr& f, const RadicalSide& side, Reducer& red) {
  JetExpr g = red.reduce(f);
  return red.reduce(evolutionary_derivative(g, side.sys) - side.flux * total_derivative(g));
}

Reciprocal to_y(const Catalog& cat, const RadicalSide& side, const RingPtr& y, const RelationSet& rels) {
  auto images = vw_images(cat);
  images.emplace_back("U", jet(y, "u"));
  return Reciprocal(side.ring, y, images, jet(y, "u"), rels);
}

std::vector<SubCheck> zc_main(CheckEnv& env) {
  const Catalog& c = env.cat;
  return {zc_sub("U_t - V_x + [U,V]", c.grid("cch.U"), c.grid("cch.V"), c.system("cch.system"), env.seed,
                 env.max_order)};
}

std::vector<SubCheck> zc_transformed(CheckEnv& env) {
  const Catalog& c = env.cat;
  SystemDef sys = c.system("md.system");
  Grid U = c.grid("md.U"), V = c.grid("md.V");
  std::vector<SubCheck> out{zc_sub("U_tau - V_y + [U,V]", U, V, sys, env.seed, env.max_order)};
  // Which constraints the compatibility actually needs.
  std::vector<std::string> notes;
  const auto& rules = sys.constraints.rules();
  for (std::size_t k = 0; k < rules.size(); ++k) {
    SystemDef partial = sys;
    partial.constraints = RelationSet(sys.ring);
    for (std::size_t l = 0; l < rules.size(); ++l) {
      if (l != k) partial.constraints.add(rules[l]);
    }
    Reducer red(partial.constraints, env.max_order);
    Grid Z = zero_curvature(U, V, partial, red);
    std::size_t nonzero = 0;
    for (const auto& [label, e] : by_lambda("Z", Z)) nonzero += e.is_zero() ? 0 : 1;
    notes.push_back("without rule " + lead_name(sys.ring, rules[k].lead) + ": " + std::to_string(nonzero) +
                    " nonzero residual components");
  }
  out.push_back(info("constraint usage", std::move(notes)));
  return out;
}

std::vector<SubCheck> conservation_main(CheckEnv& env) {
  const Catalog& c = env.cat;
  return {conservation_sub("closed 1-form", c.expr("cch.density4"), c.expr("cch.flux"),
                           c.system("cch.system"), env.seed, env.max_order),
          density_sub(c, c.expr("cch.density4"), env.seed)};
}

std::vector<SubCheck> reciprocal_main(CheckEnv& env) {
  const Catalog& c = env.cat;
  std::vector<SubCheck> out;
  SystemDef src = c.system("cch.system");
  RadicalSide side = radical_side(src, c.expr("cch.density4"), c.expr("cch.flux"));
  Reducer xred(side.rels, env.max_order);
  const RingPtr& y = c.ring("y.qrus");
  Reciprocal map = to_y(c, side, y, side.rels);

  SystemDef dst = c.system("recip.dst");
  Reducer yred(dst.constraints, env.max_order);
  const RingPtr& yd = dst.ring;
  Labeled res;
  for (const char* name : {"i", "j"}) {
    JetExpr fx = pull_back(c.expr(std::string("ij.") + name), c, side.ring);
    JetExpr mapped = map(d_tau(fx, side, xred)).in_ring(yd);
    JetExpr rhs = dst.evolution.at(yd->dependent_index(name));
    res.emplace_back(std::string(name) + "_tau", yred.reduce(mapped - rhs));
  }
  out.push_back(zero_sub("transformed flow", res, env.seed));
  out.push_back(density_sub(c, c.expr("cch.density4"), env.seed));

  // x constraints map to u times the y constraints.
  Labeled cres;
  const auto& yc = c.get("recip.dst").constraints;
  const auto& sc = c.get("cch.system").constraints;
  for (std::size_t k = 0; k < sc.size() && k < yc.size(); ++k) {
    JetExpr xres = map(sc[k].residual.in_ring(side.ring));
    JetExpr yres = yc[k].residual;
    cres.emplace_back("constraint " + sc[k].dep, xres.in_ring(yd) - jet(yd, "u") * yres);
  }
  if (sc.size() != yc.size()) throw Error("constraint counts differ");
  out.push_back(zero_sub("constraint equivalence", cres, env.seed));

  // i as Q1 = (wv)^e poly in the radical ring.
  out.push_back([&] {
    const RingPtr& rad = c.ring("x.radical");
    Rational e = c.expr("Q1.exponent").constant_term();
    Rational four_e = 4 * e;
    if (four_e.get_den() != 1) {
      return failing("i definition against Q1", {"exponent " + rational_to_string(e) + " is not a multiple of 1/4"});
    }
    JetExpr q1 = jet(rad, "U").pow(static_cast<int>(four_e.get_num().get_si())) * c.expr("Q1.poly");
    RelationSet rrels(rad);
    rrels.add(radical_rule(rad, "U", rename_into(c.expr("cch.density4"), rad)));
    auto images = vw_images(c);
    images.emplace_back("U", jet(c.ring("y.us"), "u"));
    Reciprocal rmap(rad, c.ring("y.us"), images, jet(c.ring("y.us"), "u"), rrels);
    return zero_sub("i definition against Q1", {{"Q1 - i", rmap(q1) - c.expr("ij.i")}}, env.seed);
  }());

  // (f, g) form of the transformed system.
  {
    SystemDef md = c.system("md.system");
    const RingPtr& fgr = md.ring;
    auto fg = std::vector<std::pair<std::string, JetExpr>>{{"f", c.binding("fg", "f")}, {"g", c.binding("fg", "g")}};
    for (auto& [n, v] : ij_images(c)) fg.emplace_back(n, v);
    Substitution sub(fgr, y);
    for (const auto& [n, v] : fg) sub.map(n, v.in_ring(y));
    Labeled r2;
    for (const char* name : {"i", "j"}) {
      JetExpr a = sub.apply(md.evolution.at(fgr->dependent_index(name))).in_ring(yd);
      r2.emplace_back(std::string(name) + "_tau", yred.reduce(a - dst.evolution.at(yd->dependent_index(name))));
    }
    for (const auto& con : c.get("md.system").constraints) {
      r2.emplace_back("constraint on " + con.dep, yred.reduce(sub.apply(con.residual).in_ring(yd)));
    }
    out.push_back(zero_sub("(f,g) reformulation", r2, env.seed));
  }
  return out;
}

// ---- Appendix B ------------------------------------------------------------------

std::vector<SubCheck> appendixB(CheckEnv& env) {
  const Catalog& c = env.cat;
  std::vector<SubCheck> out;
  SystemDef src = c.system("B.system");
  out.push_back(zc_sub("zero curvature (x,t)", c.grid("cch.U"), c.grid("B.V"), src, env.seed, env.max_order));
  out.push_back(conservation_sub("closed 1-form", c.expr("B.density4"), c.expr("B.flux"), src, env.seed,
                                 env.max_order));
  out.push_back(density_sub(c, c.expr("B.density4"), env.seed));

  // Reciprocal map: q, r eliminated through r_x and q_xx.
  RadicalSide side = radical_side(src, c.expr("B.density4"), c.expr("B.flux"));
  const auto& cons = c.get("B.system").constraints;
  if (cons.size() != 2) throw Error("B.system needs two constraints");
  JetExpr rv = cons[0].residual.in_ring(side.ring), rw = cons[1].residual.in_ring(side.ring);
  side.rels.add(solve_for(rv - rw, side.ring->jet("r", 1)));
  side.rels.add(solve_for(rv + rw, side.ring->jet("q", 2)));
  Reducer xred(side.rels, env.max_order);
  const RingPtr& y = c.ring("y.qrus");
  Reciprocal map = to_y(c, side, y, side.rels);
  SystemDef dst = c.system("B.dst");
  const RingPtr& yd = dst.ring;
  Labeled res;
  for (const auto& [name, def] : std::vector<std::pair<std::string, std::string>>{{"i", "B.i"}, {"j", "B.j"}}) {
    JetExpr fx = pull_back(c.expr(def), c, side.ring);
    JetExpr mapped = map(d_tau(fx, side, xred)).in_ring(yd);
    res.emplace_back(name + "_tau", mapped - dst.evolution.at(yd->dependent_index(name)));
  }
  out.push_back(zero_sub("transformed flow", res, env.seed));
  out.push_back(zero_sub("i, j definitions",
                         {{"i", c.expr("B.i") - c.expr("ij.i")}, {"j", c.expr("B.j") - c.expr("ij.j")}}, env.seed));

  // Transformed pair with i, j evolving by the transformed flow.
  const RingPtr& iu = c.ring("y.ijus");
  SystemDef tsys;
  tsys.name = "B.dst";
  tsys.ring = iu;
  tsys.constraints = RelationSet(iu);
  for (const char* name : {"i", "j"}) {
    tsys.evolve(name, rename_into(dst.evolution.at(yd->dependent_index(name)), iu));
  }
  Reducer none(tsys.constraints, env.max_order);
  Grid Z = zero_curvature(c.grid("B.tU"), c.grid("B.tV"), tsys, none);
  Substitution defs(iu, iu);
  defs.map("i", rename_into(c.expr("B.i"), iu)).map("j", rename_into(c.expr("B.j"), iu));
  out.push_back(zero_sub("zero curvature (y,tau)", by_lambda("Z", grid_map(Z, [&](const JetExpr& e) {
                                                                       return defs.apply(e);
                                                                     })),
                         env.seed));
  return out;
}

}  // namespace

void add_coupled_checks(std::vector<CheckInfo>& out) {
  out.push_back({"zc_main", "the system (\\ref{cubicCH}) which possesses the Lax representation",
                 "The 4x4 pair (U, V) is compatible exactly on solutions of the coupled CH system.",
                 "Compute D_t U - D_x V + [U,V] with D_t from the evolution, reduce v and w through their "
                 "constraints, and require every coefficient of every power of lambda to vanish.",
                 {"cch.U", "cch.V", "cch.system"},
                 {},
                 zc_main});
  out.push_back({"conservation_main", "implies a conservation law",
                 "(wv)^(1/4) dx + 2u(q r_x - q_x r) dt is closed on solutions.",
                 "With P = wv and u = P^(1/4), closedness is D_t P - 4 P c_x - c P_x = 0, which needs "
                 "nothing; the density must also be u^4 under the reciprocal substitution.",
                 {"cch.density4", "cch.flux", "cch.system:evolution", "recip.substitution"},
                 {},
                 conservation_main});
  out.push_back({"reciprocal_main", "the system (\\ref{cubicCH}) is transformed to",
                 "Under dy = u dx + u c dt the coupled CH system becomes the displayed (i, j) flow with the "
                 "two constraints, and then the (f, g) form.",
                 "Adjoin U = (wv)^(1/4) with its derivative rule, pull i and j back to x, apply D_t - c D_x, "
                 "map with D_x = u D_y, v = u^3/s, w = us and compare modulo the y constraints; check the "
                 "constraint correspondence, the Q1 form of i, and the (f, g) rewriting.",
                 {"cch.system", "cch.density4", "cch.flux", "recip.substitution", "ij.i", "ij.j", "recip.dst",
                  "Q1.poly", "Q1.exponent", "fg", "md.system"},
                 {},
                 reciprocal_main});
  out.push_back({"zc_transformed", "the compatibility of the transformed Lax pair",
                 "The transformed pair is compatible exactly on the (f, g) system with F1 = F2 = -1.",
                 "Compute U_tau - V_y + [U,V] with i, j evolving, reduce by F1 = -1 and F2 = -1 solved for "
                 "g_yyy and f_yyy, and record which constraint is needed.",
                 {"md.U", "md.V", "md.system"},
                 {},
                 zc_transformed});
  out.push_back({"appendixB", "is reciprocally transformed to",
                 "The Appendix B system has the stated Lax pair, closed 1-form, transformed flow and "
                 "transformed Lax pair.",
                 "Zero curvature in (x,t), closedness, the reciprocal map with r_x and q_xx eliminated, and "
                 "zero curvature of the transformed pair with i, j substituted.",
                 {"cch.U", "B.V", "B.system", "B.density4", "B.flux", "B.dst", "B.i", "B.j", "B.tU", "B.tV",
                  "recip.substitution"},
                 {},
                 appendixB});
}

}  // namespace jetcheck::detail
