#include "jetcheck/catalog.hpp"

#include <functional>

#include "jetcheck/dsl.hpp"
#include "jetcheck/optext.hpp"
#include "jetcheck/serialize.hpp"

namespace jetcheck {

std::string to_string(EntryKind k) {
  switch (k) {
    case EntryKind::Expr: return "expr";
    case EntryKind::Grid: return "grid";
    case EntryKind::Operator: return "operator";
    case EntryKind::Chain: return "chain";
    case EntryKind::Bindings: return "bindings";
    case EntryKind::System: return "system";
  }
  return "?";
}

namespace {

std::vector<std::string> split(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, p - start));
    start = p + sep.size();
  }
}

std::string grid_text(const std::vector<std::vector<JetExpr>>& g) {
  std::string s = "[";
  for (std::size_t i = 0; i < g.size(); ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < g[i].size(); ++j) s += (j ? ", " : "") + to_prefix(g[i][j]);
    s += "]";
  }
  return s + "]";
}

std::vector<std::vector<JetExpr>> parse_expr_grid(std::string_view text, const RingPtr& ring) {
  if (text.size() < 4 || text.substr(0, 2) != "[[" || text.substr(text.size() - 2) != "]]") {
    throw ParseError("malformed expression grid");
  }
  std::vector<std::vector<JetExpr>> g;
  for (const auto& row : split(text.substr(2, text.size() - 4), "], [")) {
    std::vector<JetExpr> r;
    for (const auto& cell : split(row, ", ")) r.push_back(parse_prefix(cell, ring));
    g.push_back(std::move(r));
  }
  return g;
}

// Every coefficient-bearing expression of an entry, in a fixed order.
void visit(Entry& e, const std::function<JetExpr(const JetExpr&)>& f) {
  auto op_map = [&](const MatrixOp& m) {
    const RingPtr& r = m.ring();
    auto cell = [&](const PseudoOp& a) {
      return a.map(f, r, PseudoOp::d(r), JetExpr(r, 1));
    };
    return m.map_grids([&](const OpGrid& g) { return g.map_cells(cell, r); });
  };
  switch (e.kind) {
    case EntryKind::Expr: e.expr = f(e.expr); break;
    case EntryKind::Grid:
      for (auto& row : e.grid) {
        for (auto& c : row) c = f(c);
      }
      break;
    case EntryKind::Operator: e.op = op_map(e.op); break;
    case EntryKind::Chain:
      for (auto& m : e.chain) m = op_map(m);
      break;
    case EntryKind::Bindings:
    case EntryKind::System:
      for (auto& [n, v] : e.bindings) v = f(v);
      for (auto& c : e.constraints) c.residual = f(c.residual);
      break;
  }
}

}  // namespace

std::string serialize(const Entry& e) {
  switch (e.kind) {
    case EntryKind::Expr: return to_prefix(e.expr);
    case EntryKind::Grid: return grid_text(e.grid);
    case EntryKind::Operator: return to_text(e.op);
    case EntryKind::Chain: {
      std::string s;
      for (std::size_t k = 0; k < e.chain.size(); ++k) s += (k ? " | " : "") + to_text(e.chain[k]);
      return s;
    }
    case EntryKind::Bindings: {
      std::string s;
      for (std::size_t k = 0; k < e.bindings.size(); ++k) {
        s += (k ? "; " : "") + e.bindings[k].first + " := " + to_prefix(e.bindings[k].second);
      }
      return s;
    }
    case EntryKind::System: {
      std::string s;
      for (const auto& [n, v] : e.bindings) s += (s.empty() ? "" : "; ") + n + "_t = " + to_prefix(v);
      for (const auto& c : e.constraints) {
        s += "; " + c.dep + "_" + std::to_string(c.order) + " : " + to_prefix(c.residual);
      }
      return s;
    }
  }
  return {};
}

Entry parse_value(const Entry& shape, std::string_view text, const RingPtr& ring) {
  Entry e = shape;
  switch (e.kind) {
    case EntryKind::Expr: e.expr = parse_prefix(text, ring); break;
    case EntryKind::Grid: e.grid = parse_expr_grid(text, ring); break;
    case EntryKind::Operator: e.op = parse_matrix_op(text, ring); break;
    case EntryKind::Chain:
      e.chain.clear();
      for (const auto& part : split(text, " | ")) e.chain.push_back(parse_matrix_op(part, ring));
      break;
    case EntryKind::Bindings:
      e.bindings.clear();
      for (const auto& part : split(text, "; ")) {
        auto kv = split(part, " := ");
        if (kv.size() != 2) throw ParseError("malformed binding: " + part);
        e.bindings.emplace_back(kv[0], parse_prefix(kv[1], ring));
      }
      break;
    case EntryKind::System:
      e.bindings.clear();
      e.constraints.clear();
      for (const auto& part : split(text, "; ")) {
        if (auto ev = split(part, "_t = "); ev.size() == 2) {
          e.bindings.emplace_back(ev[0], parse_prefix(ev[1], ring));
          continue;
        }
        auto kv = split(part, " : ");
        auto us = kv[0].rfind('_');
        if (kv.size() != 2 || us == std::string::npos) throw ParseError("malformed system part: " + part);
        e.constraints.push_back(
            {kv[0].substr(0, us), std::stoi(kv[0].substr(us + 1)), parse_prefix(kv[1], ring)});
      }
      break;
  }
  return e;
}

// ---- catalog access ---------------------------------------------------------

const Catalog& Catalog::builtin() {
  static const Catalog c(build());
  return c;
}

const RingPtr& Catalog::ring(std::string_view name) const {
  auto it = data_->rings.find(name);
  if (it == data_->rings.end()) throw UnknownName("unknown ring: " + std::string(name));
  return it->second;
}

bool Catalog::contains(std::string_view id) const { return data_->position.count(id) != 0; }

const Entry& Catalog::get(std::string_view id) const {
  auto it = data_->position.find(id);
  if (it == data_->position.end()) throw UnknownName("unknown catalog entry: " + std::string(id));
  return data_->entries[it->second];
}

std::vector<std::pair<std::string, std::string>> Catalog::index() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : data_->entries) out.emplace_back(e.id, e.citation);
  return out;
}

namespace {

const Entry& of_kind(const Entry& e, EntryKind k) {
  if (e.kind != k) {
    throw Error("catalog entry " + e.id + " is a " + to_string(e.kind) + ", not a " + to_string(k));
  }
  return e;
}

}  // namespace

const JetExpr& Catalog::expr(std::string_view id) const { return of_kind(get(id), EntryKind::Expr).expr; }

const std::vector<std::vector<JetExpr>>& Catalog::grid(std::string_view id) const {
  return of_kind(get(id), EntryKind::Grid).grid;
}

const MatrixOp& Catalog::op(std::string_view id) const { return of_kind(get(id), EntryKind::Operator).op; }

const std::vector<MatrixOp>& Catalog::chain(std::string_view id) const {
  return of_kind(get(id), EntryKind::Chain).chain;
}

JetExpr Catalog::binding(std::string_view id, std::string_view name) const {
  for (const auto& [n, v] : of_kind(get(id), EntryKind::Bindings).bindings) {
    if (n == name) return v;
  }
  throw UnknownName("entry " + std::string(id) + " binds no " + std::string(name));
}

SystemDef Catalog::system(std::string_view id) const {
  const Entry& e = of_kind(get(id), EntryKind::System);
  SystemDef s;
  s.name = e.id;
  s.ring = ring(e.ring);
  s.citation = e.citation;
  s.constraints = RelationSet(s.ring);
  for (const auto& [n, v] : e.bindings) s.evolve(n, v);
  for (const auto& c : e.constraints) {
    try {
      s.constraints.add(solve_for(c.residual, s.ring->jet(c.dep, c.order)));
    } catch (const InvalidRelation& err) {
      throw MalformedInput(std::string(id) + ": " + err.what());
    }
  }
  return s;
}

Catalog Catalog::with_entry(Entry e) const {
  const Entry& old = get(e.id);
  if (old.kind != e.kind || old.ring != e.ring) throw Error("replacement changes the shape of " + e.id);
  auto d = std::make_shared<Data>(*data_);
  d->entries[d->position.at(e.id)] = std::move(e);
  return Catalog(std::move(d));
}

std::size_t Catalog::coefficient_sites(std::string_view id) const {
  Entry e = get(id);
  std::size_t n = 0;
  visit(e, [&](const JetExpr& x) {
    n += x.size();
    return x;
  });
  return n;
}

std::size_t Catalog::evolution_sites(std::string_view id) const {
  Entry e = get(id);
  if (e.kind != EntryKind::System) throw Error(std::string(id) + " is not a system");
  e.constraints.clear();
  std::size_t n = 0;
  visit(e, [&](const JetExpr& x) {
    n += x.size();
    return x;
  });
  return n;
}

Catalog Catalog::mutated(std::string_view id, std::size_t site, const Rational& delta) const {
  Entry e = get(id);
  std::size_t seen = 0;
  bool done = false;
  visit(e, [&](const JetExpr& x) {
    if (done || site >= seen + x.size()) {
      seen += x.size();
      return x;
    }
    std::vector<Term> terms(x.terms().begin(), x.terms().end());
    terms[site - seen].coeff += delta;
    done = true;
    seen += x.size();
    return JetExpr(x.ring(), std::move(terms));
  });
  if (!done) throw Error("mutation site out of range for " + std::string(id));
  return with_entry(std::move(e));
}

// ---- transcription ------------------------------------------------------------

namespace {

class Builder {
 public:
  std::map<std::string, RingPtr, std::less<>> rings;
  std::vector<Entry> entries;

  void ring(const std::string& name, RingPtr r, const std::string& parent = "") {
    rings[name] = r;
    envs_[name] = DslEnv{r, {}, {}, &registry_};
    if (!parent.empty()) parent_[name] = parent;
  }

  // Macros visible in a ring: its own and those of its ancestors.
  DslEnv env(const std::string& ring) {
    DslEnv e = envs_.at(ring);
    for (auto p = parent_.find(ring); p != parent_.end(); p = parent_.find(p->second)) {
      const DslEnv& up = envs_.at(p->second);
      e.functions.insert(up.functions.begin(), up.functions.end());
      e.operators.insert(up.operators.begin(), up.operators.end());
    }
    return e;
  }

  void function_macro(const std::string& ring, const std::string& name, const JetExpr& f) {
    envs_.at(ring).functions[name] = f;
  }
  void operator_macro(const std::string& ring, const std::string& name, const MatrixOp& m) {
    envs_.at(ring).operators[name] = m;
  }

  JetExpr fn(const std::string& ring, const std::string& text) {
    return parse_function(text, env(ring));
  }
  MatrixOp op(const std::string& ring, const std::string& text) {
    return parse_operator(text, env(ring));
  }

  const JetExpr& expr(const std::string& id, const std::string& ring, const std::string& cite,
                      const std::string& text, const std::string& macro = "") {
    Entry e = start(id, ring, cite, EntryKind::Expr);
    e.expr = fn(ring, text);
    if (!macro.empty()) function_macro(ring, macro, e.expr);
    return push(std::move(e)).expr;
  }

  void grid(const std::string& id, const std::string& ring, const std::string& cite,
            const std::string& text, const std::string& macro = "") {
    Entry e = start(id, ring, cite, EntryKind::Grid);
    MatrixOp m = op(ring, text);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::vector<JetExpr> row;
      for (std::size_t j = 0; j < m.cols(); ++j) {
        const PseudoOp& c = m.at(i, j);
        row.push_back(c.is_zero() ? JetExpr(rings[ring]) : c.as_function());
      }
      e.grid.push_back(std::move(row));
    }
    if (!macro.empty()) operator_macro(ring, macro, m);
    push(std::move(e));
  }

  const MatrixOp& oper(const std::string& id, const std::string& ring, const std::string& cite,
                       const std::string& text, const std::string& macro = "") {
    Entry e = start(id, ring, cite, EntryKind::Operator);
    e.op = op(ring, text);
    if (!macro.empty()) operator_macro(ring, macro, e.op);
    return push(std::move(e)).op;
  }

  void chain(const std::string& id, const std::string& ring, const std::string& cite,
             const std::vector<std::string>& texts) {
    Entry e = start(id, ring, cite, EntryKind::Chain);
    for (const auto& t : texts) e.chain.push_back(op(ring, t));
    push(std::move(e));
  }

  void bindings(const std::string& id, const std::string& ring, const std::string& cite,
                const std::vector<std::pair<std::string, std::string>>& items, bool macros) {
    Entry e = start(id, ring, cite, EntryKind::Bindings);
    for (const auto& [n, t] : items) {
      e.bindings.emplace_back(n, fn(ring, t));
      if (macros) function_macro(ring, n, e.bindings.back().second);
    }
    push(std::move(e));
  }

  struct Eq {
    std::string dep;
    int order;
    std::string lhs, rhs;
  };

  void system(const std::string& id, const std::string& ring, const std::string& cite,
              const std::vector<std::pair<std::string, std::string>>& evolution,
              const std::vector<Eq>& constraints) {
    Entry e = start(id, ring, cite, EntryKind::System);
    for (const auto& [n, t] : evolution) e.bindings.emplace_back(n, fn(ring, t));
    for (const auto& c : constraints) {
      e.constraints.push_back({c.dep, c.order, fn(ring, c.lhs) - fn(ring, c.rhs)});
    }
    push(std::move(e));
  }

  void register_atom(const std::string& name, const std::string& ring, const std::string& text) {
    registry_.register_atom(name, op(ring, text).plain());
  }

 private:
  Entry start(const std::string& id, const std::string& ring, const std::string& cite,
              EntryKind kind) {
    if (!rings.count(ring)) throw Error("catalog entry " + id + " in unknown ring " + ring);
    Entry e;
    e.id = id;
    e.ring = ring;
    e.citation = cite;
    e.kind = kind;
    return e;
  }

  const Entry& push(Entry e) {
    for (const auto& x : entries) {
      if (x.id == e.id) throw Error("duplicate catalog id " + e.id);
    }
    entries.push_back(std::move(e));
    return entries.back();
  }

  std::map<std::string, DslEnv> envs_;
  std::map<std::string, std::string> parent_;
  InverseRegistry registry_;
};

void coupled_system(Builder& b) {
  const std::string x = "x.cch";
  b.system("cch.system", x, "v_t=2v_x(qr_x-q_xr)+2v(3qr_{xx}-q_{xx}r-q_xr_x-qr)",
           {{"v", "2*v_x*(q*r_x - q_x*r) + 2*v*(3*q*r_xx - q_xx*r - q_x*r_x - q*r)"},
            {"w", "2*w_x*(q*r_x - q_x*r) - 2*w*(3*q_xx*r - q*r_xx - q_x*r_x - q*r)"}},
           {{"v", 0, "v", "r_xxx - r_x"}, {"w", 0, "w", "q_xxx - q_x"}});
  b.grid("cch.U", x, "\\frac{1}{4} & \\lambda v & 0 & 0",
         "[0, 0, 1, 0; 0, 0, 0, 1; 1/4, lambda*v, 0, 0; lambda*w, 1/4, 0, 0]");
  b.expr("cch.k1", x, "k_1=\\frac{1}{2\\lambda^2}+q_xr_x+qr", "1/(2*lambda^2) + q_x*r_x + q*r", "k1");
  b.expr("cch.k2", x, "k_2=\\frac{1}{2}(qr_x-q_xr)", "1/2*(q*r_x - q_x*r)", "k2");
  b.grid("cch.V", x, "2q_{xx}r-k_1 & \\frac{r_x}{\\lambda}&4k_2 & -\\frac{2r}{\\lambda}",
         "[2*q_xx*r - k1, r_x/lambda, 4*k2, -2*r/lambda;"
         " -q_x/lambda, k1 - 2*q*r_xx, 2*q/lambda, 4*k2;"
         " q_xx*r_x - q_x*r_xx - k2, 4*lambda*v*k2 + (2*r_xx - r)/(2*lambda), 2*q*r_xx - k1, -r_x/lambda;"
         " 4*lambda*w*k2 + (q - 2*q_xx)/(2*lambda), q_xx*r_x - q_x*r_xx - k2, q_x/lambda, k1 - 2*q_xx*r]");
  b.expr("cch.density4", x, "u=(wv)^{\\frac{1}{4}}", "w*v");
  b.expr("cch.flux", x, "dy=udx+2u(qr_x-q_xr)dt", "2*(q*r_x - q_x*r)");

  b.oper("E", x, "{\\cal E}=\\partial^3-\\partial", "d^3 - d", "E");
  b.register_atom("E", x, "d^3 - d");
  b.oper("sigma1", x, "\\sigma_1=\\left(", "[0, 1; 1, 0]", "sigma1");
  b.oper("sigma3", x, "\\sigma_3=\\left(", "[1, 0; 0, -1]", "sigma3");
  b.oper("theta", x, "\\theta=(v,w)^{T}", "[v; w]", "theta");
  b.oper("J2", x, "{\\cal J}_2=-{\\cal E}\\sigma_1", "-E*sigma1");
  b.oper("J1", x,
         "{\\cal J}_1=-2\\sigma_3\\theta\\partial^{-1}(\\sigma_3\\theta)^{T}-2(\\theta\\partial+\\partial "
         "\\theta){\\cal E}^{-1}(\\theta\\partial+\\partial \\theta)^{T}",
         "-2*sigma3*theta*dinv*T(sigma3*theta) - 2*(theta*d + d*theta)*inv[E]*T(theta*d + d*theta)");
  b.expr("H0", x, "H_0 &=& \\frac{1}{2}\\int (v[2q^2r_{xx}-2qq_xr_x+q_x^2r-q^2r]",
         "1/2*(v*(2*q^2*r_xx - 2*q*q_x*r_x + q_x^2*r - q^2*r) + w*(2*r*q_x*r_x - 2*q_xx*r^2 - r_x^2*q + r^2*q))");
  b.expr("H1", x, "H_1 = \\frac{1}{2}\\int (wr-qv) dx", "1/2*(w*r - q*v)");

  b.system("B.system", x, "v_t=4vq_x+2v_xq+2vr",
           {{"v", "4*v*q_x + 2*v_x*q + 2*v*r"}, {"w", "4*w*q_x + 2*w_x*q - 2*w*r"}},
           {{"v", 0, "v", "q_xx - q + r_x"}, {"w", 0, "w", "q_xx - q - r_x"}});
  b.grid("B.V", x, "\\frac{1}{2}(v+w+q)-q_{xx} &  2\\lambda vq+\\frac{1}{4\\lambda}",
         "[r - q_x, 0, 2*q, 1/lambda;"
         " 0, -r - q_x, 1/lambda, 2*q;"
         " 1/2*(v + w + q) - q_xx, 2*lambda*v*q + 1/(4*lambda), r + q_x, 0;"
         " 2*lambda*w*q + 1/(4*lambda), 1/2*(v + w + q) - q_xx, 0, q_x - r]");
  b.expr("B.density4", x, "\\omega=(vw)^{\\frac{1}{4}}dx+2q(vw)^{\\frac{1}{4}}dt", "v*w");
  b.expr("B.flux", x, "dy=udx+2qudt", "2*q");
}

void change_of_variables(Builder& b) {
  const std::string x = "x.radical";
  b.expr("P.density", x, "=\\partial^{-1} (wv)^{\\frac{1}{4}}", "U");
  b.expr("Q1.poly", x, "Q_1(x,v^{(n)},w^{(n)})=-\\frac{1}{2}(wv)^{-\\frac{5}{4}}(wv_x-w_xv)",
         "-1/2*(w*v_x - w_x*v)");
  b.expr("Q1.exponent", x, "-\\frac{1}{2}(wv)^{-\\frac{5}{4}}", "-5/4");
  b.expr("Q2.poly", x,
         "\\frac{1}{64}(wv)^{-\\frac{5}{4}}(16w^2v^2-33v^2w_x^2+6ww_xvv_x+7w^2v_x^2+24v^2ww_{xx}-8w^2vv_{xx})",
         "1/64*(16*w^2*v^2 - 33*v^2*w_x^2 + 6*w*w_x*v*v_x + 7*w^2*v_x^2 + 24*v^2*w*w_xx - 8*w^2*v*v_xx)");
  b.expr("Q2.exponent", x, "=\\frac{1}{64}(wv)^{-\\frac{5}{4}}", "-5/4");

  const std::string y = "y.us";
  b.bindings("recip.substitution", y, "h =(\\frac{v}{w})^{\\frac{1}{4}}; denoting $s=\\frac{u}{h^2}$",
             {{"v", "u^3/s"}, {"w", "u*s"}}, true);
  b.expr("ij.i", y, "i=\\frac{s_y}{s}-\\frac{u_y}{u}", "s_y/s - u_y/u", "i");
  b.expr("ij.j", y, "j=\\frac{1}{4u^2}+\\frac{u_ys_y}{2us}-\\frac{3s_y^2}{4s^2}+\\frac{s_{yy}}{2s}",
         "1/(4*u^2) + u_y*s_y/(2*u*s) - 3*s_y^2/(4*s^2) + s_yy/(2*s)", "j");
  b.oper("twocomp.phi", y, "\\phi_{yy}+(\\frac{u_y}{u}-\\frac{s_y}{s})\\phi_y",
         "d^2 + (u_y/u - s_y/s)*d + (3*s_y^2/(4*s^2) - s_yy/(2*s) - u_y*s_y/(2*u*s) - 1/(4*u^2))");
  b.oper("twocomp.psi", y, "\\psi_{yy}+(\\frac{s_y}{s}-\\frac{u_y}{u})\\psi_y",
         "d^2 + (s_y/s - u_y/u)*d + (s_yy/(2*s) - s_y^2/(4*s^2) - u_y*s_y/(2*u*s) - u_yy/u + u_y^2/u^2 - 1/(4*u^2))");
  b.expr("twocomp.gauge_sq", y, "\\psi=us^{-\\frac{1}{2}}\\varphi_2", "u^2/s");

  b.oper("Pv", y, "P'_{v}=\\frac{1}{4}\\partial^{-1}(wv)^{-\\frac{3}{4}}w=\\frac{1}{4}\\partial_y^{-1}\\frac{1}{v}",
         "1/4*dinv/v");
  b.oper("Pw", y, "P'_{w}=\\frac{1}{4}\\partial_y^{-1}\\frac{1}{w}", "1/4*dinv/w");
  b.oper("Pv.adj", y, "P'^{*}_{v}=-\\frac{1}{4}(wv)^{-\\frac{3}{4}}w\\partial^{-1}=-\\frac{u}{4v}\\partial_y^{-1}\\frac{1}{u}",
         "-u/(4*v)*dinv/u");
  b.oper("Pw.adj", y, "P'^{*}_{w}=-\\frac{u}{4w}\\partial_y^{-1}\\frac{1}{u}", "-u/(4*w)*dinv/u");
  b.oper("Q1v", y, "Q'_{1,v}=-\\partial_y\\frac{1}{2v}-\\frac{i}{4v}", "-d/(2*v) - i/(4*v)");
  b.oper("Q1w", y, "Q'_{1,w}=\\partial_y\\frac{1}{2w}-\\frac{i}{4w}", "d/(2*w) - i/(4*w)");
  b.oper("Q2v", y, "Q'_{2,v}=(-\\frac{j}{2}-\\frac{1}{8}\\partial_y^2+\\frac{i}{8}\\partial_y)\\frac{1}{v}",
         "(-j/2 - 1/8*d^2 + i/8*d)/v");
  b.oper("Q2w", y, "Q'_{2,w}=(-\\frac{j}{2}+\\frac{3}{8}\\partial_y^2-\\frac{3i}{8}\\partial_y)\\frac{1}{w}",
         "(-j/2 + 3/8*d^2 - 3*i/8*d)/w");
  b.oper("Q1v.adj_DxP", y, "Q'^{*}_{1,v}(D_x P)=\\frac{u}{4v}(2\\partial_y-i)", "u/(4*v)*(2*d - i)");
  b.oper("Q1w.adj_DxP", y, "Q'^{*}_{1,w}(D_x P)=-\\frac{u}{4w}(2\\partial_y+i)", "-u/(4*w)*(2*d + i)");
  b.oper("Q2v.adj_DxP", y,
         "Q'^{*}_{2,v}(D_x P)=-\\frac{u}{v}(\\frac{j}{2}+\\frac{1}{8}\\partial_y^2+\\frac{1}{8}\\partial_y i)",
         "-u/v*(j/2 + 1/8*d^2 + 1/8*d*i)");
  b.oper("Q2w.adj_DxP", y,
         "Q'^{*}_{2,w}(D_x P)=\\frac{u}{w}(-\\frac{j}{2}+\\frac{3}{8}\\partial_y^2+\\frac{3}{8}\\partial_y i)",
         "u/w*(-j/2 + 3/8*d^2 + 3/8*d*i)");
  b.oper("T1", y, "T_1 &=& \\frac{1}{4}\\left(",
         "1/4*[(d*i*dinv + 2*d)/v, (d*i*dinv - 2*d)/w;"
         " (j_y*dinv + 2*j + 1/2*d^2 - i/2*d)/v, (j_y*dinv + 2*j - 3/2*d^2 + 3*i/2*d)/w]");
  b.oper("T2", y, "T_2 &=&  \\frac{1}{4}\\left(",
         "1/4*[u/v*(2*d - i + dinv*i_y), u/v*(-1/2*d^2 - 1/2*d*i - 2*j + dinv*j_y);"
         " u/w*(-2*d - i + dinv*i_y), u/w*(3/2*d^2 + 3/2*d*i - 2*j + dinv*j_y)]");

  b.system("B.dst", "y.dst", "i_{\\tau} &=& s-\\frac{u^2}{s}",
           {{"i", "s - u^2/s"}, {"j", "1/2*s_y + u_y/u*s + u^2*s_y/(2*s^2)"}}, {});
  b.expr("B.i", y, "i=\\frac{s_y}{s}-\\frac{u_y}{u},\\\\\\label{coutr2}", "s_y/s - u_y/u");
  b.expr("B.j", y, "j=\\frac{1}{4u^2}+\\frac{u_ys_y}{2us}-\\frac{3s_y^2}{4s^2}+\\frac{s_{yy}}{2s},",
         "1/(4*u^2) + u_y*s_y/(2*u*s) - 3*s_y^2/(4*s^2) + s_yy/(2*s)");

  const std::string q = "y.qrus";
  b.bindings("fg", q, "f=q\\frac{u^2}{s},g=rs", {{"f", "q*u^2/s"}, {"g", "r*s"}}, false);
  b.system("recip.dst", "y.dst", "i_\\tau &=& -2(rs+q\\frac{u^2}{s})",
           {{"i", "-2*(r*s + q*u^2/s)"}, {"j", "-3*D(r*s) + 2*r*s*i + u^2/s*(q_y + q*s_y/s)"}},
           {{"r", 3, "u^2/s", "D(u*D(u*D(r))) - r_y"}, {"q", 3, "s", "D(u*D(u*D(q))) - q_y"}});
}

void scalar_problem(Builder& b) {
  const std::string h = "y.uh";
  b.expr("scalar.m_h", h, "m=-\\frac{1}{2u^2}+\\frac{u_y^2}{2u^2}-\\frac{u_{yy}}{u}-6\\frac{h_y^2}{h^2}+4\\frac{h_{yy}}{h}",
         "-1/(2*u^2) + u_y^2/(2*u^2) - u_yy/u - 6*h_y^2/h^2 + 4*h_yy/h", "m");
  b.expr("scalar.n_h", h, "n=-\\frac{h_y}{h}m_{y}+\\frac{h_y^2}{h^2}m+\\frac{1}{2}m_{yy}",
         "-h_y/h*m_y + h_y^2/h^2*m + 1/2*m_yy - h_yyyy/h + 36*h_y^4/h^4 - 48*h_y^2*h_yy/h^3"
         " + 6*h_yy^2/h^2 + 10*h_y*h_yyy/h^2 + u_yy/(4*u^3) + u_yy^2/(4*u^2) + 1/(16*u^4)"
         " - u_y^2*u_yy/(4*u^3) + u_y^4/(16*u^4) - u_y^2/(8*u^4)");
  b.expr("scalar.gauge_sq", h, "\\varphi_1=hu^{-\\frac{1}{2}}\\phi", "h^2/u");
  b.bindings("scalar.s_of_h", h, "denoting $s=\\frac{u}{h^2}$", {{"s", "u/h^2"}}, false);
  b.expr("miura.a1", h, "a_1=\\frac{u_{y}+1}{2u}", "(u_y + 1)/(2*u)");
  b.expr("miura.b1", h, "b_1=\\frac{h_y}{h}", "h_y/h");

  const std::string mn = "y.mn";
  b.oper("scalar.L", mn, "(\\partial_y^4+\\partial_y m\\partial_y+n)\\phi=\\lambda^2\\phi", "d^4 + d*m*d + n");
  b.oper("P1", mn, "P^1=\\left(", "[0, 4*d; 4*d, 3*d^3 + d*m + m*d]");
  b.oper("P2", mn, "P^2=\\left(",
         "[5*d^3 + m*d + d*m, 3/2*d^5 + 3/2*d^2*m*d + 4*n*d + 3*n_y;"
         " 3/2*d^5 + 3/2*d*m*d^2 + 4*n*d + n_y,"
         " 1/2*(d^7 + d*(d^3*m + m*d^3 + m*d*m + n*d + d*n)*d) + d^3*n + n*d^3 + d*m*n + m*n*d]");

  const std::string ab = "y.ab";
  b.chain("miura.factors", ab,
          "L=(\\partial_y-b_1+a_1)(\\partial_y-b_1-a_1)(\\partial_y+b_1+a_1)(\\partial_y+b_1-a_1)",
          {"d - b1 + a1", "d - b1 - a1", "d + b1 + a1", "d + b1 - a1"});
  b.bindings("miura.ij_ab", ab, "i=-2b_1,\\quad j=a_{1y}+a_1^{2}-b_{1y}-b_1^{2}",
             {{"i", "-2*b1"}, {"j", "a1_y + a1^2 - b1_y - b1^2"}}, false);
}

void modified_variables(Builder& b) {
  const std::string y = "y.ij";
  b.expr("miura.m", y, "m=-(i_y+i^2+2j)", "-(i_y + i^2 + 2*j)");
  b.expr("miura.n", y, "n=j^2-j_{yy}-(ij)_y", "j^2 - j_yy - D(i*j)");
  b.bindings("Omega", y, "\\Omega(i,j)=\\left(", {{"m", "-i_y - i^2 - 2*j"}, {"n", "j^2 - j_yy - D(i*j)"}},
             false);
  b.oper("miura.left", y, "=(\\partial_y^2+\\partial_y i -j)(\\partial_y^2-i\\partial_y-j)", "d^2 + d*i - j");
  b.oper("miura.right", y, "=(\\partial_y^2+\\partial_y i -j)(\\partial_y^2-i\\partial_y-j)", "d^2 - i*d - j");

  b.oper("Theta1", y, "\\Theta_1=\\partial_y^3-3i\\partial_y^2+(2i^2-i_y-4j)\\partial_y+4ij-2j_y",
         "d^3 - 3*i*d^2 + (2*i^2 - i_y - 4*j)*d + 4*i*j - 2*j_y", "Theta1");
  b.oper("Theta1.adj_neg", y,
         "-\\Theta_1^{*}=\\partial_y^3+3i\\partial_y^2+(2i^2+5i_y-4j)\\partial_y+2i_{yy}-2j_y+4ii_y-4ij",
         "d^3 + 3*i*d^2 + (2*i^2 + 5*i_y - 4*j)*d + 2*i_yy - 2*j_y + 4*i*i_y - 4*i*j");
  b.oper("Theta2", y, "\\Theta_2=\\partial_y^3+(i_y-\\frac{1}{2}i^2-2j)\\partial_y+\\partial_y(i_y-\\frac{1}{2}i^2-2j)",
         "d^3 + (i_y - 1/2*i^2 - 2*j)*d + d*(i_y - 1/2*i^2 - 2*j)", "Theta2");
  b.oper("Lambda", y, "\\Lambda=\\left(",
         "[d*i*dinv + 2*d, d*i*dinv - 2*d;"
         " j_y*dinv + 2*j + 1/2*d^2 - i/2*d, j_y*dinv + 2*j - 3/2*d^2 + 3*i/2*d]",
         "Lambda");
  b.chain("J1t", y, "\\tilde{{\\cal J}}_1=-\\frac{1}{16}\\Lambda\\left(",
          {"-1/16*Lambda", "[0, Theta1; -adj(Theta1), 0]", "adj(Lambda)"});
  b.oper("J2t", y, "j\\partial+\\partial j-(\\partial_y-i)\\partial_y(\\partial_y+i)",
         "[2*d, -(d^2 + d*i); d^2 - i*d, j*d + d*j - (d - i)*d*(d + i)]");
  b.oper("J2t.factored", y, "\\tilde{{\\cal J}}_2=\\frac{1}{2}\\left(",
         "1/2*[2; d - i]*d*adj([2; d - i]) - 1/2*Theta2*[0, 0; 0, 1]");

  b.oper("K", y, "\\partial_y+2i & -3\\partial_y+2i", "[-2, -2; d + 2*i, -3*d + 2*i]");
  const char* jtext =
      "1/2*[d + i/2 + i_y/2*dinv, d - i/2 - i_y/2*dinv;"
      " 1/4*d^2 - i/4*d + j + j_y/2*dinv, 3/4*d^2 - 3*i/4*d - j - j_y/2*dinv]";
  b.oper("J", y, "{\\cal J} &=&  \\frac{1}{2}\\left(", jtext);
  b.oper("Theta", y, "\\Theta=\\left(", "[0, -Theta1; adj(Theta1), 0]");
  b.oper("connect.M", y, "\\partial_y+\\frac{i}{2}+\\frac{i_y}{2}\\partial_y^{-1} &  \\partial_y-\\frac{i}{2}-\\frac{i_y}{2}\\partial_y^{-1}",
         jtext);
  const char* gdef =
      "[1/4*(2*d + d*i*dinv), 1/4*(2*d - d*i*dinv);"
      " 1/4*(d^2 - i*d + (-1/2*d^3 + i/2*d^2 + j*d + d*j)*dinv),"
      " 1/4*(d^2 - i*d - (-1/2*d^3 + i/2*d^2 + j*d + d*j)*dinv)]";
  b.oper("connect.G", y, "G_1 &=& \\frac{1}{4}(2(F_1+F_2)_y+\\partial_y i\\partial_y^{-1}(F_1-F_2))", gdef);
  b.oper("M", y, "M_1 &=& \\frac{1}{4}[2(S_1+S_2)_y+\\partial_y i\\partial_y^{-1}(S_1-S_2)]", gdef);

  b.grid("appA.A", y, " A=\\left(", "[j, lambda; lambda, j - i_y]", "A");
  b.grid("appA.B", y, "B=\\left(", "[i, 0; 0, -i]", "B");
  const MatrixOp& s1 = b.oper("S1", y, "\\frac{1}{2}\\partial_y^3-i\\partial_y^2-j\\partial_y",
                              "1/2*d^3 - i*d^2 - j*d - d*j - 1/2*d*i*d + i^2*d + 2*i*j");
  MatrixOp s1op = s1;
  const MatrixOp& s2 = b.oper("S2", y, "S_2 &=&-(\\frac{1}{2}\\partial_y^3+\\partial_y^2 i-j\\partial_y",
                              "-(1/2*d^3 + d^2*i - j*d - d*j + 1/2*d*i*d + 2*i*d*i - i^2*d - 2*i*j)");
  MatrixOp s2op = s2;

  const std::string f = "y.ijfg";
  b.expr("F1", f, "F_1=3ig_{yy}-g_{yyy}+(i_y-2i^2+4j)g_y+(2j_y-4ij)g",
         "3*i*g_yy - g_yyy + (i_y - 2*i^2 + 4*j)*g_y + (2*j_y - 4*i*j)*g", "F1");
  b.expr("F2", f, "F_2=(4ij+2j_y-2i_{yy}-4ii_y)f+(4j-5i_y-2i^2)f_y-3if_{yy}-f_{yyy}",
         "(4*i*j + 2*j_y - 2*i_yy - 4*i*i_y)*f + (4*j - 5*i_y - 2*i^2)*f_y - 3*i*f_yy - f_yyy", "F2");
  b.system("md.system", f, "i_\\tau &=& -2(f+g),\\quad \\quad \\quad \\quad \\quad \\  F_1=-1",
           {{"i", "-2*(f + g)"}, {"j", "f_y - 3*g_y + 2*i*(f + g)"}},
           {{"g", 3, "F1", "-1"}, {"f", 3, "F2", "-1"}});
  b.grid("md.U", f, "j & \\lambda & i & 0",
         "[0, 0, 1, 0; 0, 0, 0, 1; j, lambda, i, 0; lambda, j - i_y, 0, -i]");
  b.expr("md.A2", f, "A_2 &=& g_{yy}-2g_yi-2gj", "g_yy - 2*g_y*i - 2*g*j", "A2");
  b.expr("md.A3", f, "A_3 &=& -f_{yy}-2(fi)_y+2fj", "-f_yy - 2*D(f*i) + 2*f*j", "A3");
  b.grid("md.V", f, "-\\frac{1}{2\\lambda^2} & \\frac{g_y-2gi}{\\lambda} & 0 & -\\frac{2g}{\\lambda}",
         "[-1/(2*lambda^2), (g_y - 2*g*i)/lambda, 0, -2*g/lambda;"
         " -(f_y + 2*f*i)/lambda, 1/(2*lambda^2), 2*f/lambda, 0;"
         " -2*g, A2/lambda, -1/(2*lambda^2), -g_y/lambda;"
         " A3/lambda, 2*f, f_y/lambda, 1/(2*lambda^2)]");

  const std::string k = "y.K";
  {
    DslEnv e = b.env(k);
    auto grid_of = [&](const std::string& stem) {
      return parse_operator("[" + stem + "_11, " + stem + "_12; " + stem + "_21, " + stem + "_22]", e);
    };
    for (const char* s : {"K1", "K2", "K3", "K4"}) b.operator_macro(k, s, grid_of(s));
    const RingPtr& r = b.rings.at(k);
    b.function_macro(k, "S1", s1op.at(0, 0).in_ring(r).apply_local(JetExpr::jet(r, "K2_12")));
    b.function_macro(k, "S2", s2op.at(0, 0).in_ring(r).apply_local(JetExpr::jet(r, "K2_21")));
  }
  b.grid("appA.K1", k, "K^{1}=K^{4}-K^{2}_y-K^{2}B", "K4 - D(K2) - K2*B");
  b.grid("appA.K3", k, "K^{3}=K^{4}_y-K^{2}_{yy}-(K^{2}B)_y+K^{2}A", "D(K4) - D(D(K2)) - D(K2*B) + K2*A");
  b.grid("appA.Atau", k, "A_\\tau=K^{3}_y-AK^{1}-BK^{3}+K^{4}A", "D(K3) - A*K1 - B*K3 + K4*A");
  b.grid("appA.Btau", k, "B_\\tau=K^{4}_y-AK^{2}-BK^{4}+K^{3}+K^{4}B", "D(K4) - A*K2 - B*K4 + K3 + K4*B");
  b.expr("appA.rel1", k, "(i-\\partial_y)(2K^4_{12}-K^2_{12y})+\\lambda(K^2_{22}-K^2_{11})=0",
         "(i - d) @ (2*K4_12 - K2_12_y) + lambda*(K2_22 - K2_11)");
  b.expr("appA.rel2", k, "(i+\\partial_y)(2K^4_{21}-K^2_{21y})+\\lambda(K^2_{22}-K^2_{11})=0",
         "(i + d) @ (2*K4_21 - K2_21_y) + lambda*(K2_22 - K2_11)");
  b.expr("appA.rel3", k, "K^4_{11}+K^4_{22}-\\frac{1}{2}[(\\partial_y+i)K^2_{11}+(\\partial_y-i)K^2_{22}]=0",
         "K4_11 + K4_22 - 1/2*((d + i) @ K2_11 + (d - i) @ K2_22)");
  b.expr("appA.rel4", k, "S_1-S_2-2\\lambda(K^2_{11}+K^2_{22})_y=0", "S1 - S2 - 2*lambda*D(K2_11 + K2_22)");
  b.expr("appA.rel5", k, "S_1+S_2+\\lambda[2K^4_{22}-2K^4_{11}+K^2_{11y}-K^2_{22y}+2i(K^2_{11}+K^2_{22})]=0",
         "S1 + S2 + lambda*(2*K4_22 - 2*K4_11 + K2_11_y - K2_22_y + 2*i*(K2_11 + K2_22))");
  b.expr("appA.rel6", k,
         "[\\frac{1}{2}(\\partial_y^3+\\partial_y^2 i-i\\partial_y^2-i\\partial_y i)-j\\partial_y-\\partial_y j](K^2_{11}-K^2_{22})",
         "(1/2*(d^3 + d^2*i - i*d^2 - i*d*i) - j*d - d*j) @ (K2_11 - K2_22)"
         " + lambda*(K2_12_y - K2_21_y + 2*K4_21 - 2*K4_12)");
  b.expr("appA.fir1", k, "i_\\tau=\\lambda(K^2_{12}-K^2_{21})+\\lambda^{-1}M_1", "lambda*(K2_12 - K2_21)");
  b.expr("appA.fir2", k, "j_\\tau=\\lambda[\\frac{1}{2}(3K^2_{12}+K^2_{21})_y+i(K^2_{21}-K^2_{12})]+\\lambda^{-1}M_2",
         "lambda*(1/2*D(3*K2_12 + K2_21) + i*(K2_21 - K2_12))");
  b.bindings("appA.K2_choice", k, "taking $K^2_{12}=-2g\\lambda^{-1}, K^2_{21}=2f\\lambda^{-1}",
             {{"K2_12", "-2*g_tilde/lambda"}, {"K2_21", "2*f_tilde/lambda"}}, false);

  const std::string iu = "y.ijus";
  b.grid("B.tU", iu, "\\Phi_y=\\left(", "[0, 0, 1, 0; 0, 0, 0, 1; j, lambda, i, 0; lambda, j - i_y, 0, -i]");
  b.expr("B.A1", iu, "A_1=s(\\frac{1}{4u^2}+\\frac{s_y^2}{4s^2}-\\frac{u_ys_y}{2su})",
         "s*(1/(4*u^2) + s_y^2/(4*s^2) - u_y*s_y/(2*s*u))", "A1");
  b.grid("B.tV", iu, "0 & \\frac{s}{\\lambda}(\\frac{s_y}{2s}-\\frac{u_y}{u})& 0 & \\frac{s}{\\lambda}",
         "[0, s/lambda*(s_y/(2*s) - u_y/u), 0, s/lambda;"
         " -u^2*s_y/(2*lambda*s^2), 0, u^2/(lambda*s), 0;"
         " s, A1/lambda, 0, s_y/(2*lambda);"
         " u^2*A1/(s^2*lambda), u^2/s, D(u^2/(2*lambda*s)), 0]");
}

}  // namespace

std::shared_ptr<const Catalog::Data> Catalog::build() {
  Builder b;
  b.ring("x.cch", Ring::make("x", {"q", "r", "v", "w"}));
  b.ring("x.radical", Ring::make("x", {"v", "w", "U"}));
  RingPtr us = Ring::make("y", {"u", "s"});
  b.ring("y.us", us);
  RingPtr qrus = Ring::extend(us, {"q", "r"});
  b.ring("y.qrus", qrus, "y.us");
  // Evolution targets of the transformed flows; i and j as macros are their definitions.
  b.ring("y.dst", Ring::extend(qrus, {"i", "j"}), "y.qrus");
  b.ring("y.uh", Ring::make("y", {"u", "h"}));
  b.ring("y.mn", Ring::make("y", {"m", "n"}));
  b.ring("y.ab", Ring::make("y", {"a1", "b1"}));
  RingPtr ij = Ring::make("y", {"i", "j"});
  b.ring("y.ij", ij);
  b.ring("y.ijfg", Ring::extend(ij, {"f", "g"}), "y.ij");
  std::vector<std::string> k{"it", "jt", "f_tilde", "g_tilde"};
  for (const char* stem : {"K1", "K2", "K3", "K4"}) {
    for (const char* ab : {"_11", "_12", "_21", "_22"}) k.push_back(std::string(stem) + ab);
  }
  b.ring("y.K", Ring::extend(ij, k), "y.ij");
  b.ring("y.ijus", Ring::extend(ij, {"u", "s"}), "y.ij");

  coupled_system(b);
  change_of_variables(b);
  scalar_problem(b);
  modified_variables(b);

  auto d = std::make_shared<Data>();
  d->rings = std::move(b.rings);
  d->entries = std::move(b.entries);
  for (std::size_t i = 0; i < d->entries.size(); ++i) d->position[d->entries[i].id] = i;
  return d;
}

}  // namespace jetcheck
