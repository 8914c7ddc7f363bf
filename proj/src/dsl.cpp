#include "jetcheck/dsl.hpp"

#include <cctype>

#include "jetcheck/calculus.hpp"

namespace jetcheck {

namespace {

bool is_function(const MatrixOp& m) {
  return m.rows() == 1 && m.cols() == 1 && !m.has_words() && m.at(0, 0).is_local() &&
         m.at(0, 0).order() <= 0;
}

JetExpr function_of(const MatrixOp& m, const RingPtr& ring) {
  if (!is_function(m)) throw ParseError("expected a function, got an operator");
  return m.at(0, 0).is_zero() ? JetExpr(ring) : m.at(0, 0).as_function();
}

MatrixOp fn(const JetExpr& f) { return MatrixOp::scalar(PseudoOp::function(f)); }

OpGrid transpose(const OpGrid& g) {
  OpGrid r(g.ring(), g.cols(), g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) r.at(j, i) = g.at(i, j);
  }
  return r;
}

// Entrywise action of a 1x1 operator on a matrix, from the given side.
MatrixOp scalar_act(const MatrixOp& s, const MatrixOp& m, bool left, InverseRegistry* reg) {
  if (s.has_words()) throw ParseError("scalar factor with inverse words acting on a matrix");
  const PseudoOp& c = s.at(0, 0);
  std::size_t n = left ? m.rows() : m.cols();
  OpGrid diag(unify(s.ring(), m.ring()), n, n);
  for (std::size_t k = 0; k < n; ++k) diag.at(k, k) = c;
  return left ? compose(MatrixOp(diag), m, reg) : compose(m, MatrixOp(diag), reg);
}

class Reader {
 public:
  Reader(std::string_view s, const DslEnv& env) : s_(s), env_(env), ring_(env.ring) {}

  MatrixOp parse() {
    MatrixOp v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  MatrixOp add(const MatrixOp& a, const MatrixOp& b, bool negate) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail("sum of differently shaped operands");
    return simplify(negate ? a - b : a + b, env_.registry);
  }

  MatrixOp mul(const MatrixOp& a, const MatrixOp& b) {
    bool a1 = a.rows() == 1 && a.cols() == 1;
    bool b1 = b.rows() == 1 && b.cols() == 1;
    if (a.cols() == b.rows()) return compose(a, b, env_.registry);
    if (a1) return scalar_act(a, b, true, env_.registry);
    if (b1) return scalar_act(b, a, false, env_.registry);
    fail("product of incompatible shapes");
  }

  // Operator applied to a column of functions; the result is a column of functions.
  MatrixOp applied(const MatrixOp& a, const MatrixOp& f) {
    if (a.has_words()) fail("application of inverse words");
    if (f.cols() != 1 && !(a.rows() == 1 && a.cols() == 1)) fail("application to a non-column");
    RingPtr ring = unify(a.ring(), f.ring());
    OpGrid out(ring, a.rows() == 1 && a.cols() == 1 ? f.rows() : a.rows(), f.cols());
    for (std::size_t c = 0; c < f.cols(); ++c) {
      for (std::size_t i = 0; i < out.rows(); ++i) {
        JetExpr acc(ring);
        if (a.rows() == 1 && a.cols() == 1) {
          acc = apply_cell(a.at(0, 0), f, i, c, ring);
        } else {
          if (a.cols() != f.rows()) fail("application with mismatched dimension");
          for (std::size_t k = 0; k < a.cols(); ++k) acc += apply_cell(a.at(i, k), f, k, c, ring);
        }
        out.at(i, c) = PseudoOp::function(acc);
      }
    }
    return MatrixOp(out);
  }

  JetExpr apply_cell(const PseudoOp& a, const MatrixOp& f, std::size_t i, std::size_t c,
                     const RingPtr& ring) {
    if (!a.is_local()) fail("application of a nonlocal operator");
    MatrixOp cell(OpGrid::from_rows(ring, {{f.at(i, c)}}));
    return a.in_ring(ring).apply_local(function_of(cell, ring).in_ring(ring));
  }

  MatrixOp sum() {
    MatrixOp v = prod();
    for (;;) {
      if (accept('+')) {
        v = add(v, prod(), false);
      } else if (peek('-')) {
        ++pos_;
        v = add(v, prod(), true);
      } else {
        return v;
      }
    }
  }

  MatrixOp prod() {
    MatrixOp v = unary();
    for (;;) {
      if (accept('*')) {
        v = mul(v, unary());
      } else if (accept('@')) {
        v = applied(v, unary());
      } else if (accept('/')) {
        MatrixOp d = unary();
        JetExpr f = function_of(d, ring_);
        v = mul(v, fn(f.inverse()));
      } else {
        return v;
      }
    }
  }

  MatrixOp unary() {
    if (accept('-')) return Rational(-1) * unary();
    if (accept('+')) return unary();
    return power();
  }

  int integer() {
    skip();
    bool neg = false;
    if (accept('(')) {
      neg = accept('-');
      int n = integer();
      expect(')');
      return neg ? -n : n;
    }
    if (accept('-')) neg = true;
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    int n = std::stoi(std::string(s_.substr(start, pos_ - start)));
    return neg ? -n : n;
  }

  MatrixOp power() {
    MatrixOp base = atom();
    if (!accept('^')) return base;
    int n = integer();
    if (is_function(base)) return fn(function_of(base, ring_).pow(n));
    if (n < 0) fail("negative power of an operator");
    if (base.rows() != base.cols()) fail("power of a non-square operator");
    MatrixOp r(OpGrid::identity(base.ring(), base.rows()));
    for (int k = 0; k < n; ++k) r = compose(r, base, env_.registry);
    return r;
  }

  std::string name() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  MatrixOp grid() {
    std::vector<std::vector<MatrixOp>> rows(1);
    for (;;) {
      rows.back().push_back(sum());
      if (accept(',')) continue;
      if (accept(';')) {
        rows.emplace_back();
        continue;
      }
      expect(']');
      break;
    }
    std::vector<std::vector<PseudoOp>> cells;
    RingPtr ring = ring_;
    for (auto& r : rows) {
      if (r.size() != rows[0].size()) fail("ragged grid");
      std::vector<PseudoOp> row;
      for (auto& c : r) {
        if (c.rows() != 1 || c.cols() != 1 || c.has_words()) fail("grid entries must be 1x1 and word-free");
        ring = unify(ring, c.ring());
        row.push_back(c.at(0, 0));
      }
      cells.push_back(std::move(row));
    }
    return MatrixOp(OpGrid::from_rows(ring, std::move(cells)));
  }

  MatrixOp atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      MatrixOp v = sum();
      expect(')');
      return v;
    }
    if (c == '[') {
      ++pos_;
      return grid();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      Rational q(std::string(s_.substr(start, pos_ - start)));
      return fn(JetExpr(ring_, q));
    }
    std::string id = name();
    if (id.empty()) fail("expected a name");
    if (id == "d") return MatrixOp::scalar(PseudoOp::d(ring_));
    if (id == "dinv") return MatrixOp::scalar(PseudoOp::dinv(ring_));
    if (id == "inv") {
      expect('[');
      std::string atom_name = name();
      expect(']');
      std::size_t dim = 1;
      if (env_.registry && env_.registry->knows(atom_name)) {
        dim = env_.registry->forward(atom_name).rows();
      }
      return MatrixOp::atom(ring_, atom_name, dim);
    }
    if ((id == "D" || id == "adj" || id == "T") && peek('(')) {
      expect('(');
      MatrixOp arg = sum();
      expect(')');
      if (id == "D") return derivative(arg);
      if (id == "adj") return adjoint(arg, env_.registry);
      if (arg.has_words()) fail("transpose of inverse words");
      return MatrixOp(transpose(arg.plain()));
    }
    return named(id);
  }

  // Entrywise derivative of a matrix of functions.
  MatrixOp derivative(const MatrixOp& m) {
    if (m.has_words()) fail("derivative of inverse words");
    OpGrid out(m.ring(), m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        MatrixOp cell(OpGrid::from_rows(m.ring(), {{m.at(i, j)}}));
        out.at(i, j) = PseudoOp::function(total_derivative(function_of(cell, m.ring())));
      }
    }
    return MatrixOp(out);
  }

  MatrixOp named(const std::string& id) {
    if (auto it = env_.functions.find(id); it != env_.functions.end()) return fn(it->second);
    if (auto it = env_.operators.find(id); it != env_.operators.end()) return it->second;
    if (ring_->find_dependent(id)) return fn(JetExpr::jet(ring_, id));
    if (ring_->find_parameter(id)) return fn(JetExpr::param(ring_, id));
    // name_suffix with a suffix made of the independent variable's letter
    auto us = id.rfind('_');
    if (us != std::string::npos && us + 1 < id.size()) {
      std::string base = id.substr(0, us);
      std::string suffix = id.substr(us + 1);
      const std::string& ind = ring_->independent();
      if (suffix.find_first_not_of(ind) == std::string::npos) {
        int k = static_cast<int>(suffix.size());
        if (auto it = env_.functions.find(base); it != env_.functions.end()) {
          return fn(total_derivative(it->second, k));
        }
        if (ring_->find_dependent(base)) return fn(JetExpr::jet(ring_, base, k));
      }
    }
    throw UnknownName("unknown name in formula: " + id);
  }

  std::string_view s_;
  const DslEnv& env_;
  RingPtr ring_;
  std::size_t pos_ = 0;
};

}  // namespace

MatrixOp parse_operator(std::string_view text, const DslEnv& env) {
  if (!env.ring) throw Error("formula environment without a ring");
  return Reader(text, env).parse();
}

JetExpr parse_function(std::string_view text, const DslEnv& env) {
  return function_of(parse_operator(text, env), env.ring);
}

}  // namespace jetcheck
