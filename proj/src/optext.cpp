#include "jetcheck/optext.hpp"

#include <cctype>

#include "jetcheck/serialize.hpp"

namespace jetcheck {

std::string to_text(const PseudoOp& op) {
  if (op.is_zero()) return "0";
  std::string out;
  auto sep = [&out] {
    if (!out.empty()) out += " + ";
  };
  for (std::size_t k = 0; k < op.local().size(); ++k) {
    if (op.local()[k].is_zero()) continue;
    sep();
    out += "(" + to_prefix(op.local()[k]) + ")*d^" + std::to_string(k);
  }
  for (const auto& [m, p] : op.tail()) {
    sep();
    out += "(" + to_prefix(p) + ")*dinv*(" + to_prefix(JetExpr::monomial(op.ring(), m)) + ")";
  }
  return out;
}

std::string to_text(const OpGrid& g) {
  std::string out = "[";
  for (std::size_t i = 0; i < g.rows(); ++i) {
    out += i ? ", [" : "[";
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (j) out += ", ";
      out += to_text(g.at(i, j));
    }
    out += "]";
  }
  return out + "]";
}

std::string to_text(const MatrixOp& m) {
  std::string out = to_text(m.plain());
  for (const auto& w : m.words()) {
    out += " + {" + to_text(w.mats[0]);
    for (std::size_t k = 0; k < w.atoms.size(); ++k) {
      out += "*inv[" + w.atoms[k] + "]*" + to_text(w.mats[k + 1]);
    }
    out += "}";
  }
  return out;
}

namespace {

class OpReader {
 public:
  OpReader(std::string_view s, RingPtr ring) : s_(s), ring_(std::move(ring)) {}

  bool done() const { return pos_ >= s_.size(); }

  void expect(std::string_view tok) {
    if (s_.substr(pos_, tok.size()) != tok) {
      throw ParseError("expected '" + std::string(tok) + "' at offset " + std::to_string(pos_));
    }
    pos_ += tok.size();
  }

  bool accept(std::string_view tok) {
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  JetExpr paren_expr() {
    expect("(");
    std::size_t start = pos_;
    int depth = 1;
    while (pos_ < s_.size() && depth > 0) {
      if (s_[pos_] == '(') ++depth;
      if (s_[pos_] == ')') --depth;
      ++pos_;
    }
    if (depth != 0) throw ParseError("unbalanced parentheses in operator text");
    return parse_prefix(s_.substr(start, pos_ - 1 - start), ring_);
  }

  PseudoOp op() {
    PseudoOp out(ring_);
    if (accept("0")) return out;
    do {
      JetExpr c = paren_expr();
      if (accept("*d^")) {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("missing derivative power");
        int k = std::stoi(std::string(s_.substr(start, pos_ - start)));
        out += PseudoOp::d(ring_, k).left_mul(c);
      } else {
        expect("*dinv*");
        out += PseudoOp::tail_term(c, paren_expr());
      }
    } while (next_term());
    return out;
  }

  bool next_term() {
    if (s_.substr(pos_, 4) != " + (") return false;
    pos_ += 3;
    return true;
  }

  OpGrid grid() {
    expect("[");
    std::vector<std::vector<PseudoOp>> rows;
    do {
      expect("[");
      std::vector<PseudoOp> row;
      do {
        row.push_back(op());
      } while (accept(", "));
      expect("]");
      rows.push_back(std::move(row));
    } while (accept(", "));
    expect("]");
    return OpGrid::from_rows(ring_, std::move(rows));
  }

  MatrixOp matrix() {
    OpGrid plain = grid();
    std::vector<Word> words;
    while (accept(" + {")) {
      Word w;
      w.mats.push_back(grid());
      while (accept("*inv[")) {
        std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ']') ++pos_;
        w.atoms.emplace_back(s_.substr(start, pos_ - start));
        expect("]*");
        w.mats.push_back(grid());
      }
      expect("}");
      words.push_back(std::move(w));
    }
    return MatrixOp(std::move(plain), std::move(words));
  }

 private:
  std::string_view s_;
  RingPtr ring_;
  std::size_t pos_ = 0;
};

}  // namespace

PseudoOp parse_pseudo(std::string_view text, const RingPtr& ring) {
  OpReader r(text, ring);
  PseudoOp op = r.op();
  if (!r.done()) throw ParseError("trailing characters in operator text");
  return op;
}

OpGrid parse_grid(std::string_view text, const RingPtr& ring) {
  OpReader r(text, ring);
  OpGrid g = r.grid();
  if (!r.done()) throw ParseError("trailing characters in operator grid");
  return g;
}

MatrixOp parse_matrix_op(std::string_view text, const RingPtr& ring) {
  OpReader r(text, ring);
  MatrixOp m = r.matrix();
  if (!r.done()) throw ParseError("trailing characters in matrix operator");
  return m;
}

}  // namespace jetcheck
