#include "jetcheck/serialize.hpp"

#include <cctype>
#include <charconv>

namespace jetcheck {

namespace {

std::string factor_text(const Ring& ring, Var v, int k) {
  if (v.is_param()) return "(param " + ring.name_of(v) + " " + std::to_string(k) + ")";
  std::string coord = ring.name_of(v) + "_" + std::to_string(v.order());
  if (k == 1) return coord;
  return "(^ " + coord + " " + std::to_string(k) + ")";
}

std::string term_text(const Ring& ring, const Term& t) {
  std::vector<std::string> parts;
  if (t.coeff != 1 || t.mono.empty()) parts.push_back(rational_to_string(t.coeff));
  for (const auto& [v, k] : t.mono.factors()) parts.push_back(factor_text(ring, v, k));
  std::string out = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) out = "(* " + parts[i] + " " + out + ")";
  return out;
}

class PrefixParser {
 public:
  PrefixParser(std::string_view s, const RingPtr& ring) : s_(s), ring_(ring) {}

  JetExpr parse_all() {
    JetExpr e = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError("prefix parse error at " + std::to_string(pos_) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  std::string_view token() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')') {
      ++pos_;
    }
    if (start == pos_) fail("expected a token");
    return s_.substr(start, pos_ - start);
  }
  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  int integer() {
    auto t = token();
    int v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail("expected an integer");
    return v;
  }
  Var coord(std::string_view t) {
    auto us = t.rfind('_');
    if (us == std::string_view::npos || us + 1 == t.size()) fail("malformed coordinate");
    int order = 0;
    auto digits = t.substr(us + 1);
    auto r = std::from_chars(digits.data(), digits.data() + digits.size(), order);
    if (r.ec != std::errc() || r.ptr != digits.data() + digits.size()) fail("malformed order");
    try {
      return ring_->jet(t.substr(0, us), order);
    } catch (const UnknownName&) {
      fail("unknown dependent " + std::string(t.substr(0, us)));
    }
  }
  JetExpr expr() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      auto op = token();
      JetExpr out(ring_);
      if (op == "+" || op == "*") {
        JetExpr a = expr();
        JetExpr b = expr();
        out = op == "+" ? a + b : a * b;
      } else if (op == "^") {
        Var v = coord(token());
        out = JetExpr::var(ring_, v, integer());
      } else if (op == "param") {
        std::string name(token());
        int k = integer();
        try {
          out = JetExpr::var(ring_, ring_->param(name), k);
        } catch (const UnknownName&) {
          fail("unknown parameter " + name);
        }
      } else {
        fail("unknown operator " + std::string(op));
      }
      expect(')');
      return out;
    }
    auto t = token();
    char c = t.front();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      Rational q;
      if (q.set_str(std::string(t), 10) != 0) fail("malformed rational");
      q.canonicalize();
      return JetExpr(ring_, q);
    }
    return JetExpr::var(ring_, coord(t));
  }

  std::string_view s_;
  RingPtr ring_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_prefix(const JetExpr& e) {
  if (e.is_zero()) return "0";
  const Ring& ring = *e.ring();
  auto terms = e.terms();
  std::string out = term_text(ring, terms.back());
  for (std::size_t i = terms.size() - 1; i-- > 0;) {
    out = "(+ " + term_text(ring, terms[i]) + " " + out + ")";
  }
  return out;
}

JetExpr parse_prefix(std::string_view text, const RingPtr& ring) {
  return PrefixParser(text, ring).parse_all();
}

}  // namespace jetcheck
