#include "sos/arith.hpp"

#include <cctype>

namespace sos::arith {

namespace {

const Term kAdd = Term::symbol("+");
const Term kSub = Term::symbol("-");
const Term kMul = Term::symbol("*");
const Term kDiv = Term::symbol("/");
const Term kTau = Term::symbol("τ");

Condition is_binary_operator(const Term& op) {
  return Condition::check(Term::apply(ops::contains(), {binary_operators(), op}));
}

System build() {
  Term e_l = Term::fresh_variable("e_l");
  Term e_r = Term::fresh_variable("e_r");
  Term z_l = Term::fresh_variable("z_l");
  Term z_r = Term::fresh_variable("z_r");
  Term u = Term::fresh_variable("u");
  Term o = Term::fresh_variable("O");
  Term alpha = Term::fresh_variable("α");

  System s("arithmetic");
  s.add(Rule("l-eval", {transition_term(e_l, alpha, u)},
             transition_term(binary_expr(e_l, o, e_r), alpha, binary_expr(u, o, e_r)), {},
             {is_binary_operator(o)}));
  s.add(Rule("r-eval", {transition_term(e_r, alpha, u)},
             transition_term(binary_expr(e_l, o, e_r), alpha, binary_expr(e_l, o, u)), {},
             {is_binary_operator(o)}));
  s.add(Rule("add-eval", {}, transition_term(binary_expr(z_l, kAdd, z_r), kTau, Term::apply(ops::add(), {z_l, z_r}))));
  s.add(Rule("sub-eval", {}, transition_term(binary_expr(z_l, kSub, z_r), kTau, Term::apply(ops::sub(), {z_l, z_r}))));
  s.add(Rule("mul-eval", {}, transition_term(binary_expr(z_l, kMul, z_r), kTau, Term::apply(ops::mul(), {z_l, z_r}))));
  s.add(Rule("div-eval", {},
             transition_term(binary_expr(z_l, kDiv, z_r), kTau, Term::apply(ops::floor_div(), {z_l, z_r}))));
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Term parse() {
    Term t = expr();
    skip();
    if (pos_ != text_.size()) throw SyntaxError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    return t;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Term expr() {
    Term left = product();
    while (peek('+') || peek('-')) {
      Term op = text_[pos_++] == '+' ? kAdd : kSub;
      left = binary_expr(left, op, product());
    }
    return left;
  }

  Term product() {
    Term left = factor();
    while (peek('*') || peek('/')) {
      Term op = text_[pos_++] == '*' ? kMul : kDiv;
      left = binary_expr(left, op, factor());
    }
    return left;
  }

  Term factor() {
    skip();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
    if (text_[pos_] == '(') {
      ++pos_;
      Term inner = expr();
      if (!peek(')')) throw SyntaxError(pos_, "expected ')'");
      ++pos_;
      return inner;
    }
    std::size_t start = pos_;
    if (text_[pos_] == '-') ++pos_;
    std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      throw SyntaxError(start, "expected an integer or '('");
    }
    return Term::value(DataValue::integer(Integer(std::string(text_.substr(start, pos_ - start)))));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

const Term& binary_operators() {
  static const Term ops = Term::value(DataValue::set({DataValue::from_term(kAdd), DataValue::from_term(kSub),
                                                      DataValue::from_term(kMul), DataValue::from_term(kDiv)}));
  return ops;
}

Term binary_expr(const Term& left, const Term& op, const Term& right) { return Term::sequence({left, op, right}); }

const System& system() {
  static const System s = build();
  return s;
}

TransitionSchema schema() { return TransitionSchema::plain("α", "u"); }

Term parse_expr(std::string_view text) { return Parser(text).parse(); }

void decorate(RenderStyle& style) { style.variable_math["O"] = "\\circ"; }

}  // namespace sos::arith
