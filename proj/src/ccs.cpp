#include "sos/ccs.hpp"

#include <cctype>

namespace sos::ccs {

namespace {

bool is_action_pair(const Term& t) {
  return t.is_sequence() && t.size() == 2 && t[0].is_symbol() && t[1].is_symbol() &&
         (t[1].name() == "!" || t[1].name() == "?");
}

std::optional<DataValue> complement_eval(std::span<const DataValue> args) {
  if (args.size() != 1 || !args[0].is_reified()) return std::nullopt;
  const Term& a = args[0].as_term();
  if (a.is_symbol()) return args[0];
  if (!is_action_pair(a)) return std::nullopt;
  Term flipped = Term::sequence({a[0], Term::symbol(a[1].name() == "!" ? "?" : "!")});
  return DataValue::from_term(flipped);
}

System build() {
  Term gamma = Term::fresh_variable("Γ");
  Term p = Term::fresh_variable("P");
  Term p1 = Term::fresh_variable("P'");
  Term q = Term::fresh_variable("Q");
  Term q1 = Term::fresh_variable("Q'");
  Term x = Term::fresh_variable("X");
  Term h = Term::fresh_variable("H");
  Term alpha = Term::fresh_variable("α");
  auto step = [&](const Term& s, const Term& a, const Term& t) { return transition_term(gamma, s, a, t); };

  System s("ccs");
  s.add(Rule("prefix", {}, step(prefix(alpha, p), alpha, p)));
  s.add(Rule("choice-l", {step(p, alpha, p1)}, step(choice(p, q), alpha, p1)));
  s.add(Rule("choice-r", {step(q, alpha, q1)}, step(choice(p, q), alpha, q1)));
  s.add(Rule("par-l", {step(p, alpha, p1)}, step(parallel(p, q), alpha, parallel(p1, q))));
  s.add(Rule("par-r", {step(q, alpha, q1)}, step(parallel(p, q), alpha, parallel(p, q1))));
  s.add(Rule("sync", {step(p, alpha, p1), step(q, Term::apply(complement_op(), {alpha}), q1)},
             step(parallel(p, q), tau(), parallel(p1, q1))));
  s.add(Rule("rec", {step(p, alpha, p1)}, step(x, alpha, p1), {{p, Term::apply(ops::getitem(), {gamma, x})}}));
  s.add(Rule("res", {step(p, alpha, p1)}, step(Term::sequence({p, Term::symbol("\\"), h}), alpha,
                                               Term::sequence({p1, Term::symbol("\\"), h})),
             {}, {Condition::check(Term::apply(ops::not_contains(), {h, alpha}))}));
  s.add(Rule("fix", {step(Term::apply(ops::replace(), {p, x, fix(x, p)}), alpha, p1)}, step(fix(x, p), alpha, p1)));
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Term parse() {
    Term t = sum();
    skip();
    if (pos_ != text_.size()) fail("unexpected input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(pos_, message); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at(std::string_view token) {
    skip();
    return text_.substr(pos_, token.size()) == token;
  }

  bool accept(std::string_view token) {
    if (!at(token)) return false;
    pos_ += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

  std::string peek_ident(std::size_t from) const {
    std::size_t end = from;
    while (end < text_.size() && ident_char(text_[end])) ++end;
    return std::string(text_.substr(from, end - from));
  }

  std::string ident() {
    skip();
    std::string id = peek_ident(pos_);
    if (id.empty() || std::isdigit(static_cast<unsigned char>(id[0]))) fail("expected an identifier");
    pos_ += id.size();
    return id;
  }

  // Does an action start here? Lowercase names, τ, or "(name ?)" / "(name !)".
  bool action_ahead() {
    skip();
    if (at("τ")) return true;
    std::string id = peek_ident(pos_);
    if (!id.empty()) return std::islower(static_cast<unsigned char>(id[0])) && id != "fix";
    if (!at("(")) return false;
    std::size_t save = pos_;
    ++pos_;
    skip();
    id = peek_ident(pos_);
    bool ok = false;
    if (!id.empty() && std::islower(static_cast<unsigned char>(id[0]))) {
      pos_ += id.size();
      ok = (accept("?") || accept("!")) && accept(")");
    }
    pos_ = save;
    return ok;
  }

  Term action() {
    skip();
    if (accept("τ")) return tau();
    if (accept("(")) {
      Term a = action();
      expect(")");
      return a;
    }
    std::string id = ident();
    if (id == "tau") return tau();
    if (!std::islower(static_cast<unsigned char>(id[0]))) fail("action names start in lowercase");
    if (accept("?")) return reactive(id);
    if (accept("!")) return generative(id);
    return internal(id);
  }

  Term sum() {
    Term left = par();
    while (accept("+")) left = choice(left, par());
    return left;
  }

  Term par() {
    Term left = pre();
    while (accept("||")) left = parallel(left, pre());
    return left;
  }

  Term pre() {
    if (action_ahead()) {
      Term a = action();
      expect(".");
      return prefix(a, pre());
    }
    return restriction();
  }

  Term restriction() {
    Term p = atom();
    while (accept("\\")) {
      expect("{");
      std::vector<Term> actions;
      if (!accept("}")) {
        do actions.push_back(action());
        while (accept(","));
        expect("}");
      }
      p = restrict(p, actions);
    }
    return p;
  }

  Term atom() {
    skip();
    if (accept("(")) {
      Term inner = sum();
      expect(")");
      return inner;
    }
    if (pos_ < text_.size() && text_[pos_] == '0' && peek_ident(pos_) == "0") {
      ++pos_;
      return dead();
    }
    std::string id = peek_ident(pos_);
    if (id == "fix") {
      pos_ += id.size();
      Term x = variable();
      expect("=");
      return fix(x, pre());
    }
    if (!id.empty() && std::isupper(static_cast<unsigned char>(id[0]))) return variable();
    fail(pos_ >= text_.size() ? "unexpected end of input" : "expected a process");
  }

  Term variable() {
    std::string id = ident();
    if (!std::isupper(static_cast<unsigned char>(id[0]))) fail("process variables start in uppercase");
    return process_variable(id);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

const OperatorPtr& complement_op() {
  static const OperatorPtr op = OperatorRegistry::global().get_or_add(
      Operator{"complement", 1, complement_eval, RangeHint{kRangeSymbol | kRangeSequence, {}}});
  return op;
}

Term tau() { return Term::symbol("τ"); }
Term dead() { return Term::symbol("0"); }
Term generative(const std::string& name) { return Term::sequence({Term::symbol(name), Term::symbol("!")}); }
Term reactive(const std::string& name) { return Term::sequence({Term::symbol(name), Term::symbol("?")}); }
Term internal(const std::string& name) { return Term::symbol(name); }
Term process_variable(const std::string& name) { return Term::value(DataValue::named(kProcessVariableKind, name)); }
Term prefix(const Term& action, const Term& process) { return Term::sequence({action, Term::symbol("."), process}); }
Term choice(const Term& left, const Term& right) { return Term::sequence({left, Term::symbol("+"), right}); }
Term parallel(const Term& left, const Term& right) { return Term::sequence({left, Term::symbol("||"), right}); }

Term restrict(const Term& process, const std::vector<Term>& actions) {
  std::vector<DataValue> elements;
  for (const auto& a : actions) elements.push_back(DataValue::from_term(a));
  return restrict(process, Term::value(DataValue::set(std::move(elements))));
}

Term restrict(const Term& process, const Term& action_set) {
  return Term::sequence({process, Term::symbol("\\"), action_set});
}

Term fix(const Term& variable, const Term& process) {
  return Term::sequence({Term::symbol("fix"), variable, Term::symbol("="), process});
}

Term environment(const std::map<std::string, Term>& bindings) {
  std::vector<std::pair<DataValue, DataValue>> entries;
  for (const auto& [name, p] : bindings)
    entries.emplace_back(DataValue::named(kProcessVariableKind, name), DataValue::from_term(p));
  return Term::value(DataValue::map(std::move(entries)));
}

const System& system() {
  static const System s = build();
  return s;
}

TransitionSchema schema(const Term& env) { return TransitionSchema::with_environment(env, "α", "t"); }

Term parse_process(std::string_view text) { return Parser(text).parse(); }

void decorate(RenderStyle& style) {
  style.console_ops["complement"] = [](std::span<const Term> a, const SubRender& sub) -> std::optional<std::string> {
    return "comp(" + sub(a[0]) + ")";
  };
  style.latex_ops["complement"] = [](std::span<const Term> a, const SubRender& sub) -> std::optional<std::string> {
    return "\\overline{" + sub(a[0]) + "}";
  };
}

}  // namespace sos::ccs
