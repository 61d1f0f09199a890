#include "sos/render.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>

namespace sos {

namespace {

constexpr const char* kReset = "\x1b[0m";
constexpr const char* kVariableColor = "\x1b[38;5;208m";
constexpr const char* kSymbolColor = "\x1b[36m";
constexpr const char* kValueColor = "\x1b[32m";

// Display width in columns: code points, ignoring ANSI escapes.
std::size_t width(const std::string& s) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto c = static_cast<unsigned char>(s[i]);
    if (c == 0x1b) {
      while (i < s.size() && s[i] != 'm') ++i;
      continue;
    }
    if ((c & 0xc0) != 0x80) ++w;
  }
  return w;
}

std::string pad(const std::string& s, std::size_t w) { return s + std::string(w > width(s) ? w - width(s) : 0, ' '); }

std::string latex_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\backslash "; break;
      case '{': out += "\\{"; break;
      case '}': out += "\\}"; break;
      case '_': out += "\\_"; break;
      case '#': out += "\\#"; break;
      case '$': out += "\\$"; break;
      case '%': out += "\\%"; break;
      case '&': out += "\\&"; break;
      case '~': out += "\\sim "; break;
      case '^': out += "\\hat{}"; break;
      default: out += c;
    }
  }
  return out;
}

bool is_plain_identifier(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
}

const std::map<std::string, std::string>& greek() {
  static const std::map<std::string, std::string> m = {
      {"α", "\\alpha"}, {"β", "\\beta"}, {"γ", "\\gamma"}, {"Γ", "\\Gamma"}, {"τ", "\\tau"},
      {"σ", "\\sigma"}, {"ρ", "\\rho"}, {"∘", "\\circ"},
  };
  return m;
}

std::string math_identifier(const std::string& s) {
  if (auto it = greek().find(s); it != greek().end()) return it->second;
  auto base = s.substr(0, s.find('\''));
  if (base.size() == 1 || (is_plain_identifier(s) && s.find('_') != std::string::npos)) return s;
  if (is_plain_identifier(s)) return "\\mathit{" + s + "}";
  return latex_escape(s);
}

class Renderer {
 public:
  explicit Renderer(const RenderStyle& style) : style_(style) {}

  std::string term(const Term& t) const {
    switch (t.kind()) {
      case TermKind::Variable: return variable(t.var());
      case TermKind::Symbol: return symbol(t.name());
      case TermKind::Value: return value(t.data());
      case TermKind::Sequence: return sequence(t);
      case TermKind::Apply: return apply(t);
    }
    return {};
  }

  std::string value(const DataValue& v) const {
    if (v.is_reified()) return term(v.as_term());
    return paint(kValueColor, "green", bare_value(v));
  }

 private:
  bool latex() const { return style_.mode == RenderMode::Latex; }

  std::string paint(const char* ansi, const char* latex_color, const std::string& s) const {
    if (!style_.color) return s;
    if (latex()) return std::string("\\textcolor{") + latex_color + "}{" + s + "}";
    return ansi + s + kReset;
  }

  std::string variable(const Variable& v) const {
    if (!latex()) return paint(kVariableColor, "orange", v.display);
    auto it = style_.variable_math.find(v.display);
    return paint(kVariableColor, "orange", it != style_.variable_math.end() ? it->second : math_identifier(v.display));
  }

  std::string symbol(const std::string& name) const {
    auto it = style_.symbols.find(name);
    std::string s;
    if (it != style_.symbols.end())
      s = latex() ? it->second.math : it->second.text;
    else
      s = latex() ? (is_plain_identifier(name) && name.size() > 1 ? "\\mathsf{" + latex_escape(name) + "}" : latex_escape(name))
                  : name;
    return paint(kSymbolColor, "teal", s);
  }

  std::string bare_value(const DataValue& v) const {
    switch (v.kind()) {
      case DataValue::Kind::Integer: return v.as_integer().str();
      case DataValue::Kind::Rational: {
        const auto& q = v.as_rational();
        auto num = boost::multiprecision::numerator(q).str();
        auto den = boost::multiprecision::denominator(q).str();
        return latex() ? "\\frac{" + num + "}{" + den + "}" : num + "/" + den;
      }
      case DataValue::Kind::Boolean:
        return latex() ? std::string("\\mathsf{") + (v.as_boolean() ? "true" : "false") + "}"
                       : (v.as_boolean() ? "true" : "false");
      case DataValue::Kind::Text: {
        if (latex()) return "\\texttt{\"" + latex_escape(v.as_text()) + "\"}";
        std::string out = "\"";
        for (char c : v.as_text()) {
          if (c == '"' || c == '\\') out += '\\';
          out += c;
        }
        return out + "\"";
      }
      case DataValue::Kind::Set: {
        std::string out = latex() ? "\\{" : "{";
        bool first = true;
        for (const auto& e : v.as_set()) {
          out += (first ? "" : ", ") + value(e);
          first = false;
        }
        return out + (latex() ? "\\}" : "}");
      }
      case DataValue::Kind::Map: {
        std::string out = latex() ? "\\{" : "{";
        bool first = true;
        for (const auto& [k, x] : v.as_map()) {
          out += (first ? "" : ", ") + value(k) + (latex() ? " \\mapsto " : " ↦ ") + value(x);
          first = false;
        }
        return out + (latex() ? "\\}" : "}");
      }
      case DataValue::Kind::Named: return latex() ? math_identifier(v.as_named().name) : v.as_named().name;
      case DataValue::Kind::Reified: return term(v.as_term());
    }
    return {};
  }

  std::string sequence(const Term& t) const {
    SubRender sub = [this](const Term& x) { return term(x); };
    if (latex()) {
      for (const auto& hook : style_.latex_sequences)
        if (auto s = hook(t, sub)) return *s;
    }
    std::string out = "(";
    const char* sep = latex() ? "\\," : " ";
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? sep : "") + term(t[i]);
    return out + ")";
  }

  std::string apply(const Term& t) const {
    SubRender sub = [this](const Term& x) { return term(x); };
    const auto& hooks = latex() ? style_.latex_ops : style_.console_ops;
    if (auto it = hooks.find(t.op().name); it != hooks.end())
      if (auto s = it->second(t.components(), sub)) return *s;
    std::string out = latex() ? "\\mathit{" + latex_escape(t.op().name) + "}(" : t.op().name + "(";
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + term(t[i]);
    return out + ")";
  }

  const RenderStyle& style_;
};

OperatorHook binary_hook(std::string infix) {
  return [infix](std::span<const Term> a, const SubRender& sub) -> std::optional<std::string> {
    if (a.size() != 2) return std::nullopt;
    return sub(a[0]) + infix + sub(a[1]);
  };
}

// elem op collection, for membership tests written collection-first.
OperatorHook membership_hook(std::string infix) {
  return [infix](std::span<const Term> a, const SubRender& sub) -> std::optional<std::string> {
    if (a.size() != 2) return std::nullopt;
    return sub(a[1]) + infix + sub(a[0]);
  };
}

std::map<std::string, SymbolForm> default_symbols() {
  return {
      {"⊨", {"=", "\\models"}},     {"τ", {"τ", "\\tau"}},
      {"||", {"||", "\\parallel"}}, {"\\", {"\\", "\\setminus"}},
      {"=>", {"=>", "\\Rightarrow"}}, {"::", {"::", "\\mathbin{::}"}},
      {"fix", {"fix", "\\mathbf{fix}"}}, {"*", {"*", "\\ast"}},
      {"⊔", {"⊔", "\\sqcup"}},
  };
}

std::optional<std::string> latex_transition(const Term& t, const SubRender& sub) {
  auto sym = [&](std::size_t i, const char* name) { return t[i].is_symbol() && t[i].name() == name; };
  if (t.size() == 5 && sym(1, "=") && sym(3, "=>"))
    return sub(t[0]) + " \\xrightarrow{" + sub(t[2]) + "} " + sub(t[4]);
  if (t.size() == 7 && sym(1, "⊨") && sym(3, "=") && sym(5, "=>"))
    return sub(t[0]) + " \\models " + sub(t[2]) + " \\xrightarrow{" + sub(t[4]) + "} " + sub(t[6]);
  return std::nullopt;
}

// Places blocks next to each other, bottom aligned.
std::vector<std::string> beside(const std::vector<std::vector<std::string>>& blocks, std::size_t gap) {
  std::size_t height = 0;
  for (const auto& b : blocks) height = std::max(height, b.size());
  std::vector<std::string> out(height);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    std::size_t w = 0;
    for (const auto& l : b) w = std::max(w, width(l));
    std::size_t offset = height - b.size();
    for (std::size_t row = 0; row < height; ++row) {
      std::string cell = row >= offset ? b[row - offset] : "";
      bool last = k + 1 == blocks.size();
      out[row] += last ? cell : pad(cell, w + gap);
    }
  }
  for (auto& l : out) l.erase(l.find_last_not_of(' ') + 1);
  return out;
}

std::vector<std::string> tree_block(const InferenceTree& tree, const Renderer& r) {
  std::string conclusion = r.term(tree.conclusion());
  if (tree.subtrees.empty()) return {tree.rule_name() + " " + conclusion};
  std::vector<std::vector<std::string>> premises;
  for (const auto& s : tree.subtrees) premises.push_back(tree_block(s, r));
  std::vector<std::string> out;
  for (auto& line : beside(premises, 4)) out.push_back("      " + line);
  out.push_back(tree.rule_name() + " -----");
  out.push_back("      " + conclusion);
  return out;
}

std::string latex_tree(const InferenceTree& tree, const Renderer& r) {
  std::string above;
  for (std::size_t i = 0; i < tree.subtrees.size(); ++i)
    above += (i ? " \\quad " : "") + latex_tree(tree.subtrees[i], r);
  return "\\dfrac{" + above + "}{" + r.term(tree.conclusion()) + "}\\,\\textsc{" + latex_escape(tree.rule_name()) + "}";
}

std::vector<std::string> rule_premise_items(const Rule& rule, const Renderer& r, const RenderStyle& style) {
  std::vector<std::string> items;
  for (const auto& p : rule.premises()) items.push_back(r.term(p));
  for (const auto& e : rule.equations()) items.push_back(r.term(e.left) + " = " + r.term(e.right));
  for (const auto& c : rule.conditions()) {
    if (c.term())
      items.push_back(r.term(*c.term()));
    else
      items.push_back(style.mode == RenderMode::Latex ? "\\text{" + latex_escape(c.description()) + "}" : c.description());
  }
  return items;
}

}  // namespace

RenderStyle RenderStyle::console(bool color) {
  RenderStyle s;
  s.mode = RenderMode::Console;
  s.color = color;
  s.symbols = default_symbols();
  s.console_ops["contains"] = membership_hook(" ∈ ");
  s.console_ops["not_contains"] = membership_hook(" ∉ ");
  s.console_ops["getitem"] = [](std::span<const Term> a, const SubRender& sub) -> std::optional<std::string> {
    return sub(a[0]) + "[" + sub(a[1]) + "]";
  };
  s.console_ops["replace"] = [](std::span<const Term> a, const SubRender& sub) -> std::optional<std::string> {
    return sub(a[0]) + "[" + sub(a[1]) + " ↦ " + sub(a[2]) + "]";
  };
  return s;
}

RenderStyle RenderStyle::latex(bool color) {
  RenderStyle s;
  s.mode = RenderMode::Latex;
  s.color = color;
  s.symbols = default_symbols();
  s.latex_ops["contains"] = membership_hook(" \\in ");
  s.latex_ops["not_contains"] = membership_hook(" \\notin ");
  s.latex_ops["getitem"] = [](std::span<const Term> a, const SubRender& sub) -> std::optional<std::string> {
    return sub(a[0]) + "[" + sub(a[1]) + "]";
  };
  s.latex_ops["replace"] = [](std::span<const Term> a, const SubRender& sub) -> std::optional<std::string> {
    return sub(a[0]) + "[" + sub(a[1]) + " \\mapsto " + sub(a[2]) + "]";
  };
  s.latex_ops["add"] = binary_hook(" + ");
  s.latex_ops["sub"] = binary_hook(" - ");
  s.latex_ops["mul"] = binary_hook(" \\cdot ");
  s.latex_ops["div"] = binary_hook(" \\div ");
  s.latex_ops["floor_div"] = [](std::span<const Term> a, const SubRender& sub) -> std::optional<std::string> {
    return "\\lfloor " + sub(a[0]) + " \\div " + sub(a[1]) + " \\rfloor";
  };
  s.latex_sequences.push_back(latex_transition);
  return s;
}

std::string render_term(const Term& t, const RenderStyle& style) { return Renderer(style).term(t); }

std::string render_value(const DataValue& v, const RenderStyle& style) { return Renderer(style).value(v); }

std::string render_equation(const Equation& e, const RenderStyle& style) {
  Renderer r(style);
  return r.term(e.left) + (style.mode == RenderMode::Latex ? " \\doteq " : " ≐ ") + r.term(e.right);
}

std::string render_substitution(const Substitution& sigma, const RenderStyle& style) {
  Renderer r(style);
  bool latex = style.mode == RenderMode::Latex;
  std::string out = latex ? "\\{" : "{";
  bool first = true;
  for (const auto& [x, t] : sigma) {
    out += (first ? "" : ", ") + r.term(Term::variable(x)) + (latex ? " \\mapsto " : " ↦ ") + r.term(t);
    first = false;
  }
  return out + (latex ? "\\}" : "}");
}

std::string rule_origin(const Rule& rule) {
  std::string file = rule.origin().file_name();
  for (const char* root : {"/src/", "/tests/", "/tools/"}) {
    if (auto pos = file.rfind(root); pos != std::string::npos) {
      file = file.substr(pos + 1);
      break;
    }
  }
  return file + ":" + std::to_string(rule.origin().line());
}

std::string render_rule(const Rule& rule, const RenderStyle& style) {
  Renderer r(style);
  auto items = rule_premise_items(rule, r, style);
  if (style.mode == RenderMode::Latex) {
    std::string above;
    for (std::size_t i = 0; i < items.size(); ++i) above += (i ? " \\quad " : "") + items[i];
    return "\\dfrac{" + above + "}{" + r.term(rule.conclusion()) + "}\\,\\textsc{" + latex_escape(rule.name()) + "}";
  }
  std::string above;
  for (std::size_t i = 0; i < items.size(); ++i) above += (i ? "    " : "") + items[i];
  std::string below = r.term(rule.conclusion());
  std::size_t bar = std::max<std::size_t>({width(above), width(below), 3});
  std::ostringstream os;
  os << "Rule '" << rule.name() << "' (" << rule_origin(rule) << "):\n\n";
  if (!above.empty()) os << above << "\n";
  os << std::string(bar, '-') << " " << rule.name() << "\n" << below << "\n";
  return os.str();
}

std::string render_system(const System& system, const RenderStyle& style) {
  std::ostringstream os;
  bool latex = style.mode == RenderMode::Latex;
  for (std::size_t i = 0; i < system.rules().size(); ++i) {
    if (latex)
      os << "\\[ " << render_rule(*system.rules()[i], style) << " \\]\n";
    else
      os << (i ? "\n" : "") << render_rule(*system.rules()[i], style);
  }
  return os.str();
}

std::string render_tree(const InferenceTree& tree, const RenderStyle& style) {
  Renderer r(style);
  if (style.mode == RenderMode::Latex) return latex_tree(tree, r);
  std::string out;
  for (const auto& line : tree_block(tree, r)) out += line + "\n";
  return out;
}

std::string to_string(const Term& t) {
  static const RenderStyle style = RenderStyle::console();
  return render_term(t, style);
}

std::string to_string(const DataValue& v) {
  static const RenderStyle style = RenderStyle::console();
  return render_value(v, style);
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }

}  // namespace sos
