// Console and LaTeX rendering of terms, rules and trees.
#pragma once

#include "sos/inference.hpp"
#include "sos/term.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sos {

enum class RenderMode { Console, Latex };

struct RenderStyle;
using SubRender = std::function<std::string(const Term&)>;
// Returns nullopt to fall back to the default form.
using OperatorHook = std::function<std::optional<std::string>(std::span<const Term> args, const SubRender& sub)>;
using SequenceHook = std::function<std::optional<std::string>(const Term& seq, const SubRender& sub)>;

struct SymbolForm {
  std::string text;
  std::string math;
};

struct RenderStyle {
  RenderMode mode = RenderMode::Console;
  bool color = false;
  std::map<std::string, SymbolForm> symbols;          // by symbol name
  std::map<std::string, std::string> variable_math;   // display name -> math form
  std::map<std::string, OperatorHook> console_ops;    // by operator name
  std::map<std::string, OperatorHook> latex_ops;
  std::vector<SequenceHook> latex_sequences;          // tried in order

  // Built-in hooks for the generic operators and transition shapes.
  static RenderStyle console(bool color = false);
  static RenderStyle latex(bool color = false);
};

std::string render_term(const Term& t, const RenderStyle& style);
std::string render_value(const DataValue& v, const RenderStyle& style);
std::string render_substitution(const Substitution& sigma, const RenderStyle& style);
std::string render_equation(const Equation& e, const RenderStyle& style);

// Console: banner with the definition site, then a fraction. LaTeX: \inferrule-free \frac form.
std::string render_rule(const Rule& rule, const RenderStyle& style);
std::string render_system(const System& system, const RenderStyle& style);
std::string render_tree(const InferenceTree& tree, const RenderStyle& style);

// Definition site as "dir/file.cpp:line", trimmed to the source tree.
std::string rule_origin(const Rule& rule);

}  // namespace sos
