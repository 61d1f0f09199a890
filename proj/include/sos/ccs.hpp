// Calculus of Communicating Systems: process terms, the nine transition rules and a parser.
#pragma once

#include "sos/inference.hpp"
#include "sos/render.hpp"
#include "sos/runtime.hpp"
#include "sos/syntax.hpp"

#include <map>
#include <string>
#include <string_view>

namespace sos::ccs {

inline constexpr const char* kProcessVariableKind = "process-variable";

// Swaps (a !) and (a ?); identity on symbols such as τ; undefined otherwise.
const OperatorPtr& complement_op();

Term tau();
Term dead();
Term generative(const std::string& name);  // (name !)
Term reactive(const std::string& name);    // (name ?)
Term internal(const std::string& name);    // bare symbol
Term process_variable(const std::string& name);
Term prefix(const Term& action, const Term& process);
Term choice(const Term& left, const Term& right);
Term parallel(const Term& left, const Term& right);
Term restrict(const Term& process, const std::vector<Term>& actions);
Term restrict(const Term& process, const Term& action_set);
Term fix(const Term& variable, const Term& process);
Term environment(const std::map<std::string, Term>& bindings);

// prefix, choice-l, choice-r, par-l, par-r, sync, rec, res, fix.
const System& system();
TransitionSchema schema(const Term& env = environment({}));

// Grammar, loosest first: P + Q, P || Q, α . P (right associative), P \ {α, ...}.
// Atoms are 0, uppercase process variables, fix X = P and parentheses.
// Actions: name, name?, name!, τ (or tau). Throws SyntaxError.
Term parse_process(std::string_view text);

// Console and LaTeX forms of the complement operator and the rule variables.
void decorate(RenderStyle& style);

}  // namespace sos::ccs
