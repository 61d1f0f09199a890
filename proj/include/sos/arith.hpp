// Arithmetic expressions: binary expressions over integers with a small-step semantics.
#pragma once

#include "sos/inference.hpp"
#include "sos/render.hpp"
#include "sos/runtime.hpp"
#include "sos/syntax.hpp"

#include <string_view>

namespace sos::arith {

// The operator symbols + - * / as a set value, in that order.
const Term& binary_operators();

Term binary_expr(const Term& left, const Term& op, const Term& right);

// l-eval, r-eval, add-eval, sub-eval, mul-eval, div-eval.
const System& system();
TransitionSchema schema();

// Standard precedence, left associative; integer literals may carry a leading minus.
// Throws SyntaxError.
Term parse_expr(std::string_view text);

// Adds the math forms of the rule variables (O as \circ).
void decorate(RenderStyle& style);

}  // namespace sos::arith
