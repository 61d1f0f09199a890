// Turing machines compiled into inference rule systems whose language is the accepted inputs.
#pragma once

#include "sos/inference.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sos::tm {

enum class Move { Left, Right };

struct Action {
  std::string state;
  std::string write;
  Move move;
};

struct TuringMachine {
  std::set<std::string> states;
  std::set<std::string> tape_alphabet;
  std::string blank;
  std::set<std::string> input_alphabet;
  std::string initial;
  std::set<std::string> accepting;
  std::map<std::pair<std::string, std::string>, Action> delta;  // (state, read) -> action

  // Throws std::invalid_argument describing the first malformation.
  void validate() const;
};

class SpecError : public std::runtime_error {
 public:
  SpecError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Header lines "states:", "input:", "tape:", "blank:", "initial:", "accept:" and one
// "delta: q,y -> q',y',L|R" per transition; '#' starts a comment.
TuringMachine parse_spec(std::string_view text);
TuringMachine load_spec(const std::string& path);

// (xs :: x) stacks with nil at the bottom.
Term nil();
Term push(const Term& stack, const Term& top);
Term configuration(const Term& state, const Term& left, const Term& current, const Term& right);

// One left or right-plus-extend rule per transition, a halt axiom per accepting state,
// plus input and empty.
System compile(const TuringMachine& tm);

// "abc" becomes ((nil :: c) :: b) :: a. Throws std::invalid_argument outside the input alphabet.
Term encode_input(const TuringMachine& tm, const std::vector<std::string>& word);

// Splits on commas or spaces when present, otherwise into single characters.
std::vector<std::string> split_word(std::string_view text);

enum class Verdict { Accepted, Rejected, BudgetExhausted };
const char* verdict_name(Verdict v);

Verdict accepts(const TuringMachine& tm, const std::vector<std::string>& word, std::size_t budget);
Verdict accepts(const System& compiled, const TuringMachine& tm, const std::vector<std::string>& word,
                std::size_t budget);

}  // namespace sos::tm
