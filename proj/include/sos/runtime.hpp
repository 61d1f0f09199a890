// Turns a semantics into an interpreter: successor enumeration and LTS exploration.
#pragma once

#include "sos/inference.hpp"
#include "sos/render.hpp"
#include "sos/term.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sos {

// (s = α => t)
Term transition_term(const Term& source, const Term& action, const Term& target);
// (Γ ⊨ s = α => t)
Term transition_term(const Term& env, const Term& source, const Term& action, const Term& target);

class TransitionSchema {
 public:
  struct Question {
    Term term;
    Variable action;
    Variable target;
  };

  static TransitionSchema plain(std::string action_name = "α", std::string target_name = "u");
  static TransitionSchema with_environment(Term env, std::string action_name = "α", std::string target_name = "t");

  // Builds the question for a state, with fresh action and target variables.
  Question question(const Term& state) const;
  const std::optional<Term>& environment() const { return env_; }

 private:
  std::optional<Term> env_;
  std::string action_name_;
  std::string target_name_;
};

struct Successor {
  Term action;
  Term target;
  InferenceTree tree;
};

struct SuccessorOptions {
  SearchOrder order = SearchOrder::BreadthFirst;
  std::optional<std::size_t> step_budget;
};

// Throws BudgetExhausted if the budget ran out, NotAgnosticallySolvable from the engine.
std::vector<Successor> successors(const System& system, const TransitionSchema& schema, const Term& state,
                                  const SuccessorOptions& options = {});

struct Transition {
  std::size_t source;
  Term action;
  std::size_t target;
  InferenceTree tree;
};

struct Lts {
  std::vector<Term> states;  // discovery order; states[initial] is the start
  std::vector<Term> actions;
  std::vector<Transition> transitions;
  std::size_t initial = 0;
  bool complete = true;

  std::optional<std::size_t> index_of(const Term& state) const;
  std::vector<std::size_t> terminal_states() const;

  // "state <idx> <term>" and "trans <src> <action> <dst>" lines.
  std::string serialize(const RenderStyle& style = RenderStyle::console()) const;

  std::unordered_map<Term, std::size_t> index;
};

struct ExploreOptions {
  std::optional<std::size_t> max_states;
  std::optional<std::size_t> max_depth;
  SuccessorOptions successor;
  unsigned workers = 1;  // frontier states expanded concurrently
  // Post-hoc transition filter; none of the bundled semantics installs one.
  std::function<bool(const Term& source, const Term& action, const Term& target)> keep;
};

Lts explore(const System& system, const TransitionSchema& schema, const Term& initial,
            const ExploreOptions& options = {});

// The explore subcommand's output: initial state, one Source/Action/Target block per
// transition, then a short summary.
std::string explore_transcript(const Lts& lts, const RenderStyle& style, bool print_trees);

}  // namespace sos
