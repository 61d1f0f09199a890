// Inference rules, instances, trees and the answer enumerator.
#pragma once

#include "sos/term.hpp"
#include "sos/unification.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <source_location>
#include <stdexcept>
#include <string>
#include <vector>

namespace sos {

enum class Verdict { Satisfiable, Violated, Satisfied };

// A decidable predicate over substitutions of the rule's own variables.
class Condition {
 public:
  using Fn = std::function<Verdict(const Substitution&)>;

  Condition(std::string description, Fn fn);

  // Satisfied iff the substituted term evaluates to the boolean true.
  // Satisfiable while variables remain.
  static Condition check(Term boolean_term);

  Verdict operator()(const Substitution& sigma) const { return fn_(sigma); }
  const std::string& description() const { return description_; }
  const std::optional<Term>& term() const { return term_; }

 private:
  std::string description_;
  Fn fn_;
  std::optional<Term> term_;
};

class Rule {
 public:
  Rule(std::string name, std::vector<Term> premises, Term conclusion, EquationSet equations = {},
       std::vector<Condition> conditions = {},
       std::source_location origin = std::source_location::current());

  const std::string& name() const { return name_; }
  const std::vector<Term>& premises() const { return premises_; }
  const Term& conclusion() const { return conclusion_; }
  const EquationSet& equations() const { return equations_; }
  const std::vector<Condition>& conditions() const { return conditions_; }
  const std::source_location& origin() const { return origin_; }
  // Variables of conclusion, equations and premises.
  const VarSet& variables() const { return variables_; }
  bool is_axiom() const { return premises_.empty(); }

 private:
  std::string name_;
  std::vector<Term> premises_;
  Term conclusion_;
  EquationSet equations_;
  std::vector<Condition> conditions_;
  std::source_location origin_;
  VarSet variables_;
};

using RulePtr = std::shared_ptr<const Rule>;

class System {
 public:
  explicit System(std::string name = {}) : name_(std::move(name)) {}

  // Throws std::invalid_argument on a duplicate rule name.
  RulePtr add(Rule rule);
  const std::vector<RulePtr>& rules() const { return rules_; }
  RulePtr find(const std::string& name) const;
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::vector<RulePtr> rules_;
};

struct Instance {
  RulePtr rule;
  Substitution sigma;

  Term conclusion() const;       // eval of the substituted conclusion
  Term premise(std::size_t i) const;
};

struct InferenceTree {
  Instance instance;
  std::vector<InferenceTree> subtrees;

  Term conclusion() const { return instance.conclusion(); }
  const std::string& rule_name() const { return instance.rule->name(); }
  std::size_t size() const;
};

struct Answer {
  Substitution sigma;  // restricted to the question's variables
  InferenceTree tree;
};

struct Diagnostic {
  bool ok = true;
  int clause = 0;  // violated instance clause, 1..5; 0 for structural tree errors
  std::string message;

  explicit operator bool() const { return ok; }
};

Diagnostic check_instance(const Rule& rule, const Substitution& sigma);
Diagnostic validate_tree(const InferenceTree& tree);

class NotAgnosticallySolvable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SearchOrder { BreadthFirst, DepthFirst };

struct EngineOptions {
  SearchOrder order = SearchOrder::BreadthFirst;
  std::optional<std::size_t> step_budget;  // node expansions
  std::vector<ResolutionStrategy> strategies = {out_of_range_strategy()};
  // Backtracking over rule order on semi-solved sets is not supported and must stay off.
  bool backtrack_rule_order = false;
  // Receives every renaming substitution the engine creates.
  std::function<void(const Substitution&)> on_rename;
};

class AnswerStream {
 public:
  enum class Status { Running, Exhausted, BudgetExhausted };

  AnswerStream(const System& system, Term question, EngineOptions options = {});
  ~AnswerStream();
  AnswerStream(AnswerStream&&) noexcept;
  AnswerStream& operator=(AnswerStream&&) noexcept;

  // Next answer, or nullopt when the stream ended; see status() for why.
  std::optional<Answer> next();
  Status status() const;
  std::size_t steps() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

AnswerStream iter_answers(const System& system, const Term& question, EngineOptions options = {});

// Collects every answer; throws BudgetExhausted if the budget ran out.
std::vector<Answer> all_answers(const System& system, const Term& question, EngineOptions options = {});

}  // namespace sos
