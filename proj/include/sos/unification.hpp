// Semantic term unification by transformation rules.
#pragma once

#include "sos/term.hpp"

#include <array>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace sos {

struct Equation {
  Term left;
  Term right;

  friend bool operator==(const Equation&, const Equation&) = default;
};

using EquationSet = std::vector<Equation>;

VarSet vars(const EquationSet& eqs);

enum class UnifRule { Del, AFail, Seq, SFail, SLFail, SRFail, Swap, Elim, CFail, Eval, UEval };
std::string_view rule_name(UnifRule r);

struct Solved {
  Substitution sigma;
};
struct SemiSolved {
  Substitution partial;
  EquationSet remaining;
};
struct Failure {
  std::optional<UnifRule> by;  // empty when a resolution strategy refuted the problem
};
using Outcome = std::variant<Solved, SemiSolved, Failure>;

inline bool is_failure(const Outcome& o) { return std::holds_alternative<Failure>(o); }
inline bool is_solved(const Outcome& o) { return std::holds_alternative<Solved>(o); }

class Unifier;
// Called after every rule application with the rule and the resulting state.
using StepObserver = std::function<void(UnifRule, const Unifier&)>;

// Incremental unification state: pending queue, solved part, deferred remaining part.
class Unifier {
 public:
  Unifier() = default;

  // Queues an equation; the current solved part is applied to it first.
  void add(const Equation& eq);
  void add(const EquationSet& eqs);

  // Applies transformation rules until none is applicable.
  void solve(const StepObserver& observer = nullptr);

  bool failed() const { return failed_.has_value(); }
  std::optional<UnifRule> failed_by() const { return failed_; }
  // Merged view of the solved part; lookup avoids building it.
  Substitution solution() const;
  const Term* lookup(const Variable& x) const;
  const EquationSet& remaining() const { return deferred_; }
  bool has_pending() const { return !pending_.empty(); }

  // The whole equation set: pending, solved part and remaining part.
  EquationSet equations() const;
  Outcome outcome() const;

 private:
  bool step(const StepObserver& observer);
  void fail(UnifRule r, const StepObserver& observer);
  bool occurs_elsewhere(const Variable& x, bool unguarded_only) const;
  void eliminate(const Variable& x, const Term& t);
  void reintegrate_deferred();
  Term resolve(const Term& t) const;
  void bind_solved(const Variable& x, Term t);
  void erase_solved(const Variable& x);

  std::deque<Equation> pending_;
  EquationSet deferred_;
  // The solved part is split so that copies stay cheap: closed bindings never change
  // and migrate into shared frozen layers of decreasing size, the rest lives in solved_.
  std::vector<std::shared_ptr<const Substitution>> frozen_;
  Substitution solved_;
  VarSet open_;  // variables of solved_ bound to terms with variables
  std::optional<UnifRule> failed_;
};

Outcome solve(const EquationSet& eqs, const StepObserver& observer = nullptr);

// Lexicographic termination measure <n_x, n_op, n_seq, n_swap, n_eq>.
using Measure = std::array<std::size_t, 5>;
Measure termination_measure(const EquationSet& eqs);

// Whether the set admits a solved/remaining partition in the semi-solved sense.
// On success the partition is returned.
struct SemiSolvedSplit {
  EquationSet solved;
  EquationSet remaining;
};
std::optional<SemiSolvedSplit> semi_solved_split(const EquationSet& eqs);

// Whether sigma is a semantic unifier of every equation.
bool is_unifier(const Substitution& sigma, const EquationSet& eqs);

struct Block {
  VarSet variables;
  EquationSet equations;
};

// Splits the remaining part (plus dependent solved equations) into independent blocks.
std::vector<Block> segment_remaining(const SemiSolved& state);

enum class RangeVerdict { Failure, Unknown };
RangeVerdict out_of_range_check(const EquationSet& block);

// Extension point for operator-aware strategies: nullopt means no claim.
using ResolutionStrategy = std::function<std::optional<Outcome>(const Block&)>;
ResolutionStrategy out_of_range_strategy();

}  // namespace sos
