// Independent oracles and random generators shared by the test binaries.
#pragma once

#include "sos/arith.hpp"
#include "sos/ccs.hpp"
#include "sos/runtime.hpp"
#include "sos/tm.hpp"
#include "sos/unification.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using sos::Integer;
using sos::Term;

// Direct recursive evaluation of an arithmetic expression, floor division.
inline std::optional<Integer> evaluate(const Term& e) {
  if (e.is_value()) return e.data().as_integer();
  auto l = evaluate(e[0]);
  auto r = evaluate(e[2]);
  if (!l || !r) return std::nullopt;
  const std::string& op = e[1].name();
  if (op == "+") return *l + *r;
  if (op == "-") return *l - *r;
  if (op == "*") return *l * *r;
  if (*r == 0) return std::nullopt;
  Integer q = *l / *r;
  if ((*l % *r != 0) && ((*l < 0) != (*r < 0))) --q;
  return q;
}

// Binary nodes whose operands are both integers, excluding division by zero.
inline std::size_t count_redexes(const Term& e) {
  if (e.is_value()) return 0;
  if (e[0].is_value() && e[2].is_value()) return !(e[1].name() == "/" && e[2].data().as_integer() == 0);
  return count_redexes(e[0]) + count_redexes(e[2]);
}

enum class Run { Accept, Reject, Diverge };

// Step-by-step simulation on an explicit tape. Moving left off the tape's left end
// halts without accepting, matching the construction where the left stack cannot be popped.
inline Run simulate(const sos::tm::TuringMachine& tm, const std::vector<std::string>& word, std::size_t max_steps) {
  std::vector<std::string> tape = word;
  if (tape.empty()) tape.push_back(tm.blank);
  std::size_t head = 0;
  std::string q = tm.initial;
  for (std::size_t step = 0; step <= max_steps; ++step) {
    if (tm.accepting.count(q)) return Run::Accept;
    auto it = tm.delta.find({q, tape[head]});
    if (it == tm.delta.end()) return Run::Reject;
    tape[head] = it->second.write;
    q = it->second.state;
    if (it->second.move == sos::tm::Move::Left) {
      if (head == 0) return Run::Reject;
      --head;
    } else {
      ++head;
      if (head == tape.size()) tape.push_back(tm.blank);
    }
  }
  return Run::Diverge;
}

inline std::vector<std::vector<std::string>> all_words(const std::set<std::string>& alphabet, std::size_t max_len) {
  std::vector<std::vector<std::string>> out = {{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (const auto& a : alphabet) {
        auto w = out[i];
        w.push_back(a);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

// Which ground assignments of xs over the domain unify eqs, by exhaustive enumeration.
inline std::vector<bool> unifier_mask(const sos::EquationSet& eqs, const std::vector<sos::Variable>& xs,
                                      const std::vector<Term>& domain) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) total *= domain.size();
  std::vector<bool> mask(total);
  for (std::size_t code = 0; code < total; ++code) {
    sos::Substitution sigma;
    std::size_t c = code;
    for (const auto& x : xs) {
      sigma.bind(x, domain[c % domain.size()]);
      c /= domain.size();
    }
    mask[code] = sos::is_unifier(sigma, eqs);
  }
  return mask;
}

}  // namespace oracle

namespace gen {

using sos::Term;
using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

// Terms over the given variables, integers 0..3, add and identity; with_sequences adds pairs.
struct EquationGen {
  std::vector<Term> variables;
  bool with_sequences = false;

  Term term(Rng& rng, int depth) const {
    std::size_t leaf_kinds = 2;
    std::size_t kinds = depth > 0 ? leaf_kinds + 2 + (with_sequences ? 1 : 0) : leaf_kinds;
    switch (pick(rng, kinds)) {
      case 0: return variables[pick(rng, variables.size())];
      case 1: return Term::integer(static_cast<long long>(pick(rng, 4)));
      case 2: return Term::apply(sos::ops::add(), {term(rng, depth - 1), term(rng, depth - 1)});
      case 3: return Term::apply(sos::ops::identity(), {term(rng, depth - 1)});
      default: {
        std::vector<Term> parts;
        for (std::size_t i = 0, n = 1 + pick(rng, 2); i < n; ++i) parts.push_back(term(rng, depth - 1));
        return Term::sequence(std::move(parts));
      }
    }
  }

  sos::EquationSet equations(Rng& rng, int depth = 2, std::size_t max_eqs = 4) const {
    sos::EquationSet eqs;
    for (std::size_t i = 0, n = 1 + pick(rng, max_eqs); i < n; ++i) eqs.push_back({term(rng, depth), term(rng, depth)});
    return eqs;
  }
};

inline Term arith_expr(Rng& rng, int depth, bool allow_div = true) {
  if (depth == 0 || pick(rng, 3) == 0) return Term::integer(static_cast<long long>(pick(rng, 21)) - 10);
  static const char* ops[] = {"+", "-", "*", "/"};
  const char* op = ops[pick(rng, allow_div ? 4 : 3)];
  return sos::arith::binary_expr(arith_expr(rng, depth - 1, allow_div), Term::symbol(op),
                                 arith_expr(rng, depth - 1, allow_div));
}

inline Term ccs_action(Rng& rng) {
  static const char* names[] = {"a", "b", "c"};
  std::string n = names[pick(rng, 3)];
  switch (pick(rng, 4)) {
    case 0: return sos::ccs::generative(n);
    case 1: return sos::ccs::reactive(n);
    case 2: return sos::ccs::internal(n);
    default: return sos::ccs::tau();
  }
}

// Sequential processes: prefixes and choices only.
inline Term ccs_sequential(Rng& rng, int depth) {
  if (depth == 0 || pick(rng, 4) == 0) return sos::ccs::dead();
  if (pick(rng, 3) == 0) return sos::ccs::choice(ccs_sequential(rng, depth - 1), ccs_sequential(rng, depth - 1));
  return sos::ccs::prefix(ccs_action(rng), ccs_sequential(rng, depth - 1));
}

// Adds parallel composition, restriction and guarded recursion.
inline Term ccs_process(Rng& rng, int depth) {
  if (depth == 0) return ccs_sequential(rng, 1);
  switch (pick(rng, 6)) {
    case 0: return sos::ccs::parallel(ccs_process(rng, depth - 1), ccs_process(rng, depth - 1));
    case 1: return sos::ccs::restrict(ccs_process(rng, depth - 1), {ccs_action(rng), ccs_action(rng)});
    case 2: {
      Term x = sos::ccs::process_variable("X");
      return sos::ccs::fix(x, sos::ccs::prefix(ccs_action(rng), sos::ccs::choice(x, ccs_sequential(rng, 1))));
    }
    case 3: return sos::ccs::choice(ccs_process(rng, depth - 1), ccs_sequential(rng, 1));
    default: return sos::ccs::prefix(ccs_action(rng), ccs_process(rng, depth - 1));
  }
}

}  // namespace gen

namespace props {

// Violation counters for the unification property suite.
struct UnificationStats {
  std::size_t sets = 0;
  std::size_t steps = 0;
  std::size_t measure = 0;         // a non-failing step that did not decrease the measure
  std::size_t classification = 0;  // terminal state neither failure nor semi-solved
  std::size_t preservation = 0;    // a step changed the set of ground unifiers
  std::size_t unifier = 0;         // a solved substitution that does not unify the input
  std::vector<sos::UnifRule> measure_rules;

  std::size_t violations() const { return measure + classification + preservation + unifier; }
};

inline void check_unification(const sos::EquationSet& eqs, const std::vector<sos::Term>& domain,
                              UnificationStats& stats) {
  ++stats.sets;
  auto vs = sos::vars(eqs);
  std::vector<sos::Variable> xs(vs.begin(), vs.end());
  sos::Unifier u;
  u.add(eqs);
  sos::EquationSet before = u.equations();
  auto measure = sos::termination_measure(before);
  auto mask = oracle::unifier_mask(before, xs, domain);
  u.solve([&](sos::UnifRule rule, const sos::Unifier& now) {
    ++stats.steps;
    if (now.failed()) {
      if (std::find(mask.begin(), mask.end(), true) != mask.end()) ++stats.preservation;
      return;
    }
    auto after = now.equations();
    auto m = sos::termination_measure(after);
    if (!(m < measure)) {
      ++stats.measure;
      stats.measure_rules.push_back(rule);
    }
    auto next_mask = oracle::unifier_mask(after, xs, domain);
    if (next_mask != mask) ++stats.preservation;
    measure = m;
    mask = std::move(next_mask);
  });
  if (u.failed()) return;
  if (!sos::semi_solved_split(u.equations())) ++stats.classification;
  auto outcome = u.outcome();
  if (auto* solved = std::get_if<sos::Solved>(&outcome))
    if (!sos::is_unifier(solved->sigma, eqs)) ++stats.unifier;
}


// Soundness of every answer to the transition question of one state.
struct SoundnessStats {
  std::size_t questions = 0;
  std::size_t answers = 0;
  std::size_t violations = 0;
  std::string first_failure;
};

inline void check_soundness(const sos::System& system, const sos::TransitionSchema& schema, const sos::Term& state,
                            SoundnessStats& stats) {
  ++stats.questions;
  auto q = schema.question(state);
  auto stream = sos::iter_answers(system, q.term);
  while (auto answer = stream.next()) {
    ++stats.answers;
    std::string problem;
    if (auto d = sos::validate_tree(answer->tree); !d)
      problem = d.message;
    else if (answer->sigma.domain() != sos::vars(q.term))
      problem = "answer does not bind exactly the question variables";
    else if (auto inst = sos::eval(answer->sigma.apply(q.term)); !inst || !(*inst == answer->tree.conclusion()))
      problem = "tree concludes something other than the instantiated question";
    if (!problem.empty()) {
      if (stats.violations++ == 0) stats.first_failure = sos::to_string(state) + ": " + problem;
    }
  }
}

}  // namespace props
