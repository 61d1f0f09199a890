#include "sos/runtime.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace sos {

Term transition_term(const Term& source, const Term& action, const Term& target) {
  return Term::sequence({source, Term::symbol("="), action, Term::symbol("=>"), target});
}

Term transition_term(const Term& env, const Term& source, const Term& action, const Term& target) {
  return Term::sequence({env, Term::symbol("⊨"), source, Term::symbol("="), action, Term::symbol("=>"), target});
}

TransitionSchema TransitionSchema::plain(std::string action_name, std::string target_name) {
  TransitionSchema s;
  s.action_name_ = std::move(action_name);
  s.target_name_ = std::move(target_name);
  return s;
}

TransitionSchema TransitionSchema::with_environment(Term env, std::string action_name, std::string target_name) {
  if (!env.is_closed()) throw std::invalid_argument("environment must be closed");
  TransitionSchema s = plain(std::move(action_name), std::move(target_name));
  s.env_ = std::move(env);
  return s;
}

TransitionSchema::Question TransitionSchema::question(const Term& state) const {
  Variable a = Variable::fresh(action_name_);
  Variable t = Variable::fresh(target_name_);
  Term q = env_ ? transition_term(*env_, state, Term::variable(a), Term::variable(t))
                : transition_term(state, Term::variable(a), Term::variable(t));
  return {std::move(q), std::move(a), std::move(t)};
}

std::vector<Successor> successors(const System& system, const TransitionSchema& schema, const Term& state,
                                  const SuccessorOptions& options) {
  if (!state.is_closed()) throw std::invalid_argument("state must be closed: " + to_string(state));
  auto q = schema.question(state);
  EngineOptions engine;
  engine.order = options.order;
  engine.step_budget = options.step_budget;
  std::vector<Successor> out;
  for (auto& answer : all_answers(system, q.term, std::move(engine))) {
    const Term* a = answer.sigma.find(q.action);
    const Term* t = answer.sigma.find(q.target);
    auto action = eval(*a);
    auto target = eval(*t);
    if (!action || !target) throw std::logic_error("answer binds an undefined term");
    out.push_back({*action, *target, std::move(answer.tree)});
  }
  return out;
}

std::optional<std::size_t> Lts::index_of(const Term& state) const {
  auto it = index.find(state);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Lts::terminal_states() const {
  std::vector<bool> has_out(states.size(), false);
  for (const auto& t : transitions) has_out[t.source] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!has_out[i]) out.push_back(i);
  return out;
}

std::string Lts::serialize(const RenderStyle& style) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < states.size(); ++i) os << "state " << i << " " << render_term(states[i], style) << "\n";
  for (const auto& t : transitions)
    os << "trans " << t.source << " " << render_term(t.action, style) << " " << t.target << "\n";
  return os.str();
}

namespace {

struct Expansion {
  std::vector<Successor> successors;
  std::exception_ptr error;
};

std::vector<Expansion> expand_level(const System& system, const TransitionSchema& schema,
                                    const std::vector<Term>& frontier, const ExploreOptions& options) {
  std::vector<Expansion> results(frontier.size());
  auto work = [&](std::size_t i) {
    try {
      results[i].successors = successors(system, schema, frontier[i], options.successor);
    } catch (...) {
      results[i].error = std::current_exception();
    }
  };
  unsigned workers = std::max(1u, options.workers);
  if (workers == 1 || frontier.size() < 2) {
    for (std::size_t i = 0; i < frontier.size(); ++i) work(i);
    return results;
  }
  // Static striping keeps the assignment independent of timing; results are merged by index.
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers && w < frontier.size(); ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < frontier.size(); i += workers) work(i);
    });
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace

Lts explore(const System& system, const TransitionSchema& schema, const Term& initial, const ExploreOptions& options) {
  auto start = eval(initial);
  if (!start || !start->is_closed()) throw std::invalid_argument("initial state must be closed and defined");
  Lts lts;
  lts.states.push_back(*start);
  lts.index.emplace(*start, 0);

  std::unordered_map<Term, std::size_t> action_index;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;  // (src, action, dst)

  std::vector<std::size_t> frontier = {0};
  std::size_t depth = 0;
  while (!frontier.empty()) {
    if (options.max_depth && depth >= *options.max_depth) {
      lts.complete = false;
      break;
    }
    std::vector<Term> terms;
    for (auto i : frontier) terms.push_back(lts.states[i]);
    auto results = expand_level(system, schema, terms, options);

    std::vector<std::size_t> next;
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      if (results[k].error) std::rethrow_exception(results[k].error);
      for (auto& s : results[k].successors) {
        if (options.keep && !options.keep(terms[k], s.action, s.target)) continue;
        std::size_t dst;
        if (auto found = lts.index_of(s.target)) {
          dst = *found;
        } else {
          if (options.max_states && lts.states.size() >= *options.max_states) {
            lts.complete = false;
            continue;
          }
          dst = lts.states.size();
          lts.states.push_back(s.target);
          lts.index.emplace(s.target, dst);
          next.push_back(dst);
        }
        auto [ait, fresh_action] = action_index.emplace(s.action, lts.actions.size());
        if (fresh_action) lts.actions.push_back(s.action);
        if (!seen.emplace(frontier[k], ait->second, dst).second) continue;
        lts.transitions.push_back({frontier[k], s.action, dst, std::move(s.tree)});
      }
    }
    frontier = std::move(next);
    ++depth;
  }
  return lts;
}

std::string explore_transcript(const Lts& lts, const RenderStyle& style, bool print_trees) {
  std::ostringstream os;
  os << "Initial State: " << render_term(lts.states[lts.initial], style) << "\n\n";
  for (const auto& t : lts.transitions) {
    os << "Source: " << render_term(lts.states[t.source], style) << "\n";
    os << "Action: " << render_term(t.action, style) << "\n";
    os << "Target: " << render_term(lts.states[t.target], style) << "\n";
    if (print_trees) os << "\n" << render_tree(t.tree, style);
    os << "\n";
  }
  os << "States: " << lts.states.size() << ", transitions: " << lts.transitions.size()
     << (lts.complete ? "" : " (truncated)") << "\n";
  auto terminal = lts.terminal_states();
  os << "Terminal states:";
  if (terminal.empty()) os << " none";
  os << "\n";
  for (auto i : terminal) os << "  " << render_term(lts.states[i], style) << "\n";
  return os.str();
}

}  // namespace sos
