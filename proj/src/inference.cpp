#include "sos/inference.hpp"

#include <deque>
#include <map>
#include <sstream>
#include <type_traits>

namespace sos {

// ---------------------------------------------------------------------------
// Conditions, rules, systems

Condition::Condition(std::string description, Fn fn) : description_(std::move(description)), fn_(std::move(fn)) {}

Condition Condition::check(Term boolean_term) {
  Term t = boolean_term;
  Condition c(to_string(t), [t](const Substitution& sigma) {
    Term s = sigma.apply(t);
    if (!s.is_closed()) return Verdict::Satisfiable;
    auto v = eval(s);
    if (v && v->is_value() && v->data().kind() == DataValue::Kind::Boolean && v->data().as_boolean())
      return Verdict::Satisfied;
    return Verdict::Violated;
  });
  c.term_ = std::move(boolean_term);
  return c;
}

Rule::Rule(std::string name, std::vector<Term> premises, Term conclusion, EquationSet equations,
           std::vector<Condition> conditions, std::source_location origin)
    : name_(std::move(name)),
      premises_(std::move(premises)),
      conclusion_(std::move(conclusion)),
      equations_(std::move(equations)),
      conditions_(std::move(conditions)),
      origin_(origin) {
  collect_vars(conclusion_, variables_);
  for (const auto& e : equations_) {
    collect_vars(e.left, variables_);
    collect_vars(e.right, variables_);
  }
  for (const auto& p : premises_) collect_vars(p, variables_);
}

RulePtr System::add(Rule rule) {
  if (find(rule.name())) throw std::invalid_argument("duplicate rule name '" + rule.name() + "'");
  rules_.push_back(std::make_shared<const Rule>(std::move(rule)));
  return rules_.back();
}

RulePtr System::find(const std::string& name) const {
  for (const auto& r : rules_)
    if (r->name() == name) return r;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Instances and trees

namespace {
Term eval_or_throw(const Term& t) {
  auto e = eval(t);
  if (!e) throw std::logic_error("instance term is ill-formed: " + to_string(t));
  return *e;
}
}  // namespace

Term Instance::conclusion() const { return eval_or_throw(sigma.apply(rule->conclusion())); }
Term Instance::premise(std::size_t i) const { return eval_or_throw(sigma.apply(rule->premises().at(i))); }

std::size_t InferenceTree::size() const {
  std::size_t n = 1;
  for (const auto& s : subtrees) n += s.size();
  return n;
}

Diagnostic check_instance(const Rule& rule, const Substitution& sigma) {
  auto bad = [](int clause, std::string msg) { return Diagnostic{false, clause, std::move(msg)}; };
  if (sigma.domain() != rule.variables()) return bad(1, "domain differs from the rule's variables");
  if (!sigma.vrange().empty()) return bad(1, "variables left in the range");
  for (std::size_t i = 0; i < rule.premises().size(); ++i)
    if (!eval(sigma.apply(rule.premises()[i]))) return bad(2, "premise " + std::to_string(i + 1) + " is undefined");
  for (const auto& e : rule.equations()) {
    auto l = eval(sigma.apply(e.left));
    auto r = eval(sigma.apply(e.right));
    if (!l || !r || !(*l == *r))
      return bad(3, "equation " + to_string(e.left) + " = " + to_string(e.right) + " does not hold");
  }
  for (const auto& c : rule.conditions())
    if (c(sigma) != Verdict::Satisfied) return bad(4, "condition " + c.description() + " not satisfied");
  if (!eval(sigma.apply(rule.conclusion()))) return bad(5, "conclusion is undefined");
  return {};
}

Diagnostic validate_tree(const InferenceTree& tree) {
  const Rule& rule = *tree.instance.rule;
  if (auto d = check_instance(rule, tree.instance.sigma); !d) {
    d.message = rule.name() + ": " + d.message;
    return d;
  }
  if (tree.subtrees.size() != rule.premises().size())
    return {false, 0, rule.name() + ": expected " + std::to_string(rule.premises().size()) + " subtrees"};
  for (std::size_t i = 0; i < tree.subtrees.size(); ++i) {
    if (auto d = validate_tree(tree.subtrees[i]); !d) return d;
    if (!(tree.subtrees[i].conclusion() == tree.instance.premise(i)))
      return {false, 0, rule.name() + ": subtree " + std::to_string(i + 1) + " concludes " +
                            to_string(tree.subtrees[i].conclusion()) + " instead of " +
                            to_string(tree.instance.premise(i))};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Engine

namespace {

struct RenamedRule {
  RulePtr rule;
  Substitution renaming;  // original variable -> fresh variable
  std::vector<Term> premises;
  EquationSet equations;
  Term conclusion;
};

std::shared_ptr<const RenamedRule> rename(const RulePtr& rule) {
  Substitution rho;
  for (const auto& v : rule->variables()) rho.bind(v, Term::variable(Variable::fresh(v.display)));
  std::vector<Term> premises;
  for (const auto& p : rule->premises()) premises.push_back(rho.apply(p));
  EquationSet eqs;
  for (const auto& e : rule->equations()) eqs.push_back({rho.apply(e.left), rho.apply(e.right)});
  Term conclusion = rho.apply(rule->conclusion());
  return std::make_shared<const RenamedRule>(
      RenamedRule{rule, std::move(rho), std::move(premises), std::move(eqs), std::move(conclusion)});
}

// Which renamed rule fills a tree slot; persistent so nodes share history.
struct Assignment {
  std::size_t slot;
  std::shared_ptr<const RenamedRule> rule;
  std::size_t first_child;
  std::shared_ptr<const Assignment> prev;
};

struct PendingTerm {
  Term term;
  std::size_t slot;
};

struct PendingCondition {
  std::shared_ptr<const RenamedRule> rule;
  std::size_t index;
};

struct Node {
  Unifier unifier;
  std::vector<PendingTerm> pending;
  std::vector<PendingCondition> conditions;
  std::shared_ptr<const Assignment> assignments;
  std::size_t next_slot = 1;
};

// Maps the solver's bindings back onto the rule's own variables.
template <class Solution>
Substitution pull_back(const RenamedRule& rr, const Solution& solution) {
  Substitution out;
  for (const auto& [x, renamed] : rr.renaming) {
    const Term* t;
    if constexpr (std::is_same_v<Solution, Unifier>) t = solution.lookup(renamed.var());
    else t = solution.find(renamed.var());
    if (t) out.bind(x, *t);
  }
  return out;
}

std::string describe(const EquationSet& eqs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < eqs.size(); ++i)
    os << (i ? ", " : "") << to_string(eqs[i].left) << " =. " << to_string(eqs[i].right);
  return os.str();
}

}  // namespace

struct AnswerStream::State {
  System system;
  Term question;
  EngineOptions options;
  VarSet question_vars;
  std::deque<Node> queue;
  Status status = Status::Running;
  std::size_t steps = 0;

  std::vector<Node> expand(const Node& node);
  std::optional<Answer> finish(Node& node);
  InferenceTree build(const std::map<std::size_t, const Assignment*>& slots, std::size_t slot,
                      const Substitution& solution) const;
};

std::vector<Node> AnswerStream::State::expand(const Node& node) {
  std::vector<Node> children;
  const PendingTerm head = node.pending.front();
  for (const auto& rule : system.rules()) {
    auto rr = rename(rule);
    if (options.on_rename) options.on_rename(rr->renaming);
    Unifier u = node.unifier;
    u.add({head.term, rr->conclusion});
    u.solve();
    if (u.failed()) continue;
    u.add(rr->equations);
    u.solve();
    if (u.failed()) continue;

    std::vector<PendingCondition> conditions;
    bool violated = false;
    auto consider = [&](const PendingCondition& pc) {
      if (violated) return;
      const Condition& c = pc.rule->rule->conditions()[pc.index];
      switch (c(pull_back(*pc.rule, u))) {
        case Verdict::Violated: violated = true; break;
        case Verdict::Satisfiable: conditions.push_back(pc); break;
        case Verdict::Satisfied: break;
      }
    };
    for (const auto& pc : node.conditions) consider(pc);
    for (std::size_t i = 0; i < rule->conditions().size(); ++i) consider({rr, i});
    if (violated) continue;

    Node child;
    child.unifier = std::move(u);
    child.conditions = std::move(conditions);
    // Premises are appended, queue discipline per premise term.
    child.pending.assign(node.pending.begin() + 1, node.pending.end());
    std::size_t first_child = node.next_slot;
    for (std::size_t i = 0; i < rr->premises.size(); ++i) child.pending.push_back({rr->premises[i], first_child + i});
    child.next_slot = first_child + rr->premises.size();
    child.assignments = std::make_shared<const Assignment>(Assignment{head.slot, rr, first_child, node.assignments});
    children.push_back(std::move(child));
  }
  return children;
}

InferenceTree AnswerStream::State::build(const std::map<std::size_t, const Assignment*>& slots, std::size_t slot,
                                         const Substitution& solution) const {
  const Assignment* a = slots.at(slot);
  const RenamedRule& rr = *a->rule;
  Substitution sigma = pull_back(rr, solution);
  for (const auto& [x, renamed] : rr.renaming) {
    const Term* t = sigma.find(x);
    if (!t || !t->is_closed())
      throw NotAgnosticallySolvable("variable " + x.display + " of rule '" + rr.rule->name() +
                                    "' is not determined by unification");
  }
  InferenceTree tree{Instance{rr.rule, std::move(sigma)}, {}};
  for (std::size_t i = 0; i < rr.premises.size(); ++i) tree.subtrees.push_back(build(slots, a->first_child + i, solution));
  return tree;
}

std::optional<Answer> AnswerStream::State::finish(Node& node) {
  Unifier& u = node.unifier;
  // Give the resolution strategies a chance on the remaining part.
  bool progress = true;
  while (!u.remaining().empty() && progress) {
    progress = false;
    auto outcome = u.outcome();
    for (const auto& block : segment_remaining(std::get<SemiSolved>(outcome))) {
      for (const auto& strategy : options.strategies) {
        auto r = strategy(block);
        if (!r) continue;
        if (is_failure(*r)) return std::nullopt;
        if (auto* solved = std::get_if<Solved>(&*r)) {
          for (const auto& [x, t] : solved->sigma) u.add({Term::variable(x), t});
          u.solve();
          if (u.failed()) return std::nullopt;
          progress = true;
          break;
        }
      }
      if (progress) break;
    }
  }
  if (!u.remaining().empty())
    throw NotAgnosticallySolvable("not agnostically solvable: " + describe(u.remaining()));

  for (const auto& pc : node.conditions) {
    const Condition& c = pc.rule->rule->conditions()[pc.index];
    switch (c(pull_back(*pc.rule, u))) {
      case Verdict::Violated: return std::nullopt;
      case Verdict::Satisfiable:
        throw NotAgnosticallySolvable("condition " + c.description() + " of rule '" + pc.rule->rule->name() +
                                      "' is not decided by unification");
      case Verdict::Satisfied: break;
    }
  }

  Answer answer{{}, {}};
  for (const auto& x : question_vars) {
    const Term* t = u.lookup(x);
    if (!t || !t->is_closed())
      throw NotAgnosticallySolvable("question variable " + x.display + " is not determined by unification");
    answer.sigma.bind(x, *t);
  }
  std::map<std::size_t, const Assignment*> slots;
  for (const Assignment* a = node.assignments.get(); a; a = a->prev.get()) slots.emplace(a->slot, a);
  answer.tree = build(slots, 0, u.solution());
  return answer;
}

AnswerStream::AnswerStream(const System& system, Term question, EngineOptions options)
    : state_(std::make_unique<State>(State{system, question, std::move(options), vars(question), {}, Status::Running, 0})) {
  if (state_->options.backtrack_rule_order)
    throw std::invalid_argument("backtracking over rule order is not supported");
  Node root;
  root.pending.push_back({std::move(question), 0});
  state_->queue.push_back(std::move(root));
}

AnswerStream::~AnswerStream() = default;
AnswerStream::AnswerStream(AnswerStream&&) noexcept = default;
AnswerStream& AnswerStream::operator=(AnswerStream&&) noexcept = default;

std::optional<Answer> AnswerStream::next() {
  State& s = *state_;
  while (s.status == Status::Running) {
    if (s.queue.empty()) {
      s.status = Status::Exhausted;
      break;
    }
    if (s.options.step_budget && s.steps >= *s.options.step_budget) {
      s.status = Status::BudgetExhausted;
      break;
    }
    Node node = std::move(s.queue.front());
    s.queue.pop_front();
    ++s.steps;
    if (node.pending.empty()) {
      if (auto answer = s.finish(node)) return answer;
      continue;
    }
    auto children = s.expand(node);
    if (s.options.order == SearchOrder::BreadthFirst) {
      for (auto& c : children) s.queue.push_back(std::move(c));
    } else {
      // Same order as prepending one by one: the last child comes first.
      for (auto& c : children) s.queue.push_front(std::move(c));
    }
  }
  return std::nullopt;
}

AnswerStream::Status AnswerStream::status() const { return state_->status; }
std::size_t AnswerStream::steps() const { return state_->steps; }

AnswerStream iter_answers(const System& system, const Term& question, EngineOptions options) {
  return AnswerStream(system, question, std::move(options));
}

std::vector<Answer> all_answers(const System& system, const Term& question, EngineOptions options) {
  auto stream = iter_answers(system, question, std::move(options));
  std::vector<Answer> out;
  while (auto a = stream.next()) out.push_back(std::move(*a));
  if (stream.status() == AnswerStream::Status::BudgetExhausted)
    throw BudgetExhausted("step budget exhausted after " + std::to_string(stream.steps()) + " expansions");
  return out;
}

}  // namespace sos
