#include "sos/unification.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace sos {

VarSet vars(const EquationSet& eqs) {
  VarSet s;
  for (const auto& e : eqs) {
    collect_vars(e.left, s);
    collect_vars(e.right, s);
  }
  return s;
}

std::string_view rule_name(UnifRule r) {
  switch (r) {
    case UnifRule::Del: return "DEL";
    case UnifRule::AFail: return "AFAIL";
    case UnifRule::Seq: return "SEQ";
    case UnifRule::SFail: return "SFAIL";
    case UnifRule::SLFail: return "SLFAIL";
    case UnifRule::SRFail: return "SRFAIL";
    case UnifRule::Swap: return "SWAP";
    case UnifRule::Elim: return "ELIM";
    case UnifRule::CFail: return "CFAIL";
    case UnifRule::Eval: return "EVAL";
    case UnifRule::UEval: return "UEVAL";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Unifier

const Term* Unifier::lookup(const Variable& x) const {
  if (const Term* t = solved_.find(x)) return t;
  for (auto it = frozen_.rbegin(); it != frozen_.rend(); ++it)
    if (const Term* t = (*it)->find(x)) return t;
  return nullptr;
}

Substitution Unifier::solution() const {
  Substitution out;
  for (const auto& layer : frozen_)
    for (const auto& [x, t] : *layer) out.bind(x, t);
  for (const auto& [x, t] : solved_) out.bind(x, t);
  return out;
}

Term Unifier::resolve(const Term& t) const {
  if (t.is_closed()) return t;
  if (t.is_variable()) {
    const Term* b = lookup(t.var());
    return b ? *b : t;
  }
  std::vector<Term> out;
  out.reserve(t.size());
  bool changed = false;
  for (const auto& c : t.components()) {
    out.push_back(resolve(c));
    changed = changed || !(out.back() == c);
  }
  if (!changed) return t;
  return t.is_sequence() ? Term::sequence(std::move(out)) : Term::apply(t.op_ptr(), std::move(out));
}

void Unifier::bind_solved(const Variable& x, Term t) {
  if (t.is_closed()) open_.erase(x);
  else open_.insert(x);
  solved_.bind(x, std::move(t));
  if (solved_.size() - open_.size() < 16) return;
  // Freeze the closed bindings as a new layer, merging equal-sized layers like a
  // binary counter so that there are logarithmically many.
  auto layer = std::make_shared<Substitution>();
  Substitution rest;
  for (const auto& [y, u] : solved_) {
    if (open_.count(y)) rest.bind(y, u);
    else layer->bind(y, u);
  }
  solved_ = std::move(rest);
  while (!frozen_.empty() && frozen_.back()->size() <= layer->size()) {
    for (const auto& [y, u] : *frozen_.back()) layer->bind(y, u);
    frozen_.pop_back();
  }
  frozen_.push_back(std::move(layer));
}

void Unifier::erase_solved(const Variable& x) {
  solved_.erase(x);
  open_.erase(x);
}

void Unifier::add(const Equation& eq) {
  if (failed()) return;
  pending_.push_back({resolve(eq.left), resolve(eq.right)});
  // A new equation may expose a deferred variable unguarded.
  reintegrate_deferred();
}

void Unifier::add(const EquationSet& eqs) {
  for (const auto& e : eqs) add(e);
}

void Unifier::solve(const StepObserver& observer) {
  while (!failed() && !pending_.empty()) step(observer);
}

void Unifier::fail(UnifRule r, const StepObserver& observer) {
  failed_ = r;
  pending_.clear();
  deferred_.clear();
  solved_ = Substitution{};
  frozen_.clear();
  open_.clear();
  if (observer) observer(r, *this);
}

void Unifier::reintegrate_deferred() {
  for (auto& e : deferred_) pending_.push_back(std::move(e));
  deferred_.clear();
}

bool Unifier::occurs_elsewhere(const Variable& x, bool unguarded_only) const {
  auto in = [&](const Term& t) { return unguarded_only ? occurs_unguarded(x, t) : occurs(x, t); };
  for (const auto& e : pending_)
    if (in(e.left) || in(e.right)) return true;
  for (const auto& e : deferred_)
    if (in(e.left) || in(e.right)) return true;
  if (lookup(x)) return true;
  // Closed bindings cannot mention x.
  for (const auto& y : open_)
    if (in(*solved_.find(y))) return true;
  return false;
}

void Unifier::eliminate(const Variable& x, const Term& t) {
  Substitution s{{x, t}};
  for (auto& e : pending_) e = {s.apply(e.left), s.apply(e.right)};
  for (auto& e : deferred_) e = {s.apply(e.left), s.apply(e.right)};
  // Solved equations with a changed right-hand side go back to the queue,
  // their operator arguments may have become evaluable.
  std::vector<Variable> touched;
  for (const auto& y : open_)
    if (occurs(x, *solved_.find(y))) touched.push_back(y);
  for (const auto& y : touched) {
    Term rhs = s.apply(*solved_.find(y));
    erase_solved(y);
    pending_.push_back({Term::variable(y), std::move(rhs)});
  }
  reintegrate_deferred();
}

bool Unifier::step(const StepObserver& observer) {
  Equation eq = std::move(pending_.front());
  pending_.pop_front();
  const Term& l = eq.left;
  const Term& r = eq.right;
  auto notify = [&](UnifRule rule) {
    if (observer) observer(rule, *this);
  };

  auto el = eval(l);
  auto er = eval(r);
  if (!el || !er) {
    fail(UnifRule::UEval, observer);
    return true;
  }
  if (!(*el == l) || !(*er == r)) {
    pending_.push_front({std::move(*el), std::move(*er)});
    notify(UnifRule::Eval);
    return true;
  }
  if (l == r && !l.has_guarded()) {
    notify(UnifRule::Del);
    return true;
  }
  const bool lc = l.is_constant();
  const bool rc = r.is_constant();
  if (lc && rc) {
    fail(UnifRule::AFail, observer);
    return true;
  }
  if (l.is_sequence() && r.is_sequence()) {
    if (l.size() != r.size()) {
      fail(UnifRule::SFail, observer);
      return true;
    }
    for (std::size_t i = l.size(); i-- > 0;) pending_.push_front({l[i], r[i]});
    notify(UnifRule::Seq);
    return true;
  }
  if (l.is_sequence() && rc) {
    fail(UnifRule::SLFail, observer);
    return true;
  }
  if (lc && r.is_sequence()) {
    fail(UnifRule::SRFail, observer);
    return true;
  }
  if (r.is_variable() && !l.is_variable()) {
    pending_.push_front({r, l});
    notify(UnifRule::Swap);
    return true;
  }
  if (l.is_variable()) {
    const Variable& x = l.var();
    if (occurs_unguarded(x, r)) {
      fail(UnifRule::CFail, observer);
      return true;
    }
    if (!occurs(x, r)) {
      bool elim = occurs_elsewhere(x, false);
      if (elim) eliminate(x, r);
      bind_solved(x, r);
      if (elim) notify(UnifRule::Elim);
      return elim;
    }
    // x is guarded in r: keep the equation in the remaining part, but first
    // remove unguarded occurrences elsewhere.
    bool elim = occurs_elsewhere(x, true);
    if (elim) eliminate(x, r);
    deferred_.push_back(std::move(eq));
    if (elim) notify(UnifRule::Elim);
    return elim;
  }
  deferred_.push_back(std::move(eq));
  return false;
}

EquationSet Unifier::equations() const {
  EquationSet out(pending_.begin(), pending_.end());
  for (const auto& [x, t] : solution()) out.push_back({Term::variable(x), t});
  out.insert(out.end(), deferred_.begin(), deferred_.end());
  return out;
}

Outcome Unifier::outcome() const {
  if (failed()) return Failure{failed_};
  if (deferred_.empty() && pending_.empty()) return Solved{solution()};
  EquationSet rest(pending_.begin(), pending_.end());
  rest.insert(rest.end(), deferred_.begin(), deferred_.end());
  return SemiSolved{solution(), std::move(rest)};
}

Outcome solve(const EquationSet& eqs, const StepObserver& observer) {
  Unifier u;
  u.add(eqs);
  u.solve(observer);
  return u.outcome();
}

// ---------------------------------------------------------------------------
// Measure and predicates

namespace {

struct Occurrences {
  std::size_t total = 0;
  std::size_t unguarded = 0;
  std::size_t as_lhs = 0;
};

void count_occurrences(const Term& t, bool guarded, std::map<Variable, Occurrences>& occ) {
  if (t.is_closed()) return;
  if (t.is_variable()) {
    auto& o = occ[t.var()];
    ++o.total;
    if (!guarded) ++o.unguarded;
    return;
  }
  for (const auto& c : t.components()) count_occurrences(c, guarded || t.is_apply(), occ);
}

std::size_t count_nodes(const Term& t, TermKind kind) {
  std::size_t n = t.kind() == kind ? 1 : 0;
  if (t.is_sequence() || t.is_apply())
    for (const auto& c : t.components()) n += count_nodes(c, kind);
  return n;
}

std::map<Variable, Occurrences> occurrences(const EquationSet& eqs) {
  std::map<Variable, Occurrences> occ;
  for (const auto& e : eqs) {
    count_occurrences(e.left, false, occ);
    count_occurrences(e.right, false, occ);
    if (e.left.is_variable()) ++occ[e.left.var()].as_lhs;
  }
  return occ;
}

}  // namespace

// Counted over the multiset the solver actually holds.
Measure termination_measure(const EquationSet& eqs) {
  Measure m{};
  for (const auto& [x, o] : occurrences(eqs)) {
    bool isolated = o.total == 1 && o.as_lhs == 1;
    if (!isolated) ++m[0];
    if (o.unguarded > 1) ++m[0];
  }
  for (const auto& e : eqs) {
    m[1] += count_nodes(e.left, TermKind::Apply) + count_nodes(e.right, TermKind::Apply);
    m[2] += count_nodes(e.left, TermKind::Sequence) + count_nodes(e.right, TermKind::Sequence);
    if (e.right.is_variable() && !e.left.is_variable()) ++m[3];
  }
  m[4] = eqs.size();
  return m;
}

std::optional<SemiSolvedSplit> semi_solved_split(const EquationSet& eqs) {
  auto occ = occurrences(eqs);
  SemiSolvedSplit split;
  for (const auto& e : eqs) {
    if (e.left.is_variable()) {
      const auto& o = occ[e.left.var()];
      if (o.total == 1) {
        split.solved.push_back(e);
        continue;
      }
    }
    if (e.left.is_apply()) {
      split.remaining.push_back(e);
      continue;
    }
    if (e.right.is_apply() && !e.left.is_variable()) {
      split.remaining.push_back(e);
      continue;
    }
    if (e.left.is_variable()) {
      const Variable& x = e.left.var();
      // The left-hand side is the only unguarded occurrence.
      if (occurs(x, e.right) && !occurs_unguarded(x, e.right) && occ[x].unguarded == 1) {
        split.remaining.push_back(e);
        continue;
      }
    }
    return std::nullopt;
  }
  return split;
}

bool is_unifier(const Substitution& sigma, const EquationSet& eqs) {
  for (const auto& e : eqs) {
    auto l = eval(sigma.apply(e.left));
    auto r = eval(sigma.apply(e.right));
    if (!l || !r || !(*l == *r)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Segmentation

namespace {

class DisjointSets {
 public:
  std::size_t id(const Variable& x) {
    auto [it, inserted] = index_.emplace(x, parent_.size());
    if (inserted) parent_.push_back(parent_.size());
    return it->second;
  }
  std::size_t root(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void join(std::size_t a, std::size_t b) {
    a = root(a);
    b = root(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::map<Variable, std::size_t> index_;
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<Block> segment_remaining(const SemiSolved& state) {
  EquationSet eqs = state.remaining;
  VarSet remaining_vars = vars(eqs);
  for (const auto& [x, t] : state.partial) {
    VarSet tv = vars(t);
    bool linked = std::any_of(tv.begin(), tv.end(), [&](const Variable& v) { return remaining_vars.count(v); });
    if (linked) eqs.push_back({Term::variable(x), t});
  }

  DisjointSets ds;
  for (const auto& e : eqs) {
    VarSet ev = vars(EquationSet{e});
    if (ev.empty()) continue;
    std::size_t first = ds.id(*ev.begin());
    for (const auto& v : ev) ds.join(first, ds.id(v));
  }

  std::map<std::size_t, Block> by_root;
  for (const auto& e : eqs) {
    VarSet ev = vars(EquationSet{e});
    if (ev.empty()) continue;
    auto& block = by_root[ds.root(ds.id(*ev.begin()))];
    block.equations.push_back(e);
    block.variables.insert(ev.begin(), ev.end());
  }

  std::vector<Block> out;
  for (auto& [_, b] : by_root) {
    bool solved_singleton = b.equations.size() == 1 && b.equations[0].left.is_variable() &&
                            !occurs(b.equations[0].left.var(), b.equations[0].right);
    if (!solved_singleton) out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(),
            [](const Block& a, const Block& b) { return *a.variables.begin() < *b.variables.begin(); });
  return out;
}

namespace {

bool excludes(const Term& value_side, const Term& op_side) {
  if (!op_side.is_apply() || !op_side.op().range) return false;
  const RangeHint& hint = *op_side.op().range;
  if (value_side.is_sequence() && !(hint.classes & kRangeSequence)) return true;
  if (value_side.is_data() && !hint.may_yield(value_side)) return true;
  if (value_side.is_apply() && value_side.op().range && (value_side.op().range->classes & hint.classes) == 0)
    return true;
  return false;
}

}  // namespace

RangeVerdict out_of_range_check(const EquationSet& block) {
  for (const auto& e : block)
    if (excludes(e.left, e.right) || excludes(e.right, e.left)) return RangeVerdict::Failure;
  return RangeVerdict::Unknown;
}

ResolutionStrategy out_of_range_strategy() {
  return [](const Block& b) -> std::optional<Outcome> {
    if (out_of_range_check(b.equations) == RangeVerdict::Failure) return Outcome{Failure{}};
    return std::nullopt;
  };
}

}  // namespace sos
