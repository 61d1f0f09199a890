#include "sos/term.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <variant>

namespace sos {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::atomic<std::uint64_t> g_next_var{1};

}  // namespace

Variable Variable::fresh(std::string display) {
  return Variable{g_next_var.fetch_add(1, std::memory_order_relaxed), std::move(display)};
}

// ---------------------------------------------------------------------------
// DataValue

struct DataValue::Rep {
  // Sets keep insertion order for display and a sorted copy for identity.
  struct SetRep {
    std::vector<DataValue> ordered;
    std::vector<DataValue> sorted;
  };
  using MapRep = std::vector<std::pair<DataValue, DataValue>>;
  std::variant<Integer, Rational, bool, std::string, SetRep, MapRep, Term, Named> v;
  std::size_t hash = 0;
};

namespace {

template <class T>
std::size_t hash_number(const T& n) {
  return std::hash<std::string>{}(n.str());
}

std::strong_ordering cmp_str(const std::string& a, const std::string& b) {
  int c = a.compare(b);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

template <class T>
std::strong_ordering cmp_num(const T& a, const T& b) {
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

DataValue DataValue::integer(Integer v) {
  auto rep = std::make_shared<Rep>();
  rep->hash = mix(1, hash_number(v));
  rep->v = std::move(v);
  return DataValue(std::move(rep));
}

DataValue DataValue::rational(Rational v) {
  if (boost::multiprecision::denominator(v) == 1) return integer(boost::multiprecision::numerator(v));
  auto rep = std::make_shared<Rep>();
  rep->hash = mix(2, hash_number(v));
  rep->v = std::move(v);
  return DataValue(std::move(rep));
}

DataValue DataValue::boolean(bool v) {
  auto rep = std::make_shared<Rep>();
  rep->hash = mix(3, v ? 1 : 0);
  rep->v = v;
  return DataValue(std::move(rep));
}

DataValue DataValue::text(std::string v) {
  auto rep = std::make_shared<Rep>();
  rep->hash = mix(4, std::hash<std::string>{}(v));
  rep->v = std::move(v);
  return DataValue(std::move(rep));
}

DataValue DataValue::set(std::vector<DataValue> elements) {
  Rep::SetRep set;
  for (auto& e : elements) {
    auto it = std::lower_bound(set.sorted.begin(), set.sorted.end(), e);
    if (it != set.sorted.end() && *it == e) continue;
    set.sorted.insert(it, e);
    set.ordered.push_back(std::move(e));
  }
  auto rep = std::make_shared<Rep>();
  std::size_t h = 5;
  for (const auto& e : set.sorted) h = mix(h, e.hash());
  rep->hash = h;
  rep->v = std::move(set);
  return DataValue(std::move(rep));
}

DataValue DataValue::map(std::vector<std::pair<DataValue, DataValue>> entries) {
  // Later entries win on duplicate keys.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<DataValue, DataValue>> out;
  for (auto& e : entries) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second = std::move(e.second);
    else
      out.push_back(std::move(e));
  }
  auto rep = std::make_shared<Rep>();
  std::size_t h = 6;
  for (const auto& [k, v] : out) h = mix(mix(h, k.hash()), v.hash());
  rep->hash = h;
  rep->v = std::move(out);
  return DataValue(std::move(rep));
}

DataValue DataValue::named(std::string kind, std::string name) {
  auto rep = std::make_shared<Rep>();
  rep->hash = mix(mix(8, std::hash<std::string>{}(kind)), std::hash<std::string>{}(name));
  rep->v = Named{std::move(kind), std::move(name)};
  return DataValue(std::move(rep));
}

DataValue DataValue::from_term(const Term& t) {
  if (t.is_value()) return t.data();
  if (!t.is_data())
    throw std::invalid_argument("only closed, fully evaluated terms are data values");
  auto rep = std::make_shared<Rep>();
  // Hash matches the term hash so equal values hash alike regardless of origin.
  rep->hash = mix(7, t.hash());
  rep->v = t;
  return DataValue(std::move(rep));
}

DataValue::Kind DataValue::kind() const { return static_cast<Kind>(rep_->v.index()); }
const Integer& DataValue::as_integer() const { return std::get<Integer>(rep_->v); }
const Rational& DataValue::as_rational() const { return std::get<Rational>(rep_->v); }
bool DataValue::as_boolean() const { return std::get<bool>(rep_->v); }
const std::string& DataValue::as_text() const { return std::get<std::string>(rep_->v); }
const std::vector<DataValue>& DataValue::as_set() const { return std::get<Rep::SetRep>(rep_->v).ordered; }
const std::vector<std::pair<DataValue, DataValue>>& DataValue::as_map() const {
  return std::get<Rep::MapRep>(rep_->v);
}
const Term& DataValue::as_term() const { return std::get<Term>(rep_->v); }
const DataValue::Named& DataValue::as_named() const { return std::get<Named>(rep_->v); }

bool DataValue::set_contains(const DataValue& v) const {
  const auto& s = std::get<Rep::SetRep>(rep_->v).sorted;
  return std::binary_search(s.begin(), s.end(), v);
}

std::optional<DataValue> DataValue::map_lookup(const DataValue& key) const {
  const auto& m = as_map();
  auto it = std::lower_bound(m.begin(), m.end(), key,
                             [](const auto& e, const DataValue& k) { return e.first < k; });
  if (it == m.end() || it->first != key) return std::nullopt;
  return it->second;
}

Term DataValue::to_term() const { return Term::value(*this); }

std::size_t DataValue::hash() const { return rep_->hash; }

std::strong_ordering operator<=>(const DataValue& a, const DataValue& b) {
  if (a.rep_ == b.rep_) return std::strong_ordering::equal;
  if (auto c = a.rep_->v.index() <=> b.rep_->v.index(); c != 0) return c;
  switch (a.kind()) {
    case DataValue::Kind::Integer: return cmp_num(a.as_integer(), b.as_integer());
    case DataValue::Kind::Rational: return cmp_num(a.as_rational(), b.as_rational());
    case DataValue::Kind::Boolean: return a.as_boolean() <=> b.as_boolean();
    case DataValue::Kind::Text: return cmp_str(a.as_text(), b.as_text());
    case DataValue::Kind::Set: {
      const auto& x = std::get<DataValue::Rep::SetRep>(a.rep_->v).sorted;
      const auto& y = std::get<DataValue::Rep::SetRep>(b.rep_->v).sorted;
      return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
    }
    case DataValue::Kind::Map: {
      const auto& x = a.as_map();
      const auto& y = b.as_map();
      return std::lexicographical_compare_three_way(
          x.begin(), x.end(), y.begin(), y.end(), [](const auto& p, const auto& q) {
            if (auto c = p.first <=> q.first; c != 0) return c;
            return p.second <=> q.second;
          });
    }
    case DataValue::Kind::Reified: return a.as_term() <=> b.as_term();
    case DataValue::Kind::Named: {
      if (auto c = cmp_str(a.as_named().kind, b.as_named().kind); c != 0) return c;
      return cmp_str(a.as_named().name, b.as_named().name);
    }
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Term

namespace detail {
struct TermNode {
  TermKind kind;
  bool closed = true;
  bool apply = false;
  bool guarded = false;
  std::size_t hash = 0;
  Variable var;
  std::string name;
  std::optional<DataValue> data;
  std::vector<Term> comps;
  OperatorPtr op;
};
}  // namespace detail

Term Term::variable(const Variable& v) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = TermKind::Variable;
  n->closed = false;
  n->var = v;
  n->hash = mix(11, std::hash<std::uint64_t>{}(v.id));
  return Term(std::move(n));
}

Term Term::symbol(std::string name) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = TermKind::Symbol;
  n->hash = mix(12, std::hash<std::string>{}(name));
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::value(const DataValue& v) {
  if (v.is_reified()) return v.as_term();
  auto n = std::make_shared<detail::TermNode>();
  n->kind = TermKind::Value;
  n->hash = mix(13, v.hash());
  n->data = v;
  return Term(std::move(n));
}

Term Term::sequence(std::vector<Term> components) {
  if (components.empty()) throw std::invalid_argument("a sequence needs at least one component");
  auto n = std::make_shared<detail::TermNode>();
  n->kind = TermKind::Sequence;
  std::size_t h = 14 + components.size();
  for (const auto& c : components) {
    n->closed = n->closed && c.is_closed();
    n->apply = n->apply || c.has_apply();
    n->guarded = n->guarded || c.has_guarded();
    h = mix(h, c.hash());
  }
  n->hash = h;
  n->comps = std::move(components);
  return Term(std::move(n));
}

Term Term::apply(OperatorPtr op, std::vector<Term> args) {
  if (!op) throw std::invalid_argument("null operator");
  if (op->arity && *op->arity != args.size())
    throw std::invalid_argument("operator '" + op->name + "' expects " + std::to_string(*op->arity) +
                                " arguments, got " + std::to_string(args.size()));
  auto n = std::make_shared<detail::TermNode>();
  n->kind = TermKind::Apply;
  n->apply = true;
  std::size_t h = mix(15, std::hash<std::string>{}(op->name));
  for (const auto& a : args) {
    n->closed = n->closed && a.is_closed();
    h = mix(h, a.hash());
  }
  n->guarded = !n->closed;
  n->hash = h;
  n->comps = std::move(args);
  n->op = std::move(op);
  return Term(std::move(n));
}

TermKind Term::kind() const { return node_->kind; }
const Variable& Term::var() const { return node_->var; }
const std::string& Term::name() const { return node_->name; }
const DataValue& Term::data() const { return *node_->data; }
std::span<const Term> Term::components() const { return node_->comps; }
const Operator& Term::op() const { return *node_->op; }
const OperatorPtr& Term::op_ptr() const { return node_->op; }
bool Term::is_closed() const { return node_->closed; }
bool Term::has_apply() const { return node_->apply; }
bool Term::has_guarded() const { return node_->guarded; }
std::size_t Term::hash() const { return node_->hash; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case TermKind::Variable: return a.var().id <=> b.var().id;
    case TermKind::Symbol: return cmp_str(a.name(), b.name());
    case TermKind::Value: return a.data() <=> b.data();
    case TermKind::Apply:
      if (a.node_->op != b.node_->op) {
        if (auto c = cmp_str(a.op().name, b.op().name); c != 0) return c;
      }
      [[fallthrough]];
    case TermKind::Sequence: {
      auto x = a.components();
      auto y = b.components();
      return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
    }
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Range hints

unsigned range_class_of(const Term& v) {
  switch (v.kind()) {
    case TermKind::Symbol: return kRangeSymbol;
    case TermKind::Sequence: return kRangeSequence;
    case TermKind::Value:
      switch (v.data().kind()) {
        case DataValue::Kind::Integer: return kRangeInteger;
        case DataValue::Kind::Rational: return kRangeRational;
        case DataValue::Kind::Boolean: return kRangeBoolean;
        case DataValue::Kind::Text: return kRangeText;
        case DataValue::Kind::Set: return kRangeSet;
        case DataValue::Kind::Map: return kRangeMap;
        case DataValue::Kind::Named: return kRangeNamed;
        case DataValue::Kind::Reified: break;
      }
      break;
    default: break;
  }
  return 0;
}

bool RangeHint::may_yield(const Term& value) const {
  if ((classes & range_class_of(value)) == 0) return false;
  return !admits || admits(value);
}

// ---------------------------------------------------------------------------
// Operators

namespace {

using Args = std::span<const DataValue>;

bool all_integers(Args a) {
  return std::all_of(a.begin(), a.end(), [](const DataValue& v) { return v.is_integer(); });
}

Operator make_int_binop(std::string name, std::function<std::optional<Integer>(const Integer&, const Integer&)> f) {
  Operator op;
  op.name = std::move(name);
  op.arity = 2;
  op.eval = [f = std::move(f)](Args a) -> std::optional<DataValue> {
    if (!all_integers(a)) return std::nullopt;
    auto r = f(a[0].as_integer(), a[1].as_integer());
    if (!r) return std::nullopt;
    return DataValue::integer(std::move(*r));
  };
  op.range = RangeHint{kRangeInteger, {}};
  return op;
}

std::optional<Rational> to_rational(const DataValue& v) {
  if (v.kind() == DataValue::Kind::Integer) return Rational(v.as_integer());
  if (v.kind() == DataValue::Kind::Rational) return v.as_rational();
  return std::nullopt;
}

std::optional<bool> membership(const DataValue& coll, const DataValue& elem) {
  switch (coll.kind()) {
    case DataValue::Kind::Set: return coll.set_contains(elem);
    case DataValue::Kind::Map: return coll.map_lookup(elem).has_value();
    default: return std::nullopt;
  }
}

std::vector<Operator> builtin_operators() {
  std::vector<Operator> out;
  out.push_back(make_int_binop("add", [](const Integer& a, const Integer& b) { return std::optional<Integer>(a + b); }));
  out.push_back(make_int_binop("sub", [](const Integer& a, const Integer& b) { return std::optional<Integer>(a - b); }));
  out.push_back(make_int_binop("mul", [](const Integer& a, const Integer& b) { return std::optional<Integer>(a * b); }));
  out.push_back(make_int_binop("floor_div", [](const Integer& a, const Integer& b) -> std::optional<Integer> {
    if (b == 0) return std::nullopt;
    Integer q = a / b;
    // cpp_int truncates toward zero
    if (q * b != a && ((a < 0) != (b < 0))) q -= 1;
    return q;
  }));

  Operator div;
  div.name = "div";
  div.arity = 2;
  div.eval = [](Args a) -> std::optional<DataValue> {
    auto p = to_rational(a[0]);
    auto q = to_rational(a[1]);
    if (!p || !q || *q == 0) return std::nullopt;
    return DataValue::rational(*p / *q);
  };
  div.range = RangeHint{kRangeInteger | kRangeRational, {}};
  out.push_back(std::move(div));

  Operator identity;
  identity.name = "identity";
  identity.arity = 1;
  identity.eval = [](Args a) -> std::optional<DataValue> { return a[0]; };
  out.push_back(std::move(identity));

  // Every data value lifts to a term, so replace accepts any three values.
  Operator replace;
  replace.name = "replace";
  replace.arity = 3;
  replace.eval = [](Args a) -> std::optional<DataValue> {
    Term r = replace_subterm(a[0].to_term(), a[1].to_term(), a[2].to_term());
    return DataValue::from_term(r);
  };
  out.push_back(std::move(replace));

  Operator contains;
  contains.name = "contains";
  contains.arity = 2;
  contains.eval = [](Args a) -> std::optional<DataValue> {
    auto m = membership(a[0], a[1]);
    if (!m) return std::nullopt;
    return DataValue::boolean(*m);
  };
  contains.range = RangeHint{kRangeBoolean, {}};
  out.push_back(std::move(contains));

  Operator not_contains;
  not_contains.name = "not_contains";
  not_contains.arity = 2;
  not_contains.eval = [](Args a) -> std::optional<DataValue> {
    auto m = membership(a[0], a[1]);
    if (!m) return std::nullopt;
    return DataValue::boolean(!*m);
  };
  not_contains.range = RangeHint{kRangeBoolean, {}};
  out.push_back(std::move(not_contains));

  Operator getitem;
  getitem.name = "getitem";
  getitem.arity = 2;
  getitem.eval = [](Args a) -> std::optional<DataValue> {
    if (a[0].kind() != DataValue::Kind::Map) return std::nullopt;
    return a[0].map_lookup(a[1]);
  };
  out.push_back(std::move(getitem));
  return out;
}

}  // namespace

OperatorRegistry& OperatorRegistry::global() {
  static OperatorRegistry* registry = [] {
    auto* r = new OperatorRegistry;
    for (auto& op : builtin_operators()) r->add(std::move(op));
    return r;
  }();
  return *registry;
}

OperatorPtr OperatorRegistry::add(Operator op) {
  std::lock_guard lock(mu_);
  if (op.name.empty()) throw std::invalid_argument("operator name must not be empty");
  if (!op.eval) throw std::invalid_argument("operator '" + op.name + "' has no meaning");
  if (ops_.count(op.name)) throw std::invalid_argument("duplicate operator '" + op.name + "'");
  auto ptr = std::make_shared<const Operator>(std::move(op));
  ops_.emplace(ptr->name, ptr);
  return ptr;
}

OperatorPtr OperatorRegistry::find(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = ops_.find(name);
  return it == ops_.end() ? nullptr : it->second;
}

OperatorPtr OperatorRegistry::get_or_add(Operator op) {
  {
    std::lock_guard lock(mu_);
    auto it = ops_.find(op.name);
    if (it != ops_.end()) return it->second;
  }
  return add(std::move(op));
}

namespace ops {
#define SOS_BUILTIN(fn, key)                                           \
  const OperatorPtr& fn() {                                            \
    static const OperatorPtr p = OperatorRegistry::global().find(key); \
    return p;                                                          \
  }
SOS_BUILTIN(add, "add")
SOS_BUILTIN(sub, "sub")
SOS_BUILTIN(mul, "mul")
SOS_BUILTIN(floor_div, "floor_div")
SOS_BUILTIN(div, "div")
SOS_BUILTIN(identity, "identity")
SOS_BUILTIN(replace, "replace")
SOS_BUILTIN(contains, "contains")
SOS_BUILTIN(not_contains, "not_contains")
SOS_BUILTIN(getitem, "getitem")
#undef SOS_BUILTIN
}  // namespace ops

// ---------------------------------------------------------------------------
// Evaluation

std::optional<Term> eval(const Term& t) {
  if (!t.has_apply()) return t;
  auto comps = t.components();
  std::vector<Term> out;
  out.reserve(comps.size());
  bool changed = false;
  for (const auto& c : comps) {
    auto e = eval(c);
    if (!e) return std::nullopt;
    changed = changed || !(*e == c);
    out.push_back(std::move(*e));
  }
  if (t.is_sequence()) return changed ? Term::sequence(std::move(out)) : t;

  // Operator application.
  bool all_values = std::all_of(out.begin(), out.end(), [](const Term& a) { return a.is_data(); });
  if (all_values) {
    std::vector<DataValue> args;
    args.reserve(out.size());
    for (const auto& a : out) args.push_back(DataValue::from_term(a));
    auto r = t.op().eval(args);
    if (!r) return std::nullopt;
    return Term::value(*r);
  }
  // Keep the application only if every non-value argument can still change.
  for (const auto& a : out)
    if (!a.is_data() && a.is_closed()) return std::nullopt;
  return changed ? Term::apply(t.op_ptr(), std::move(out)) : t;
}

// ---------------------------------------------------------------------------
// Variables

void collect_vars(const Term& t, VarSet& out) {
  if (t.is_closed()) return;
  if (t.is_variable()) {
    out.insert(t.var());
    return;
  }
  for (const auto& c : t.components()) collect_vars(c, out);
}

VarSet vars(const Term& t) {
  VarSet s;
  collect_vars(t, s);
  return s;
}

namespace {
void collect_uvars(const Term& t, VarSet& out) {
  if (t.is_closed() || t.is_apply()) return;
  if (t.is_variable()) {
    out.insert(t.var());
    return;
  }
  for (const auto& c : t.components()) collect_uvars(c, out);
}

void collect_gvars(const Term& t, VarSet& out) {
  if (!t.has_guarded()) return;
  if (t.is_apply()) {
    collect_vars(t, out);
    return;
  }
  for (const auto& c : t.components()) collect_gvars(c, out);
}
}  // namespace

VarSet uvars(const Term& t) {
  VarSet s;
  collect_uvars(t, s);
  return s;
}

VarSet gvars(const Term& t) {
  VarSet s;
  collect_gvars(t, s);
  return s;
}

bool occurs(const Variable& x, const Term& t) {
  if (t.is_closed()) return false;
  if (t.is_variable()) return t.var() == x;
  for (const auto& c : t.components())
    if (occurs(x, c)) return true;
  return false;
}

bool occurs_unguarded(const Variable& x, const Term& t) {
  if (t.is_closed() || t.is_apply()) return false;
  if (t.is_variable()) return t.var() == x;
  for (const auto& c : t.components())
    if (occurs_unguarded(x, c)) return true;
  return false;
}

Term replace_subterm(const Term& haystack, const Term& needle, const Term& replacement) {
  if (haystack == needle) return replacement;
  if (!haystack.is_sequence() && !haystack.is_apply()) return haystack;
  std::vector<Term> out;
  bool changed = false;
  for (const auto& c : haystack.components()) {
    out.push_back(replace_subterm(c, needle, replacement));
    changed = changed || !(out.back() == c);
  }
  if (!changed) return haystack;
  return haystack.is_sequence() ? Term::sequence(std::move(out)) : Term::apply(haystack.op_ptr(), std::move(out));
}

// ---------------------------------------------------------------------------
// Substitution

const Term* Substitution::find(const Variable& x) const {
  auto it = bindings_.find(x);
  return it == bindings_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
  if (t.is_closed() || bindings_.empty()) return t;
  if (t.is_variable()) {
    const Term* b = find(t.var());
    return b ? *b : t;
  }
  std::vector<Term> out;
  out.reserve(t.size());
  bool changed = false;
  for (const auto& c : t.components()) {
    out.push_back(apply(c));
    changed = changed || !(out.back() == c);
  }
  if (!changed) return t;
  return t.is_sequence() ? Term::sequence(std::move(out)) : Term::apply(t.op_ptr(), std::move(out));
}

VarSet Substitution::domain() const {
  VarSet s;
  for (const auto& [x, _] : bindings_) s.insert(x);
  return s;
}

VarSet Substitution::vrange() const {
  VarSet s;
  for (const auto& [_, t] : bindings_) collect_vars(t, s);
  return s;
}

Substitution Substitution::restrict(const VarSet& keep) const {
  Substitution out;
  for (const auto& [x, t] : bindings_)
    if (keep.count(x)) out.bind(x, t);
  return out;
}

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  if (t.is_sequence() || t.is_apply())
    for (const auto& c : t.components()) n += term_size(c);
  return n;
}

}  // namespace sos
