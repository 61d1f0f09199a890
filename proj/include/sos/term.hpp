// Terms, data values, operators and substitutions.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sos {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class Term;
class DataValue;
struct Operator;
using OperatorPtr = std::shared_ptr<const Operator>;

// A meta variable. Identity is the id; the display name is cosmetic.
struct Variable {
  std::uint64_t id = 0;
  std::string display;

  static Variable fresh(std::string display);

  friend bool operator==(const Variable& a, const Variable& b) { return a.id == b.id; }
  friend auto operator<=>(const Variable& a, const Variable& b) { return a.id <=> b.id; }
};

using VarSet = std::set<Variable>;

class DataValue {
 public:
  enum class Kind : std::uint8_t { Integer, Rational, Boolean, Text, Set, Map, Reified, Named };

  struct Named {
    std::string kind;  // e.g. "process-variable"
    std::string name;
  };

  static DataValue integer(Integer v);
  static DataValue rational(Rational v);  // collapses to integer when the denominator is 1
  static DataValue boolean(bool v);
  static DataValue text(std::string v);
  static DataValue set(std::vector<DataValue> elements);
  static DataValue map(std::vector<std::pair<DataValue, DataValue>> entries);
  static DataValue named(std::string kind, std::string name);
  // Lifts a closed, fully evaluated term. Value nodes unwrap to their payload.
  static DataValue from_term(const Term& t);

  Kind kind() const;
  const Integer& as_integer() const;
  const Rational& as_rational() const;
  bool as_boolean() const;
  const std::string& as_text() const;
  const std::vector<DataValue>& as_set() const;  // insertion order; identity ignores order
  const std::vector<std::pair<DataValue, DataValue>>& as_map() const;
  const Term& as_term() const;
  const Named& as_named() const;

  bool is_integer() const { return kind() == Kind::Integer; }
  bool is_reified() const { return kind() == Kind::Reified; }

  bool set_contains(const DataValue& v) const;
  std::optional<DataValue> map_lookup(const DataValue& key) const;

  // Term view of the value: reified payloads come back as the bare term.
  Term to_term() const;

  std::size_t hash() const;
  friend std::strong_ordering operator<=>(const DataValue& a, const DataValue& b);
  friend bool operator==(const DataValue& a, const DataValue& b) { return (a <=> b) == 0; }

  struct Rep;

 private:
  explicit DataValue(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

enum class TermKind : std::uint8_t { Variable, Symbol, Value, Sequence, Apply };

namespace detail {
struct TermNode;
}

class Term {
 public:
  static Term variable(const Variable& v);
  static Term fresh_variable(std::string display) { return variable(Variable::fresh(std::move(display))); }
  static Term symbol(std::string name);
  // Reified payloads are unwrapped so that a value and its bare term coincide.
  static Term value(const DataValue& v);
  static Term integer(long long v) { return value(DataValue::integer(v)); }
  static Term sequence(std::vector<Term> components);
  static Term apply(OperatorPtr op, std::vector<Term> args);

  TermKind kind() const;
  bool is_variable() const { return kind() == TermKind::Variable; }
  bool is_symbol() const { return kind() == TermKind::Symbol; }
  bool is_value() const { return kind() == TermKind::Value; }
  bool is_sequence() const { return kind() == TermKind::Sequence; }
  bool is_apply() const { return kind() == TermKind::Apply; }
  // Symbol or Value node.
  bool is_constant() const { return is_symbol() || is_value(); }

  const Variable& var() const;
  const std::string& name() const;  // symbol name
  const DataValue& data() const;
  std::span<const Term> components() const;  // sequence components or operator arguments
  const Operator& op() const;
  const OperatorPtr& op_ptr() const;
  std::size_t size() const { return components().size(); }
  const Term& operator[](std::size_t i) const { return components()[i]; }

  bool is_closed() const;      // no variables
  bool has_apply() const;      // contains an operator application
  bool has_guarded() const;    // contains a variable below an operator
  // Closed and free of operator applications, hence a data value.
  bool is_data() const { return is_closed() && !has_apply(); }

  std::size_t hash() const;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);
  friend bool operator==(const Term& a, const Term& b);

 private:
  explicit Term(std::shared_ptr<const detail::TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::TermNode> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

// Coarse classification of evaluated values, used by range hints.
enum RangeClass : unsigned {
  kRangeInteger = 1u << 0,
  kRangeRational = 1u << 1,
  kRangeBoolean = 1u << 2,
  kRangeText = 1u << 3,
  kRangeSet = 1u << 4,
  kRangeMap = 1u << 5,
  kRangeSymbol = 1u << 6,
  kRangeSequence = 1u << 7,
  kRangeNamed = 1u << 8,
  kRangeAny = (1u << 9) - 1,
};

unsigned range_class_of(const Term& closed_value);

struct RangeHint {
  unsigned classes = kRangeAny;
  // Optional finer filter applied after the class check.
  std::function<bool(const Term&)> admits;

  bool may_yield(const Term& value) const;
};

struct Operator {
  using EvalFn = std::function<std::optional<DataValue>(std::span<const DataValue>)>;

  std::string name;
  std::optional<std::size_t> arity;  // nullopt means variadic
  EvalFn eval;
  std::optional<RangeHint> range;
};

class OperatorRegistry {
 public:
  // Registry preloaded with the built-in operators.
  static OperatorRegistry& global();

  // Throws std::invalid_argument on a duplicate name.
  OperatorPtr add(Operator op);
  OperatorPtr find(const std::string& name) const;
  // Returns the existing operator with this name, or registers op.
  OperatorPtr get_or_add(Operator op);

 private:
  mutable std::mutex mu_;
  std::map<std::string, OperatorPtr> ops_;
};

// Built-in operators.
namespace ops {
const OperatorPtr& add();
const OperatorPtr& sub();
const OperatorPtr& mul();
const OperatorPtr& floor_div();   // integer floor division, undefined at 0
const OperatorPtr& div();         // exact rational division, undefined at 0
const OperatorPtr& identity();
const OperatorPtr& replace();     // replace(haystack, needle, replacement)
const OperatorPtr& contains();    // contains(collection, element)
const OperatorPtr& not_contains();
const OperatorPtr& getitem();     // getitem(map, key)
}  // namespace ops

// Evaluation; nullopt is the undefined marker.
std::optional<Term> eval(const Term& t);

VarSet vars(const Term& t);
VarSet uvars(const Term& t);
VarSet gvars(const Term& t);
void collect_vars(const Term& t, VarSet& out);
bool occurs(const Variable& x, const Term& t);
bool occurs_unguarded(const Variable& x, const Term& t);

// Structural replacement of every occurrence of needle.
Term replace_subterm(const Term& haystack, const Term& needle, const Term& replacement);

class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const Variable, Term>> init) : bindings_(init) {}

  void bind(const Variable& x, Term t) { bindings_.insert_or_assign(x, std::move(t)); }
  void erase(const Variable& x) { bindings_.erase(x); }
  const Term* find(const Variable& x) const;
  bool contains(const Variable& x) const { return bindings_.count(x) != 0; }
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }

  Term apply(const Term& t) const;
  VarSet domain() const;
  VarSet vrange() const;
  Substitution restrict(const VarSet& keep) const;

  auto begin() const { return bindings_.begin(); }
  auto end() const { return bindings_.end(); }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<Variable, Term> bindings_;
};

// Structural size: atoms, sequences and operator applications all count one.
std::size_t term_size(const Term& t);

// Plain console rendering; see render.hpp for styles.
std::string to_string(const Term& t);
std::string to_string(const DataValue& v);
std::ostream& operator<<(std::ostream& os, const Term& t);

}  // namespace sos

template <>
struct std::hash<sos::Term> {
  std::size_t operator()(const sos::Term& t) const { return t.hash(); }
};
