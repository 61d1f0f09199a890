#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sos/term.hpp"

using namespace sos;

namespace {
Term x_var() {
  static const Term x = Term::fresh_variable("x");
  return x;
}
Term y_var() {
  static const Term y = Term::fresh_variable("y");
  return y;
}
Term add(Term a, Term b) { return Term::apply(ops::add(), {std::move(a), std::move(b)}); }
}  // namespace

TEST_CASE("variables are identified by id, not display name") {
  auto a = Variable::fresh("x");
  auto b = Variable::fresh("x");
  CHECK_FALSE(a == b);
  CHECK(Term::variable(a) == Term::variable(a));
  CHECK_FALSE(Term::variable(a) == Term::variable(b));
}

TEST_CASE("closed terms without operators are values") {
  Term s = Term::sequence({Term::integer(1), Term::symbol("+"), Term::integer(2)});
  CHECK(s.is_closed());
  CHECK(s.is_data());
  CHECK_FALSE(Term::sequence({x_var()}).is_closed());
  CHECK_FALSE(add(Term::integer(1), Term::integer(2)).is_data());
}

TEST_CASE("empty sequences are rejected") { CHECK_THROWS_AS(Term::sequence({}), std::invalid_argument); }

TEST_CASE("operator arity is checked") {
  CHECK_THROWS_AS(Term::apply(ops::add(), {Term::integer(1)}), std::invalid_argument);
}

TEST_CASE("eval applies operator meanings") {
  CHECK(*eval(add(Term::integer(3), Term::integer(4))) == Term::integer(7));
  Term nested = Term::sequence({add(Term::integer(1), add(Term::integer(2), Term::integer(3))), Term::symbol("x")});
  CHECK(*eval(nested) == Term::sequence({Term::integer(6), Term::symbol("x")}));
}

TEST_CASE("eval of values and variables is the identity") {
  CHECK(*eval(Term::integer(5)) == Term::integer(5));
  CHECK(*eval(x_var()) == x_var());
  Term open = add(x_var(), Term::integer(1));
  CHECK(*eval(open) == open);
}

TEST_CASE("undefined operator results propagate") {
  CHECK_FALSE(eval(Term::apply(ops::floor_div(), {Term::integer(1), Term::integer(0)})));
  CHECK_FALSE(eval(Term::sequence({Term::integer(1), Term::apply(ops::div(), {Term::integer(1), Term::integer(0)})})));
  // A symbol is a value but not a number.
  CHECK_FALSE(eval(add(Term::symbol("s"), Term::integer(1))));
}

TEST_CASE("an application with a stuck closed argument is undefined") {
  Term stuck = add(Term::symbol("s"), Term::integer(1));
  CHECK_FALSE(eval(add(stuck, x_var())));
}

TEST_CASE("floor division rounds toward negative infinity") {
  auto fd = [](long long a, long long b) {
    return *eval(Term::apply(ops::floor_div(), {Term::integer(a), Term::integer(b)}));
  };
  CHECK(fd(7, 2) == Term::integer(3));
  CHECK(fd(-7, 2) == Term::integer(-4));
  CHECK(fd(7, -2) == Term::integer(-4));
  CHECK(fd(-7, -2) == Term::integer(3));
  CHECK(fd(-6, 3) == Term::integer(-2));
}

TEST_CASE("exact division yields rationals that collapse to integers") {
  auto q = *eval(Term::apply(ops::div(), {Term::integer(6), Term::integer(4)}));
  CHECK(q.data().kind() == DataValue::Kind::Rational);
  CHECK(q.data().as_rational() == Rational(3, 2));
  CHECK(*eval(Term::apply(ops::div(), {Term::integer(6), Term::integer(3)})) == Term::integer(2));
}

TEST_CASE("big integers do not overflow") {
  Term big = Term::value(DataValue::integer(Integer("123456789012345678901234567890")));
  auto r = *eval(Term::apply(ops::mul(), {big, big}));
  CHECK(r.data().as_integer() == Integer("15241578753238836750495351562536198787501905199875019052100"));
}

TEST_CASE("set identity ignores order; display keeps insertion order") {
  auto a = DataValue::set({DataValue::integer(2), DataValue::integer(1)});
  auto b = DataValue::set({DataValue::integer(1), DataValue::integer(2), DataValue::integer(1)});
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK(a.as_set().front() == DataValue::integer(2));
  CHECK(a.set_contains(DataValue::integer(1)));
  CHECK_FALSE(a.set_contains(DataValue::integer(3)));
}

TEST_CASE("maps look up keys; later duplicates win") {
  auto m = DataValue::map({{DataValue::text("k"), DataValue::integer(1)}, {DataValue::text("k"), DataValue::integer(2)}});
  CHECK(*m.map_lookup(DataValue::text("k")) == DataValue::integer(2));
  CHECK_FALSE(m.map_lookup(DataValue::text("z")));
  Term get = Term::apply(ops::getitem(), {Term::value(m), Term::value(DataValue::text("k"))});
  CHECK(*eval(get) == Term::integer(2));
  CHECK_FALSE(eval(Term::apply(ops::getitem(), {Term::value(m), Term::integer(0)})));
}

TEST_CASE("membership operators") {
  Term set = Term::value(DataValue::set({DataValue::from_term(Term::symbol("+"))}));
  CHECK(*eval(Term::apply(ops::contains(), {set, Term::symbol("+")})) == Term::value(DataValue::boolean(true)));
  CHECK(*eval(Term::apply(ops::not_contains(), {set, Term::symbol("-")})) == Term::value(DataValue::boolean(true)));
}

TEST_CASE("reified terms coincide with the bare term") {
  Term s = Term::sequence({Term::symbol("a"), Term::symbol("!")});
  CHECK(Term::value(DataValue::from_term(s)) == s);
  CHECK(DataValue::from_term(Term::integer(3)) == DataValue::integer(3));
}

TEST_CASE("replace substitutes structurally") {
  Term x = Term::value(DataValue::named("pv", "X"));
  Term body = Term::sequence({Term::symbol("a"), Term::symbol("."), x});
  Term r = *eval(Term::apply(ops::replace(), {body, x, Term::symbol("0")}));
  CHECK(r == Term::sequence({Term::symbol("a"), Term::symbol("."), Term::symbol("0")}));
}

TEST_CASE("guarded and unguarded variable occurrences") {
  Term t = Term::sequence({x_var(), add(y_var(), x_var())});
  CHECK(uvars(t) == VarSet{x_var().var()});
  CHECK(gvars(t) == VarSet{x_var().var(), y_var().var()});
  CHECK(vars(t).size() == 2);
  CHECK(occurs_unguarded(x_var().var(), t));
  CHECK_FALSE(occurs_unguarded(y_var().var(), t));
}

TEST_CASE("substitution application and range") {
  Substitution s{{x_var().var(), Term::integer(1)}, {y_var().var(), add(x_var(), Term::integer(2))}};
  CHECK(s.domain().size() == 2);
  CHECK(s.vrange() == VarSet{x_var().var()});
  // Application is simultaneous, not sequential.
  CHECK(s.apply(y_var()) == add(x_var(), Term::integer(2)));
  CHECK(s.restrict({x_var().var()}).size() == 1);
}

TEST_CASE("operator registry rejects duplicates") {
  auto& reg = OperatorRegistry::global();
  CHECK(reg.find("add") == ops::add());
  CHECK_THROWS_AS(reg.add(Operator{"add", 2, [](std::span<const DataValue>) { return std::optional<DataValue>{}; }, {}}),
                  std::invalid_argument);
  auto op = reg.get_or_add(Operator{"test-op", 1, [](std::span<const DataValue> a) {
                                      return std::optional<DataValue>(a[0]);
                                    }, {}});
  CHECK(reg.get_or_add(Operator{"test-op", 1, nullptr, {}}) == op);
}

TEST_CASE("term size counts atoms, sequences and applications") {
  CHECK(term_size(Term::integer(1)) == 1);
  CHECK(term_size(Term::sequence({Term::integer(1), add(x_var(), Term::integer(2))})) == 5);
}
