#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace sos;

namespace {

Term bin(Term l, const char* op, Term r) { return arith::binary_expr(l, Term::symbol(op), r); }
Term i(long long v) { return Term::integer(v); }

std::vector<Successor> next(const Term& e) { return successors(arith::system(), arith::schema(), e); }

}  // namespace

TEST_CASE("parser builds nested binary expressions") {
  CHECK(arith::parse_expr("((3 + 12) + (4 + 42))") == bin(bin(i(3), "+", i(12)), "+", bin(i(4), "+", i(42))));
  CHECK(arith::parse_expr("7") == i(7));
  CHECK(arith::parse_expr(" -7 ") == i(-7));
  CHECK(arith::parse_expr("1 - -2") == bin(i(1), "-", i(-2)));
}

TEST_CASE("parser uses standard precedence and left associativity") {
  CHECK(arith::parse_expr("1 + 2 * 3") == bin(i(1), "+", bin(i(2), "*", i(3))));
  CHECK(arith::parse_expr("8 / 2 / 2") == bin(bin(i(8), "/", i(2)), "/", i(2)));
  CHECK(arith::parse_expr("1 - 2 + 3") == bin(bin(i(1), "-", i(2)), "+", i(3)));
}

TEST_CASE("parser reports errors with positions") {
  auto position = [](const char* text) -> std::size_t {
    try {
      arith::parse_expr(text);
    } catch (const SyntaxError& e) {
      return e.position();
    }
    return 999;
  };
  CHECK(position("(1 +") == 4);
  CHECK(position("1 + x") == 4);
  CHECK(position("(1 + 2") == 6);
  CHECK(position("1 2") == 2);
  CHECK(position("") == 0);
}

TEST_CASE("the six rules in order") {
  std::vector<std::string> names;
  for (const auto& r : arith::system().rules()) names.push_back(r->name());
  CHECK(names == std::vector<std::string>{"l-eval", "r-eval", "add-eval", "sub-eval", "mul-eval", "div-eval"});
  CHECK(arith::system().find("l-eval")->conditions().size() == 1);
  CHECK(arith::system().find("add-eval")->is_axiom());
}

TEST_CASE("single steps") {
  auto s = next(arith::parse_expr("3 + 12"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].target == i(15));
  CHECK(next(arith::parse_expr("7 - 10"))[0].target == i(-3));
  CHECK(next(arith::parse_expr("6 * 7"))[0].target == i(42));
  CHECK(next(arith::parse_expr("-7 / 2"))[0].target == i(-4));
}

TEST_CASE("division by zero is stuck") {
  CHECK(next(arith::parse_expr("1 / 0")).empty());
  auto s = next(arith::parse_expr("(1 / 0) + (2 + 3)"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].target == arith::parse_expr("(1 / 0) + 5"));
}

TEST_CASE("both operands may step") {
  auto s = next(arith::parse_expr("((3 + 12) + (4 + 42))"));
  REQUIRE(s.size() == 2);
  CHECK(s[0].target == arith::parse_expr("15 + (4 + 42)"));
  CHECK(s[1].target == arith::parse_expr("(3 + 12) + 46"));
  CHECK(s[0].tree.rule_name() == "l-eval");
  CHECK(s[1].tree.rule_name() == "r-eval");
}

TEST_CASE("confluence to the mathematical value") {
  gen::Rng rng(314);
  for (int k = 0; k < 100; ++k) {
    Term e = gen::arith_expr(rng, 4, false);
    auto lts = explore(arith::system(), arith::schema(), e);
    REQUIRE(lts.complete);
    auto terminal = lts.terminal_states();
    REQUIRE(terminal.size() == 1);
    const Term& v = lts.states[terminal[0]];
    REQUIRE(v.is_value());
    CHECK(v.data().as_integer() == *oracle::evaluate(e));
    for (const auto& t : lts.transitions) CHECK(t.action == Term::symbol("τ"));
  }
}

TEST_CASE("one successor per redex") {
  gen::Rng rng(2718);
  for (int k = 0; k < 300; ++k) {
    Term e = gen::arith_expr(rng, 5, true);
    CHECK(next(e).size() == oracle::count_redexes(e));
  }
}

TEST_CASE("division-free expressions agree with the oracle under depth-first search") {
  gen::Rng rng(1);
  ExploreOptions o;
  o.successor.order = SearchOrder::DepthFirst;
  for (int k = 0; k < 30; ++k) {
    Term e = gen::arith_expr(rng, 4, false);
    auto lts = explore(arith::system(), arith::schema(), e, o);
    auto terminal = lts.terminal_states();
    REQUIRE(terminal.size() == 1);
    CHECK(lts.states[terminal[0]].data().as_integer() == *oracle::evaluate(e));
  }
}
