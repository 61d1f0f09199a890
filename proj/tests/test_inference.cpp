#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace sos;

namespace {

Term sym(const char* s) { return Term::symbol(s); }
Term seq(std::vector<Term> ts) { return Term::sequence(std::move(ts)); }
Term i(long long v) { return Term::integer(v); }

// Peano naturals: (z nat) and (n nat) => ((s n) nat).
System peano() {
  Term n = Term::fresh_variable("n");
  System s("peano");
  s.add(Rule("zero", {}, seq({sym("z"), sym("nat")})));
  s.add(Rule("succ", {seq({n, sym("nat")})}, seq({seq({sym("s"), n}), sym("nat")})));
  return s;
}

Term numeral(int k) {
  Term t = sym("z");
  while (k-- > 0) t = seq({sym("s"), t});
  return t;
}

}  // namespace

TEST_CASE("rule variables cover conclusion, equations and premises only") {
  Term a = Term::fresh_variable("a");
  Term b = Term::fresh_variable("b");
  Term c = Term::fresh_variable("c");
  Term d = Term::fresh_variable("d");
  Rule r("r", {a}, b, {{c, i(1)}},
         {Condition::check(Term::apply(ops::contains(), {Term::value(DataValue::set({})), d}))});
  CHECK(r.variables() == VarSet{a.var(), b.var(), c.var()});
  CHECK_FALSE(r.is_axiom());
}

TEST_CASE("duplicate rule names are rejected") {
  System s;
  s.add(Rule("r", {}, sym("a")));
  CHECK_THROWS_AS(s.add(Rule("r", {}, sym("b"))), std::invalid_argument);
  CHECK(s.find("r"));
  CHECK_FALSE(s.find("q"));
}

TEST_CASE("closed derivability question") {
  auto sys = peano();
  auto answers = all_answers(sys, seq({numeral(2), sym("nat")}));
  REQUIRE(answers.size() == 1);
  CHECK(answers[0].sigma.empty());
  CHECK(answers[0].tree.size() == 3);
  CHECK(answers[0].tree.rule_name() == "succ");
  CHECK(validate_tree(answers[0].tree));
  CHECK(all_answers(sys, seq({sym("s"), sym("nat")})).empty());
}

TEST_CASE("open question enumerates answers breadth first") {
  auto sys = peano();
  Term x = Term::fresh_variable("X");
  auto stream = iter_answers(sys, seq({x, sym("nat")}));
  for (int k = 0; k < 4; ++k) {
    auto a = stream.next();
    REQUIRE(a);
    CHECK(*a->sigma.find(x.var()) == numeral(k));
    CHECK(validate_tree(a->tree));
  }
  CHECK(stream.status() == AnswerStream::Status::Running);
}

TEST_CASE("step budget ends an infinite search") {
  auto sys = peano();
  Term x = Term::fresh_variable("X");
  EngineOptions o;
  o.step_budget = 20;
  CHECK_THROWS_AS(all_answers(sys, seq({x, sym("nat")}), o), BudgetExhausted);
  auto stream = iter_answers(sys, seq({x, sym("nat")}), o);
  while (stream.next()) {
  }
  CHECK(stream.status() == AnswerStream::Status::BudgetExhausted);
  CHECK(stream.steps() == 20);
}

TEST_CASE("depth-first order visits later rules first") {
  System s;
  Term x = Term::fresh_variable("x");
  s.add(Rule("one", {}, seq({sym("pick"), i(1)})));
  s.add(Rule("two", {}, seq({sym("pick"), i(2)})));
  Term q = seq({sym("pick"), x});
  auto bfs = all_answers(s, q);
  EngineOptions o;
  o.order = SearchOrder::DepthFirst;
  auto dfs = all_answers(s, q, o);
  REQUIRE(bfs.size() == 2);
  REQUIRE(dfs.size() == 2);
  CHECK(bfs[0].tree.rule_name() == "one");
  CHECK(dfs[0].tree.rule_name() == "two");
}

TEST_CASE("rule-order backtracking flag must stay off") {
  EngineOptions o;
  o.backtrack_rule_order = true;
  CHECK_THROWS_AS(iter_answers(peano(), sym("z"), o), std::invalid_argument);
}

TEST_CASE("renamings introduce only fresh variables") {
  auto sys = peano();
  Term x = Term::fresh_variable("X");
  std::set<std::uint64_t> seen = {x.var().id};
  bool clash = false;
  std::size_t renamings = 0;
  EngineOptions o;
  o.on_rename = [&](const Substitution& rho) {
    ++renamings;
    for (const auto& [from, to] : rho) {
      if (from.id == to.var().id) clash = true;
      if (!seen.insert(to.var().id).second) clash = true;
    }
  };
  auto stream = iter_answers(sys, seq({x, sym("nat")}), o);
  for (int k = 0; k < 5; ++k) REQUIRE(stream.next());
  CHECK(renamings > 5);
  CHECK_FALSE(clash);
}

TEST_CASE("operators in conclusions are evaluated after matching") {
  Term n = Term::fresh_variable("n");
  Term m = Term::fresh_variable("m");
  System s;
  s.add(Rule("double", {}, seq({sym("double"), n, Term::apply(ops::add(), {n, n})})));
  auto answers = all_answers(s, seq({sym("double"), i(21), m}));
  REQUIRE(answers.size() == 1);
  CHECK(*answers[0].sigma.find(m.var()) == i(42));
}

TEST_CASE("inverting an operator is not agnostically solvable") {
  Term n = Term::fresh_variable("n");
  System s;
  s.add(Rule("double", {}, seq({sym("double"), n, Term::apply(ops::add(), {n, n})})));
  Term q = Term::fresh_variable("q");
  CHECK_THROWS_AS(all_answers(s, seq({sym("double"), q, i(42)})), NotAgnosticallySolvable);
}

TEST_CASE("range hints prune impossible operator matches") {
  Term n = Term::fresh_variable("n");
  System s;
  s.add(Rule("double", {}, seq({sym("double"), n, Term::apply(ops::add(), {n, n})})));
  Term q = Term::fresh_variable("q");
  CHECK(all_answers(s, seq({sym("double"), q, sym("word")})).empty());
}

TEST_CASE("unbound question variables are an engine fault") {
  Term y = Term::fresh_variable("y");
  System s;
  s.add(Rule("any", {}, seq({sym("any"), y})));
  Term q = Term::fresh_variable("q");
  CHECK_THROWS_AS(all_answers(s, seq({sym("any"), q})), NotAgnosticallySolvable);
}

TEST_CASE("undetermined rule variables are an engine fault") {
  Term w = Term::fresh_variable("w");
  System s;
  s.add(Rule("loose", {}, sym("ok"), {{w, w}}));
  CHECK_THROWS_AS(all_answers(s, sym("ok")), NotAgnosticallySolvable);
}

TEST_CASE("conditions filter answers") {
  Term n = Term::fresh_variable("n");
  Term small = Term::value(DataValue::set({DataValue::integer(1), DataValue::integer(2)}));
  System s;
  s.add(Rule("small", {}, seq({sym("small"), n}), {},
             {Condition::check(Term::apply(ops::contains(), {small, n}))}));
  CHECK(all_answers(s, seq({sym("small"), i(1)})).size() == 1);
  CHECK(all_answers(s, seq({sym("small"), i(3)})).empty());
  CHECK_THROWS_AS(all_answers(s, seq({sym("small"), Term::fresh_variable("q")})), NotAgnosticallySolvable);
}

TEST_CASE("custom conditions see the rule's own variables") {
  Term n = Term::fresh_variable("n");
  System s;
  s.add(Rule("positive", {}, seq({sym("pos"), n}), {},
             {Condition("n > 0", [n](const Substitution& sigma) {
               const Term* t = sigma.find(n.var());
               if (!t) return Verdict::Satisfiable;
               return t->data().as_integer() > 0 ? Verdict::Satisfied : Verdict::Violated;
             })}));
  CHECK(all_answers(s, seq({sym("pos"), i(4)})).size() == 1);
  CHECK(all_answers(s, seq({sym("pos"), i(-4)})).empty());
}

TEST_CASE("instance clauses are checked individually") {
  Term a = Term::fresh_variable("a");
  Term b = Term::fresh_variable("b");
  Term set = Term::value(DataValue::set({DataValue::integer(1)}));
  Rule r("r", {seq({a, Term::apply(ops::floor_div(), {i(1), a})})}, seq({a, b}), {{b, Term::apply(ops::add(), {a, i(1)})}},
         {Condition::check(Term::apply(ops::contains(), {set, a}))});
  CHECK(check_instance(r, {{a.var(), i(1)}, {b.var(), i(2)}}));
  CHECK(check_instance(r, {{a.var(), i(1)}}).clause == 1);
  CHECK(check_instance(r, {{a.var(), i(1)}, {b.var(), a}}).clause == 1);
  CHECK(check_instance(r, {{a.var(), i(0)}, {b.var(), i(1)}}).clause == 2);
  CHECK(check_instance(r, {{a.var(), i(1)}, {b.var(), i(5)}}).clause == 3);
  Rule r2("r2", {}, seq({a, b}), {}, {Condition::check(Term::apply(ops::contains(), {set, a}))});
  CHECK(check_instance(r2, {{a.var(), i(2)}, {b.var(), i(2)}}).clause == 4);
  Rule r3("r3", {}, Term::apply(ops::floor_div(), {a, b}));
  CHECK(check_instance(r3, {{a.var(), i(2)}, {b.var(), i(0)}}).clause == 5);
}

TEST_CASE("tree validation catches mismatched subtrees") {
  auto sys = peano();
  auto answers = all_answers(sys, seq({numeral(1), sym("nat")}));
  REQUIRE(answers.size() == 1);
  InferenceTree tree = answers[0].tree;
  CHECK(validate_tree(tree));
  InferenceTree no_children = tree;
  no_children.subtrees.clear();
  CHECK_FALSE(validate_tree(no_children));
  InferenceTree wrong = tree;
  wrong.subtrees[0] = tree;  // concludes ((s z) nat) where (z nat) is needed
  CHECK_FALSE(validate_tree(wrong));
}

TEST_CASE("engine soundness fuzz over arithmetic and CCS") {
  gen::Rng rng(99);
  props::SoundnessStats stats;
  for (int k = 0; k < 300; ++k) props::check_soundness(arith::system(), arith::schema(), gen::arith_expr(rng, 4), stats);
  for (int k = 0; k < 300; ++k) props::check_soundness(ccs::system(), ccs::schema(), gen::ccs_process(rng, 3), stats);
  MESSAGE(stats.questions << " questions, " << stats.answers << " answers");
  CHECK(stats.answers > 300);
  CHECK_MESSAGE(stats.violations == 0, stats.first_failure);
}
