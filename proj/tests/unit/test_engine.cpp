#include <regex>
#include <sstream>

#include "doctest.h"
#include "quantifier_oracle.hpp"
#include "slam/engine.hpp"
#include "slam/eval.hpp"
#include "slam/parser.hpp"
#include "slam/pipeline.hpp"
#include "support.hpp"

using namespace slam;
using namespace slam::testing;

namespace {

Term var(const std::string& name) { return Term::var(name); }

std::shared_ptr<LogicProgram> small_program() {
  auto p = std::make_shared<LogicProgram>();
  // id(X, R) :- R = X.
  p->add_clause("id", {{var("X"), var("R")}, {Goal::eq(var("R"), var("X"))}});
  // parts(PointCartesian(X, Y), R) :- R = [X, Y].
  p->add_clause("parts", {{Term::con("PointCartesian", {var("X"), var("Y")}), var("R")},
                          {Goal::eq(var("R"), Term::list({var("X"), var("Y")}))}});
  // pick(R) :- R = 1, false.   pick(R) :- R = 2.
  p->add_clause("pick", {{var("R")}, {Goal::eq(var("R"), Term::constant(Value::integer(1))),
                                      Goal::guard(Term::constant(Value::boolean(false)))}});
  p->add_clause("pick", {{var("R")}, {Goal::eq(var("R"), Term::constant(Value::integer(2)))}});
  // keep(X, R) :- R = X, false.   keep(X, R) :- R = seen(X).
  p->add_clause("keep", {{var("X"), var("R")}, {Goal::eq(var("R"), var("X")),
                                                Goal::guard(Term::constant(Value::boolean(false)))}});
  p->add_clause("keep", {{var("X"), var("R")}, {Goal::eq(var("R"), Term::con("seen", {var("X")}))}});
  // loop(R) :- loop(R).
  p->add_clause("loop", {{var("R")}, {Goal::call("loop", {var("R")})}});
  return p;
}

Value point(double x, double y) { return Value::con("PointCartesian", {Value::real(x), Value::real(y)}); }

const Spec& tree_spec() {
  static const Spec spec = load_files({"specs/tree.slam"});
  return spec;
}

const Spec& bank_spec() {
  static const Spec spec = load_files({"specs/banks.slam"});
  return spec;
}

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("unify through clause heads") {
  Engine engine(small_program());
  auto parts = engine.call_function("parts", {Value::con("PointCartesian", {Value::integer(1), Value::real(2.5)})});
  REQUIRE(parts);
  CHECK(*parts == Value::seq({Value::integer(1), Value::real(2.5)}));
  CHECK_FALSE(engine.call_function("parts", {Value::con("PointPolar", {Value::real(4.5), Value::real(1.57)})}));

  ValueGen gen(11);
  for (int i = 0; i < 50; ++i) {
    Value v = gen.any(3);
    auto r = engine.call_function("id", {v});
    REQUIRE(r);
    CHECK(*r == v);
  }
}

TEST_CASE("backtracking leaves no bindings behind") {
  Engine engine(small_program());
  CHECK(engine.call_function("pick", {}) == Value::integer(2));
  auto kept = engine.call_function("keep", {Value::string("a")});
  REQUIRE(kept);
  CHECK(*kept == Value::con("seen", {Value::string("a")}));
}

TEST_CASE("solve: CoordX clauses") {
  const Spec spec = load_files({"specs/point.slam"});
  REQUIRE(spec.ok());
  Engine engine(spec.program);
  auto r = engine.call_function("sol-CoordX", {point(7, 9)});
  REQUIRE(r);
  CHECK(*r == Value::real(7));
  CHECK_FALSE(engine.call_function("sol-CoordX", {Value::con("PointPolar", {Value::real(1), Value::real(1)})}));
  CHECK(engine.prove("pre-CoordX", {point(7, 9)}));
  CHECK(engine.prove("post-CoordX", {point(7, 9), Value::real(7)}));
  CHECK_FALSE(engine.prove("post-CoordX", {point(7, 9), Value::real(9)}));
}

TEST_CASE("solve: range enumeration order") {
  CHECK(evaluate(tree_spec(), "seqof x in 1..3 . x") ==
        Value::seq({Value::integer(1), Value::integer(2), Value::integer(3)}));
  CHECK(evaluate(tree_spec(), "map x in 3..2 . x") == Value::seq({}));
}

TEST_CASE("quantifier examples") {
  CHECK(evaluate(tree_spec(), "sum x in 1..4 . x") == Value::integer(10));
  CHECK(evaluate(tree_spec(), "forall x in [] . x > 0") == Value::boolean(true));
  CHECK(evaluate(tree_spec(), "exists x in [] . x > 0") == Value::boolean(false));
  CHECK(evaluate(bank_spec(), R"(sum t in [tran("A", "B", 10), tran("A", "C", 5)] | t.source = "A" . t.amount)")
            .as_number() == 15);

  Value expected = Value::seq(
      {Value::con("Bankbank", {Value::record({{"name", Value::string("A")}, {"amount", Value::real(10)}})}),
       Value::con("Bankbank", {Value::record({{"name", Value::string("B")}, {"amount", Value::real(-10)}})})});
  std::string final_amount = R"(FinalAmount([tran("A", "B", 10)], ["A", "B"]))";
  CHECK(evaluate(bank_spec(), final_amount) == expected);
  CHECK(evaluate_direct(bank_spec(), final_amount) == expected);
}

TEST_CASE("extremum over an empty collection") {
  for (const auto& q : {"max", "min", "argmax", "argmin"}) {
    std::string text = std::string(q) + " x in [1, 2] | x > 5 . x";
    CHECK_MESSAGE(error_code([&] { evaluate(tree_spec(), text); }) == "EMPTY_EXTREMUM", q);
    CHECK_MESSAGE(error_code([&] { evaluate_direct(tree_spec(), text); }) == "EMPTY_EXTREMUM", q);
  }
}

TEST_CASE("filter drops the elements whose body holds") {
  CHECK(evaluate(tree_spec(), "filter x in [1, 2, 3, 4] . x > 2") == Value::seq({Value::integer(1), Value::integer(2)}));
  CHECK(evaluate(tree_spec(), R"(filter c in "banana" . c = "a")") == Value::string("bnn"));
}

TEST_CASE("eval_expr examples") {
  const Spec spec = load_files({"specs/point.slam"});
  REQUIRE(spec.ok());
  CHECK(evaluate_direct(spec, "Cartesian(1, 2.5)") == point(1, 2.5));
  CHECK(evaluate_direct(spec, "2 + 3 * 4") == Value::integer(14));
  CHECK(evaluate(spec, "2 + 3 * 4") == Value::integer(14));
  CHECK(error_code([&] { evaluate_direct(spec, "Polar(1, 1).CoordX()"); }) == "NO_APPLICABLE_RULE");
  CHECK(error_code([&] { evaluate(spec, "Polar(1, 1).CoordX()"); }) == "NO_APPLICABLE_RULE");
}

TEST_CASE("quantifiers agree with a brute-force fold, engine and direct evaluator") {
  QuantifierCaseGen gen(20260517);
  for (const auto& keyword : quantifier_keywords()) {
    for (int i = 0; i < 25; ++i) {
      QuantifierCase c = gen.make(keyword);
      for (int route = 0; route < 2; ++route) {
        std::string error;
        std::optional<Value> got;
        try {
          got = route == 0 ? evaluate(tree_spec(), c.expression) : evaluate_direct(tree_spec(), c.expression);
        } catch (const Error& e) {
          error = e.code();
        }
        if (c.expected.value) {
          REQUIRE_MESSAGE(got, c.expression << " raised " << error);
          CHECK_MESSAGE(outcome_matches(*c.expected.value, *got, 1e-9), c.expression << " gave " << to_text(*got)
                                                                                     << " expected "
                                                                                     << to_text(*c.expected.value));
        } else {
          CHECK_MESSAGE(error == c.expected.error, c.expression);
        }
      }
    }
  }
}

TEST_CASE("quantifier dualities") {
  ValueGen gen(7);
  for (int i = 0; i < 40; ++i) {
    std::string xs = "[";
    std::size_t n = gen.pick(12);
    for (std::size_t k = 0; k < n; ++k) xs += (k ? ", " : "") + std::to_string(static_cast<int>(gen.pick(9)) - 4);
    xs += "]";
    std::string m = std::to_string(gen.pick(5));
    Value exists = evaluate(tree_spec(), "exists x in " + xs + " | x > 0 . x > " + m);
    Value not_forall = evaluate(tree_spec(), "not (forall x in " + xs + " | x > 0 . not (x > " + m + "))");
    CHECK(exists == not_forall);

    Value count = evaluate(tree_spec(), "count x in " + xs + " . x > " + m);
    CHECK(count.as_int() <= static_cast<std::int64_t>(n));

    if (n > 0) {
      Value max = evaluate(tree_spec(), "max x in " + xs + " . x * x");
      Value arg = evaluate(tree_spec(), "argmax x in " + xs + " . x * x");
      CHECK(arg.as_int() * arg.as_int() == max.as_int());
      Value min = evaluate(tree_spec(), "min x in " + xs + " . x * x");
      Value arg_min = evaluate(tree_spec(), "argmin x in " + xs + " . x * x");
      CHECK(arg_min.as_int() * arg_min.as_int() == min.as_int());
    }
  }
}

TEST_CASE("enumeration is deterministic") {
  std::string tree = "Node(Node(Leaf(1), 2, Leaf(3)), 4, Node(Empty(), 5, Leaf(6)))";
  Value first = evaluate(tree_spec(), "seqof x in " + tree + " . x");
  Value second = evaluate(tree_spec(), "seqof x in " + tree + " . x");
  CHECK(first == second);
  CHECK(first == Value::seq({Value::integer(1), Value::integer(2), Value::integer(3), Value::integer(4),
                             Value::integer(5), Value::integer(6)}));
  Evaluator direct(tree_spec().hierarchy);
  auto items = direct.elements(evaluate(tree_spec(), tree));
  CHECK(Value::seq(items) == first);
}

TEST_CASE("limits") {
  Limits shallow;
  shallow.max_depth = 50;
  Engine engine(small_program(), shallow);
  CHECK(error_code([&] { engine.call_function("loop", {}); }) == "DEPTH_LIMIT");

  Limits few;
  few.max_enumeration = 10;
  CHECK(error_code([&] { evaluate(tree_spec(), "sum x in 1..100 . x", few); }) == "ENUMERATION_LIMIT");
  CHECK(evaluate(tree_spec(), "sum x in 1..10 . x", few) == Value::integer(55));

  Limits quick;
  quick.timeout = std::chrono::milliseconds(1);
  CHECK(error_code([&] { evaluate(tree_spec(), "sum x in 1..200000 . sum y in 1..50 . y", quick); }) == "TIMEOUT");

  Limits parsed = parse_limits("depth=5,enum=7,timeout=2");
  CHECK(parsed.max_depth == 5);
  CHECK(parsed.max_enumeration == 7);
  CHECK(parsed.timeout == std::chrono::milliseconds(2000));
  CHECK(error_code([] { parse_limits("depth=0"); }) == "BAD_LIMITS");
  CHECK(error_code([] { parse_limits("speed=3"); }) == "BAD_LIMITS");
  CHECK(error_code([] { parse_limits("enum=-4"); }) == "BAD_LIMITS");
}

TEST_CASE("trace format") {
  const Spec spec = load_files({"specs/point.slam"});
  REQUIRE(spec.ok());
  std::ostringstream trace;
  evaluate(spec, "Distance(Cartesian(0, 0), Cartesian(3, 4))", {}, &trace);
  std::istringstream lines(trace.str());
  std::regex shape(R"(^(ENTER|EXIT|FAIL) [^ ]+/[0-9]+ depth=[0-9]+$)");
  int count = 0;
  for (std::string line; std::getline(lines, line); ++count) CHECK_MESSAGE(std::regex_match(line, shape), line);
  CHECK(count >= 2);
  CHECK(trace.str().rfind("ENTER sol-Distance/3 depth=1\n", 0) == 0);

  std::ostringstream failing;
  CHECK_THROWS(evaluate(spec, "Polar(1, 1).CoordX()", {}, &failing));
  CHECK(failing.str() == "ENTER sol-CoordX/2 depth=1\nFAIL sol-CoordX/2 depth=1\n");
}

TEST_CASE("engine and evaluator agree on corpus calls") {
  const Spec spec = load_files(corpus_files());
  REQUIRE(spec.ok());
  const std::vector<std::string> exprs{
      "Distance(Cartesian(0, 0), Cartesian(3, 4))",
      "Cartesian(1, 2, Red()).CoordX()",
      "Node(Leaf(1), 2, Leaf(3)).Height()",
      "Node(Leaf(1), 2, Leaf(3)).Mirror()",
      "Node(Leaf(1), 2, Leaf(3)).Contains(3)",
      R"(FinalAmount([tran("A", "B", 10), tran("B", "C", 4)], ["A", "B", "C"]))",
  };
  for (const auto& e : exprs) CHECK_MESSAGE(evaluate(spec, e) == evaluate_direct(spec, e), e);
}
