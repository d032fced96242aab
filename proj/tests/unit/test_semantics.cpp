#include "doctest.h"
#include "slam/parser.hpp"
#include "slam/semantics.hpp"
#include "support.hpp"

using namespace slam;
using namespace slam::testing;

namespace {

std::string point_and_segment() {
  return read_text(source_path("specs/point.slam")) + read_text(source_path("specs/segment.slam"));
}

const char* kColouredSegment = R"(
class ColouredSegment extends Segment {
  label seg : {source: ColouredPoint, destination: ColouredPoint}
}
)";

HierarchyResult analyze_text(const std::string& text) {
  auto parsed = parse_spec(text);
  REQUIRE_MESSAGE(parsed.ok(), format_diagnostics(parsed.diags));
  return analyze(parsed.defs);
}

}  // namespace

TEST_CASE("extension appends components") {
  Spec spec = load_files({"specs/point.slam"});
  REQUIRE(spec.ok());
  const ClassInfo* cp = spec.hierarchy->find("ColouredPoint");
  REQUIRE(cp);
  CHECK(cp->ancestors == std::vector<std::string>{"Point"});
  REQUIRE(cp->alt("Cartesian"));
  CHECK(cp->alt("Cartesian")->components.size() == 3);
  CHECK(cp->alt("Cartesian")->qualified == "ColouredPointCartesian");
  REQUIRE(cp->alt("Polar"));
  CHECK(cp->alt("Polar")->qualified == "ColouredPointPolar");
  CHECK_FALSE(cp->alt("Polar")->local);
}

TEST_CASE("overriding components with subclasses is legal") {
  Spec spec = load_spec_source(point_and_segment() + kColouredSegment);
  REQUIRE_MESSAGE(spec.ok(), format_diagnostics(spec.diags));
  const ClassInfo* cs = spec.hierarchy->find("ColouredSegment");
  REQUIRE(cs);
  const ResolvedAlt* seg = cs->alt("seg");
  REQUIRE(seg);
  CHECK(seg->qualified == "ColouredSegmentseg");
}

TEST_CASE("illegal hierarchies") {
  CHECK(has_code(analyze_text("class A extends A { case X() }").diags, "INHERITANCE_CYCLE"));
  CHECK(has_code(analyze_text("class A extends B { case X() } class B extends A { case Y() }").diags,
                 "INHERITANCE_CYCLE"));
  CHECK(has_code(analyze_text("class A { case X() } class A { case Y() }").diags, "DUPLICATE_CLASS"));
  CHECK(has_code(analyze_text("class A extends Missing { case X() }").diags, "UNKNOWN_PARENT"));
  CHECK(has_code(analyze_text("class P { case C(Int, Int, Int) } class Q extends P { case C(Int) }").diags,
                 "OVERRIDE_ARITY"));
  CHECK(has_code(analyze_text("class P { case C(Int, Int) } class Q extends P { case C(Int, String) }").diags,
                 "OVERRIDE_TYPE"));
  CHECK(has_code(analyze_text("class A { case X() case X(Int) }").diags, "DUPLICATE_TAG"));
}

TEST_CASE("check_rules on the corpus is clean") {
  Spec spec = load_files(corpus_files());
  REQUIRE(spec.ok());
  CHECK_FALSE(has_errors(spec.diags));
  // CoordX and MoveLeft in particular
  for (const auto& d : spec.diags) CHECK(d.severity == Severity::Warning);
}

TEST_CASE("Result is reserved to postconditions") {
  auto pre = analyze_text(R"(
class A {
  case X(Int)
  observer Get() : Int
  rule { pre: Result > 0  call: X(n).Get()  post: Result = n }
})");
  CHECK(has_code(pre.diags, "RESULT_IN_PRE"));
  auto sol = analyze_text(R"(
class A {
  case X(Int)
  observer Get() : Int
  rule { call: X(n).Get()  sol: Result }
})");
  CHECK(has_code(sol.diags, "RESULT_IN_SOL"));
  auto pattern = parse_spec(R"(
class A {
  case X(Int)
  observer Get() : Int
  rule { call: X(Result).Get()  post: true }
})");
  CHECK(has_code(pattern.diags, "RESULT_IN_PATTERN"));
}

TEST_CASE("patterns are linear") {
  auto r = analyze_text(R"(
class A {
  case X(Int, Int)
  observer Same() : Bool
  rule { call: X(n, n).Same()  sol: true }
})");
  CHECK(has_code(r.diags, "NONLINEAR_PATTERN"));
}

TEST_CASE("every violation is reported") {
  auto typing = analyze_text(R"(
class A {
  case X(Int)
  observer Get() : Int
  observer Other() : Int
  rule { pre: Result > 0  call: X(n).Get()  post: Result = n }
  rule { pre: n + 1  call: X(n).Other()  post: Result = n }
})");
  CHECK(has_code(typing.diags, "RESULT_IN_PRE"));
  CHECK(has_code(typing.diags, "NOT_BOOLEAN"));

  auto names = analyze_text(R"(
class A {
  case X(Int)
  observer Get() : Int
  observer Other() : Int
  rule { call: X(n).Get()  post: Result = k }
  rule { call: X(n).Other()  post: Result = m }
})");
  int unbound = 0;
  for (const auto& d : names.diags) unbound += d.code == "UNBOUND_VARIABLE";
  CHECK(unbound == 2);
}

TEST_CASE("pre and post must be boolean") {
  auto r = analyze_text(R"(
class A {
  case X(Int)
  observer Get() : Int
  rule { pre: 1 + 2  call: X(n).Get()  post: Result = n }
})");
  CHECK(has_code(r.diags, "NOT_BOOLEAN"));
}

TEST_CASE("check_computability") {
  Spec tree = load_files({"specs/tree.slam"});
  REQUIRE(tree.ok());
  CHECK_FALSE(has_code(tree.diags, "NOT_TRAVERSABLE"));

  auto bad = analyze_text(R"(
class Bag {
  case B(Int)
  observer Total() : Int
  rule { call: b.Total()  sol: sum x in b . x }
})");
  CHECK(has_code(bad.diags, "NOT_TRAVERSABLE"));

  // PointAt has no sol; its post is of the form Result = e
  Spec point = load_files({"specs/point.slam"});
  REQUIRE(point.ok());
  CHECK_FALSE(has_code(point.diags, "NOT_EXECUTABLE"));
  const FunctionRule* rule = point.hierarchy->rules_for("PointAt").at(0);
  CHECK(executable_solution(*rule) != nullptr);

  Spec modes = load_files({"tests/fixtures/checkmodes.slam"});
  REQUIRE(modes.ok());
  CHECK(has_code(modes.diags, "NOT_EXECUTABLE"));
}

TEST_CASE("Result in a quantifier filter is flagged") {
  auto r = analyze_text(R"(
class A {
  case X(Seq(Int))
  observer Big() : Int
  rule { call: X(xs).Big()  post: (count x in xs | x > Result . true) = 0 }
})");
  CHECK(r.hierarchy);
  CHECK(has_code(r.diags, "RESULT_IN_FILTER"));
}

TEST_CASE("project_to_ancestor") {
  Spec spec = load_spec_source(point_and_segment() + kColouredSegment);
  REQUIRE(spec.ok());
  const ClassHierarchy& h = *spec.hierarchy;
  Value red = Value::con("ColourRed", {});
  Value cp = Value::con("ColouredPointCartesian", {Value::integer(1), Value::integer(2), red});
  CHECK(project_to_ancestor(cp, "Point", h) == Value::con("PointCartesian", {Value::integer(1), Value::integer(2)}));

  Value p = Value::con("PointCartesian", {Value::integer(1), Value::integer(2)});
  CHECK(project_to_ancestor(p, "Point", h) == p);

  Value blue = Value::con("ColourBlue", {});
  Value cp2 = Value::con("ColouredPointCartesian", {Value::real(3.5), Value::integer(-4), blue});
  Value cseg = Value::con("ColouredSegmentseg",
                          {Value::record({{"source", cp}, {"destination", cp2}})});
  Value expected = Value::con(
      "Segmentseg", {Value::record({{"source", Value::con("PointCartesian", {Value::integer(1), Value::integer(2)})},
                                    {"destination", Value::con("PointCartesian",
                                                               {Value::real(3.5), Value::integer(-4)})}})});
  CHECK(project_to_ancestor(cseg, "Segment", h) == expected);

  CHECK_THROWS_WITH_AS(project_to_ancestor(red, "Point", h), doctest::Contains("Colour"), Error);
  try {
    project_to_ancestor(red, "Point", h);
  } catch (const Error& e) {
    CHECK(e.code() == "CAST_ERROR");
  }
}

TEST_CASE("projection is idempotent and composes") {
  Spec spec = load_spec_source(point_and_segment() + kColouredSegment);
  REQUIRE(spec.ok());
  const ClassHierarchy& h = *spec.hierarchy;
  ValueGen gen(7);
  for (int i = 0; i < 100; ++i) {
    Value colour = Value::con(std::vector<std::string>{"ColourRed", "ColourGreen", "ColourBlue"}[gen.pick(3)], {});
    auto point = [&] {
      Value x = Value::real(gen.real());
      Value y = Value::integer(gen.integer());
      if (gen.pick(2)) return Value::con("ColouredPointCartesian", {x, y, colour});
      return Value::con("ColouredPointPolar", {x, y});
    };
    Value seg = Value::con("ColouredSegmentseg", {Value::record({{"source", point()}, {"destination", point()}})});
    Value once = project_to_ancestor(seg, "Segment", h);
    CHECK(project_to_ancestor(once, "Segment", h) == once);
    Value p = point();
    CHECK(project_to_ancestor(project_to_ancestor(p, "ColouredPoint", h), "Point", h) ==
          project_to_ancestor(p, "Point", h));
  }
}

TEST_CASE("hierarchy construction is order-insensitive") {
  auto parsed = parse_spec(point_and_segment() + kColouredSegment);
  REQUIRE(parsed.ok());
  auto forward = analyze(parsed.defs);
  std::vector<ClassDef> reversed(parsed.defs.rbegin(), parsed.defs.rend());
  auto backward = analyze(reversed);
  REQUIRE(forward.hierarchy);
  REQUIRE(backward.hierarchy);
  CHECK(forward.hierarchy->tags == backward.hierarchy->tags);
  CHECK(forward.hierarchy->dispatch == backward.hierarchy->dispatch);
  CHECK(forward.hierarchy->missing == backward.hierarchy->missing);
  for (const auto& [name, info] : forward.hierarchy->classes) {
    CHECK(info.ancestors == backward.hierarchy->find(name)->ancestors);
  }
}

TEST_CASE("dispatch and missing bookkeeping") {
  Spec spec = load_files({"specs/point.slam"});
  REQUIRE(spec.ok());
  const ClassHierarchy& h = *spec.hierarchy;
  CHECK(h.missing.count({"CoordX", "ColouredPoint"}));
  CHECK(h.dispatch.at({"CoordX", "ColouredPoint"}) == "Point");
  CHECK(h.dispatch.at({"CoordX", "Point"}) == "Point");
  CHECK_FALSE(h.missing.count({"Hue", "ColouredPoint"}));
  for (const auto& [f, c] : h.missing) {
    bool local = false;
    for (const auto& r : h.find(c)->def.rules) local = local || r.fname == f;
    CHECK_FALSE(local);
    CHECK(h.dispatch.at({f, c}) != c);
  }
}

TEST_CASE("multiple inheritance with two defining ancestors is ambiguous") {
  auto r = analyze_text(R"(
class A {
  case X(Int)
  observer Get() : Int
  rule { call: X(n).Get()  sol: n }
}
class B {
  case X(Int)
  observer Get() : Int
  rule { call: X(n).Get()  sol: n + 1 }
}
class C extends A, B {
  case X(Int)
})");
  CHECK(has_code(r.diags, "AMBIGUOUS_INHERITANCE"));
}
