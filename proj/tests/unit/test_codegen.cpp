#include <regex>

#include "doctest.h"
#include "slam/codegen.hpp"
#include "slam/hooks.hpp"
#include "slam/slimp.hpp"
#include "support.hpp"

using namespace slam;
using namespace slam::testing;

namespace {

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  auto at = text.find(from);
  REQUIRE_MESSAGE(at != std::string::npos, from);
  return text.replace(at, from.size(), to);
}

SlimpProgram parse_files(const EmittedFiles& files) {
  std::vector<std::pair<std::string, std::string>> list(files.begin(), files.end());
  auto parsed = parse_slimp(list);
  REQUIRE_MESSAGE(parsed.ok(), format_diagnostics(parsed.diags));
  return parsed.program;
}

// Runs `exprs` through the emitted skeleton with in-process hooks and through
// the direct evaluator.
void check_agreement(const Spec& spec, const std::vector<std::string>& exprs) {
  EmittedFiles files = emit_program(spec);
  SlimpProgram program = parse_files(files);
  CheckRuntime runtime(spec);
  InprocHooks hooks(runtime, Policy::Report);
  SlimpInterpreter interp(program, spec.hierarchy, &hooks);
  for (const auto& e : exprs) {
    Value expected = evaluate_direct(spec, e);
    Value got = interp.eval(parse_query(spec, e));
    CHECK_MESSAGE(equivalent(expected, got), e << ": " << to_text(got) << " vs " << to_text(expected));
  }
  for (const auto& r : runtime.collector().records()) {
    CHECK_MESSAGE(r.verdict == Verdict::Pass, r.function << " " << check_kind_name(r.kind));
  }
  CHECK_FALSE(runtime.collector().records().empty());
}

std::string random_tree(ValueGen& gen, int depth) {
  if (depth == 0 || gen.pick(4) == 0) return "Empty()";
  return "Node(" + random_tree(gen, depth - 1) + ", " + std::to_string(gen.pick(20)) + ", " +
         random_tree(gen, depth - 1) + ")";
}

}  // namespace

TEST_CASE("emit: empty spec gives the harness only") {
  Spec spec = load_spec_source("");
  REQUIRE(spec.ok());
  EmittedFiles files = emit_program(spec);
  REQUIRE(files.size() == 1);
  REQUIRE(files.count("main.slimp"));
  CHECK(files["main.slimp"].find("main {") != std::string::npos);
  CHECK(validate_emitted(files).empty());
}

TEST_CASE("emit: one file per class") {
  Spec spec = load_files({"specs/point.slam"});
  REQUIRE(spec.ok());
  EmittedFiles files = emit_program(spec);
  std::set<std::string> names;
  for (const auto& [name, _] : files) names.insert(name);
  CHECK(names == std::set<std::string>{"Colour.slimp", "ColouredPoint.slimp", "Point.slimp", "main.slimp"});
  CHECK(files["Point.slimp"].find("type Point = union { PointCartesian(Real, Real) | PointPolar(Real, Real) }") !=
        std::string::npos);
}

TEST_CASE("emit: CoordX is a one-line accessor with hooks") {
  Spec spec = load_files({"specs/point.slam"});
  REQUIRE(spec.ok());
  std::string point = emit_program(spec)["Point.slimp"];
  CHECK(point.find("func CoordX(arg_1: Point) : Real {\n  pre_check(\"Point:CoordX\", arg_1)\n"
                   "  when arg_1 is PointCartesian(x, y) {\n"
                   "    return post_check(\"Point:CoordX\", x, arg_1)\n  }\n") != std::string::npos);
}

TEST_CASE("emit: FinalAmount loops over banks and transactions") {
  Spec spec = load_files({"specs/banks.slam"});
  REQUIRE(spec.ok());
  std::string text = emit_program(spec)["CTransaction.slimp"];
  CHECK(text.find("pre_check(\"CTransaction:FinalAmount\", arg_1, arg_2)") != std::string::npos);
  CHECK(text.find("return post_check(\"CTransaction:FinalAmount\"") != std::string::npos);
  auto outer = text.find("    for b in banks {");
  REQUIRE(outer != std::string::npos);
  auto first = text.find("      for t in ctrans {", outer);
  REQUIRE(first != std::string::npos);
  CHECK(text.find("      for t in ctrans {", first + 1) != std::string::npos);
  CHECK(text.find("MaxBanks") == std::string::npos);
}

TEST_CASE("emit: stubs for functions without an executable rule") {
  Spec spec = load_files({"tests/fixtures/checkmodes.slam"});
  REQUIRE(spec.ok());
  EmittedFiles files = emit_program(spec);
  std::string text = files["Sorter.slimp"];
  CHECK(text.find("  pre_check(\"Sorter:Sort\", arg_1)\n  fail \"NOT_EXECUTABLE\"") != std::string::npos);
  CHECK(validate_emitted(files).empty());

  SlimpProgram program = parse_files(files);
  SlimpInterpreter interp(program, spec.hierarchy, nullptr);
  try {
    interp.call("Sort", {Value::seq({Value::integer(2), Value::integer(1)})});
    FAIL("stub returned");
  } catch (const Error& e) {
    CHECK(e.code() == "NOT_EXECUTABLE");
  }
  CHECK(interp.call("Root", {Value::real(9)}) == Value::real(3));
}

TEST_CASE("validate_emitted accepts every emitted program") {
  std::vector<std::vector<std::string>> sets{{"specs/point.slam"},
                                             {"specs/point.slam", "specs/segment.slam"},
                                             {"specs/stack.slam"},
                                             {"specs/tree.slam"},
                                             {"specs/banks.slam"},
                                             {"tests/fixtures/checkmodes.slam"},
                                             corpus_files()};
  for (const auto& files : sets) {
    Spec spec = load_files(files);
    REQUIRE(spec.ok());
    EmittedFiles emitted = emit_program(spec);
    Diagnostics diags = validate_emitted(emitted);
    CHECK_MESSAGE(diags.empty(), format_diagnostics(diags));
    CHECK(emit_program(spec) == emitted);
  }
}

TEST_CASE("hook completeness: every return of a func goes through its post hook") {
  Spec spec = load_files(corpus_files());
  REQUIRE(spec.ok());
  std::regex func_head(R"(^func (\w+)\()");
  for (const auto& [name, text] : emit_program(spec)) {
    std::istringstream in(text);
    std::string current;
    for (std::string line; std::getline(in, line);) {
      std::smatch m;
      if (std::regex_search(line, m, func_head)) current = m[1];
      else if (line.rfind("proc ", 0) == 0) current.clear();
      auto ret = line.find("return ");
      if (current.empty() || ret == std::string::npos) continue;
      CHECK_MESSAGE(line.find("return post_check(\"", ret) == ret, name << ": " << line);
      CHECK_MESSAGE(line.find(":" + current + "\"", ret) != std::string::npos, name << ": " << line);
    }
  }
}

TEST_CASE("validate_emitted: fault injection") {
  Spec spec = load_files({"specs/point.slam"});
  REQUIRE(spec.ok());
  const EmittedFiles good = emit_program(spec);
  const std::string point = good.at("Point.slimp");
  auto with_point = [&](const std::string& text) {
    EmittedFiles files = good;
    files["Point.slimp"] = text;
    return validate_emitted(files);
  };

  CHECK(has_code(with_point(replace_once(point, "return post_check(\"Point:CoordX\", x, arg_1)", "return x")),
                 "MISSING_POST_HOOK"));
  CHECK(has_code(with_point(replace_once(point, "  pre_check(\"Point:CoordX\", arg_1)\n", "")), "MISSING_PRE_HOOK"));
  CHECK(has_code(with_point(replace_once(point, "  pre_check(\"Point:CoordX\", arg_1)\n",
                                         "  pre_check(\"Point:CoordX\", arg_1)\n  pre_check(\"Point:CoordX\", arg_1)\n")),
                 "DUPLICATE_PRE_HOOK"));
  CHECK(has_code(with_point(replace_once(point, "  pre_check(\"Point:CoordX\", arg_1)\n",
                                         "  var z := 1\n  pre_check(\"Point:CoordX\", arg_1)\n")),
                 "PRE_HOOK_NOT_AT_ENTRY"));
  CHECK(has_code(with_point(replace_once(point, "post_check(\"Point:CoordX\", x, arg_1)",
                                         "post_check(\"Point:CoordY\", x, arg_1)")),
                 "HOOK_MISMATCH"));
  CHECK(has_code(with_point(replace_once(point, "return post_check(\"Point:CoordX\", x, arg_1)",
                                         "return post_check(\"Point:CoordX\", sum k in [x] . k, arg_1)")),
                 "QUANTIFIER_IN_SKELETON"));
  CHECK(has_code(with_point(replace_once(point, "when arg_1 is PointCartesian", "when arg_1 PointCartesian")), "SYNTAX"));
  CHECK(has_code(with_point(replace_once(point, "func CoordX(arg_1: Point) : Real {", "func CoordX(arg_1: Point) : Real")),
                 "UNBALANCED_DELIMITER"));

  EmittedFiles duplicated = good;
  duplicated["Extra.slimp"] = "func CoordX(arg_1: Point) : Real {\n  pre_check(\"Point:CoordX\", arg_1)\n"
                              "  return post_check(\"Point:CoordX\", 0.0, arg_1)\n}\n";
  CHECK(has_code(validate_emitted(duplicated), "DUPLICATE_FUNCTION"));

  EmittedFiles no_main = good;
  no_main.erase("main.slimp");
  CHECK(has_code(validate_emitted(no_main), "MISSING_MAIN"));
}

TEST_CASE("validate_emitted: hand edits that keep the hooks pass") {
  std::map<std::string, std::string> files;
  for (const auto& name : {"Bank.slimp", "CTransaction.slimp", "Transaction.slimp", "main.slimp"}) {
    files[name] = read_text(source_path(std::string("tests/fixtures/banks_signbug/") + name));
  }
  CHECK(validate_emitted(files).empty());

  Spec spec = load_files({"specs/point.slam"});
  EmittedFiles edited = emit_program(spec);
  edited["Point.slimp"] = replace_once(edited["Point.slimp"], "return post_check(\"Point:CoordX\", x, arg_1)",
                                       "var copy := x\n    return post_check(\"Point:CoordX\", copy, arg_1)");
  CHECK(validate_emitted(edited).empty());
}

TEST_CASE("behavioral agreement: point and segment") {
  Spec spec = load_files({"specs/point.slam", "specs/segment.slam"});
  REQUIRE(spec.ok());
  check_agreement(spec, {"Cartesian(3, 4).CoordX()", "Cartesian(3, 4).CoordY()",
                         "Distance(Cartesian(0, 0), Cartesian(3, 4))", "Cartesian(3, 4).MoveLeft(1.5)",
                         "Cartesian(1, 2, Red()).CoordX()", "Cartesian(1, 2, Blue()).Hue()",
                         "PointAt(2, 5)"});
}

TEST_CASE("behavioral agreement: stack") {
  Spec spec = load_files({"specs/stack.slam"});
  REQUIRE(spec.ok());
  check_agreement(spec, {"EmptyStack()", "EmptyStack().Push(1).Push(2).Top()", "EmptyStack().Push(1).Push(2).Pop()",
                         "EmptyStack().Push(3).Push(4).Size()", "EmptyStack().IsEmpty()"});
}

TEST_CASE("behavioral agreement: random trees") {
  Spec spec = load_files({"specs/tree.slam"});
  REQUIRE(spec.ok());
  ValueGen gen(3);
  std::vector<std::string> exprs;
  for (int i = 0; i < 15; ++i) {
    std::string t = random_tree(gen, 4);
    for (const auto& call : {".Size()", ".Height()", ".Elements()", ".Mirror()", ".Contains(7)"}) exprs.push_back(t + call);
  }
  check_agreement(spec, exprs);
}

TEST_CASE("behavioral agreement: random bank batches") {
  Spec spec = load_files({"specs/banks.slam"});
  REQUIRE(spec.ok());
  ValueGen gen(4);
  std::vector<std::string> exprs;
  for (int i = 0; i < 15; ++i) {
    std::string trans = "[";
    for (std::size_t k = 0, n = gen.pick(5); k < n; ++k) {
      trans += (k ? ", " : "") + std::string("tran(\"") + static_cast<char>('A' + gen.pick(3)) + "\", \"" +
               static_cast<char>('A' + gen.pick(3)) + "\", " + std::to_string(gen.pick(100)) + ".5)";
    }
    trans += "]";
    exprs.push_back("FinalAmount(" + trans + R"(, ["A", "B", "C"]))");
  }
  check_agreement(spec, exprs);
}
