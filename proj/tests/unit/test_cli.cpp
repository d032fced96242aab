#include "doctest.h"
#include "json.hpp"
#include "slam/serializer.hpp"
#include "support.hpp"

using namespace slam;
using namespace slam::testing;

namespace {

std::string spec(const std::string& name) { return source_path("specs/" + name); }

const std::string kBankCall = R"(FinalAmount([tran("A", "B", 10)], ["A", "B"]))";

std::string generated_banks() {
  static const std::string dir = [] {
    auto out = fresh_dir("cli-banks");
    auto r = run_slamc({"gen", spec("banks.slam"), "-o", out.string()});
    REQUIRE(r.status == 0);
    return out.string();
  }();
  return dir;
}

}  // namespace

TEST_CASE("cli: translate") {
  auto point = run_slamc({"translate", spec("point.slam")});
  CHECK(point.status == 0);
  CHECK(point.out.find("'sol-CoordX'(PointCartesian(X, Y), Result) :- Result = X.") != std::string::npos);
  CHECK(point.out == read_text(source_path("tests/golden/point.dump")));

  auto banks = run_slamc({"translate", spec("banks.slam")});
  CHECK(banks.status == 0);
  CHECK(banks.out.find("'quan-sum'(") != std::string::npos);

  auto dir = fresh_dir("cli-bad");
  std::ofstream(dir / "bad.slam") << "class Broken {\n  case A(\n}\n";
  auto bad = run_slamc({"translate", (dir / "bad.slam").string()});
  CHECK(bad.status == 1);
  CHECK(bad.err.find("error[") != std::string::npos);
}

TEST_CASE("cli: parse and check") {
  auto parsed = run_slamc({"parse", spec("tree.slam")});
  CHECK(parsed.status == 0);
  CHECK(parsed.out.find("class Tree(Elem)") != std::string::npos);
  auto checked = run_slamc({"check", spec("point.slam")});
  CHECK(checked.status == 0);
  CHECK(checked.out.rfind("ok: ", 0) == 0);
  auto missing = run_slamc({"check", spec("nothing.slam")});
  CHECK(missing.status == 1);
  CHECK(missing.err.find("IO_ERROR") != std::string::npos);
}

TEST_CASE("cli: eval") {
  auto sum = run_slamc({"eval", spec("tree.slam"), "sum i in 1..4 | true . i"});
  CHECK(sum.status == 0);
  CHECK(sum.out == "<v k=\"int\">10</v>\n");

  auto banks = run_slamc({"eval", "--format", "text", spec("banks.slam"), kBankCall});
  CHECK(banks.status == 0);
  CHECK(banks.out == "[Bankbank({name: \"A\", amount: 10.0}), Bankbank({name: \"B\", amount: -10.0})]\n");

  auto wire = run_slamc({"eval", spec("banks.slam"), kBankCall});
  CHECK(wire.status == 0);
  Value v = read_value(wire.out.substr(0, wire.out.size() - 1));
  CHECK(v.items().size() == 2);

  auto partial = run_slamc({"eval", spec("point.slam"), "CoordX(Polar(1, 1))"});
  CHECK(partial.status == 1);
  CHECK(partial.err.find("NO_APPLICABLE_RULE") != std::string::npos);

  auto list = run_slamc({"eval", "--format", "text", spec("tree.slam"), "[1, 2]"});
  CHECK(list.status == 0);
  CHECK(list.out == "[1, 2]\n");
}

TEST_CASE("cli: trace and limits flags") {
  auto traced = run_slamc({"--trace", "eval", spec("point.slam"), "Cartesian(7, 9).CoordX()"});
  CHECK(traced.status == 0);
  CHECK(traced.err == "ENTER sol-CoordX/2 depth=1\nEXIT sol-CoordX/2 depth=1\n");

  auto limited = run_slamc({"--limits", "enum=5", "eval", spec("tree.slam"), "sum i in 1..100 . i"});
  CHECK(limited.status == 3);
  CHECK(limited.err.find("ENUMERATION_LIMIT") != std::string::npos);

  CHECK(run_slamc({"--limits", "depth=x", "eval", spec("tree.slam"), "1"}).status == 3);
  CHECK(run_slamc({"--policy", "maybe", "check", spec("tree.slam")}).status == 3);
  CHECK(run_slamc({"frobnicate"}).status == 3);
}

TEST_CASE("cli: gen writes valid skeletons") {
  auto out = fresh_dir("cli-gen");
  auto r = run_slamc({"gen", spec("point.slam"), "-o", out.string()});
  CHECK(r.status == 0);
  for (const auto& name : {"Point.slimp", "ColouredPoint.slimp", "Colour.slimp", "main.slimp"}) {
    CHECK_MESSAGE(std::filesystem::exists(out / name), name);
  }
}

TEST_CASE("cli: run the bank skeleton") {
  auto dir = fresh_dir("cli-report");
  auto report = (dir / "report.json").string();
  auto ok = run_slamc({"--report", report, "run", spec("banks.slam"), generated_banks(), kBankCall});
  CHECK(ok.status == 0);
  CHECK(ok.out == "[Bankbank({name: \"A\", amount: 10.0}), Bankbank({name: \"B\", amount: -10.0})]\n");
  auto doc = nlohmann::json::parse(read_text(report));
  CHECK(doc["summary"]["fail"] == 0);
  CHECK(doc["summary"]["exit_status"] == 0);
  CHECK(doc["summary"]["checks"].get<int>() >= 2);

  auto inproc = run_slamc({"run", "--hooks", "inproc", spec("banks.slam"), generated_banks(), kBankCall});
  CHECK(inproc.status == 0);
  CHECK(inproc.out == ok.out);
}

TEST_CASE("cli: run the sign-bug skeleton") {
  std::string bug = source_path("tests/fixtures/banks_signbug");
  auto aborted = run_slamc({"run", spec("banks.slam"), bug, kBankCall});
  CHECK(aborted.status == 2);
  CHECK(aborted.err.find("path: post / and[2] / forall i=2 / and[2]") != std::string::npos);

  auto reported = run_slamc({"--policy", "report", "run", spec("banks.slam"), bug, kBankCall});
  CHECK(reported.status == 1);
  CHECK(reported.out == "[Bankbank({name: \"A\", amount: 10.0}), Bankbank({name: \"B\", amount: 10.0})]\n");
}

TEST_CASE("cli: a failing precondition stops the run before the body") {
  std::string call = R"(FinalAmount([tran("A", "B", 10)], []))";
  auto aborted = run_slamc({"run", spec("banks.slam"), generated_banks(), call});
  CHECK(aborted.status == 2);
  CHECK(aborted.out.empty());
  CHECK(aborted.err.find("1 check: 0 pass, 1 fail") != std::string::npos);
  CHECK(aborted.err.find("FinalAmount pre") != std::string::npos);
}

TEST_CASE("cli: check-call") {
  auto dir = fresh_dir("cli-check-call");
  Spec banks = load_files({"specs/banks.slam"});
  REQUIRE(banks.ok());
  Value ctrans = Value::con("CTransactionctran", {evaluate_direct(banks, R"([tran("A", "B", 10)])")});
  Value names = evaluate_direct(banks, R"(["A", "B"])");
  Value good = evaluate_direct(banks, kBankCall);
  Value bad = evaluate_direct(banks, R"([MakeBank("A", 10), MakeBank("B", 10)])");

  auto write = [&](const std::string& name, const WireDoc& doc) {
    auto path = (dir / name).string();
    std::ofstream(path) << write_doc(doc);
    return path;
  };
  auto call = [&](const std::string& kind, const std::string& file) {
    return run_slamc({"check-call", "--spec", spec("banks.slam"), "--fn", "CTransaction:FinalAmount", "--kind", kind,
                      "--file", file});
  };
  CHECK(call("post", write("pass.slamx", {banks.fingerprint, {ctrans, names, good}})).status == 0);
  CHECK(call("post", write("fail.slamx", {banks.fingerprint, {ctrans, names, bad}})).status == 1);
  CHECK(call("pre", write("pre.slamx", {banks.fingerprint, {ctrans, names}})).status == 0);
  auto mismatch = call("pre", write("other.slamx", {"0123456789abcdef", {ctrans, names}}));
  CHECK(mismatch.status == 3);
  CHECK(mismatch.out.find("FINGERPRINT_MISMATCH") != std::string::npos);
  std::ofstream(dir / "torn.slamx") << "<slamx version=\"1\"";
  CHECK(call("pre", (dir / "torn.slamx").string()).status == 3);
}

TEST_CASE("cli: identical inputs give identical output") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"translate", spec("banks.slam")},
           {"eval", spec("banks.slam"), kBankCall},
           {"parse", spec("point.slam")},
           {"eval", spec("point.slam"), "CoordX(Polar(1, 1))"}}) {
    auto first = run_slamc(args);
    auto second = run_slamc(args);
    CHECK(first.status == second.status);
    CHECK(first.out == second.out);
  }
}

TEST_CASE("cli: run accepts an entry expression longer than a path") {
  std::string call = "FinalAmount([";
  for (int i = 0; i < 30; ++i) call += (i ? ", " : "") + std::string("tran(\"A\", \"B\", ") + std::to_string(i) + ")";
  call += R"(], ["A", "B"]))";
  auto r = run_slamc({"run", "--hooks", "off", spec("banks.slam"), generated_banks(), call});
  CHECK(r.status == 0);
  CHECK(r.out.rfind("[Bankbank({name: \"A\", amount: 435.0})", 0) == 0);
}
