#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "slam/check.hpp"
#include "slam/codegen.hpp"
#include "slam/hooks.hpp"
#include "slam/parser.hpp"
#include "slam/pipeline.hpp"
#include "slam/serializer.hpp"
#include "slam/slimp.hpp"

namespace fs = std::filesystem;
using namespace slam;

namespace {

struct Flags {
  std::string report;
  std::string policy = "abort";
  std::string limits;
  bool trace = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO_ERROR", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_spec_file(const std::string& path) { return fs::path(path).extension() == ".slam"; }

void write_report(const Flags& flags, const std::vector<CheckRecord>& records) {
  if (flags.report.empty()) return;
  std::ofstream out(flags.report);
  out << report_json(records).dump(2) << "\n";
  if (!out) throw Error("IO_ERROR", "cannot write report " + flags.report);
}

// Loads the spec, printing diagnostics to stderr. Null on errors.
std::optional<Spec> load(const std::vector<std::string>& files) {
  Spec spec = load_spec(files);
  std::cerr << format_diagnostics(spec.diags);
  if (!spec.ok()) return std::nullopt;
  return spec;
}

int cmd_parse(const std::vector<std::string>& files) {
  std::string source;
  bool ok = true;
  for (const auto& f : files) {
    auto parsed = parse_spec(read_file(f), f);
    std::cerr << format_diagnostics(parsed.diags);
    if (has_errors(parsed.diags)) ok = false;
    else std::cout << pretty_print(parsed.defs);
  }
  return ok ? 0 : 1;
}

int cmd_check(const std::vector<std::string>& files) {
  auto spec = load(files);
  if (!spec) return 1;
  std::cout << "ok: " << spec->hierarchy->classes.size() << " classes, " << spec->hierarchy->functions.size()
            << " functions, spec " << spec->fingerprint << "\n";
  return 0;
}

int cmd_translate(const std::vector<std::string>& files) {
  auto spec = load(files);
  if (!spec) return 1;
  std::cout << dump(*spec->program);
  return 0;
}

int cmd_eval(const std::vector<std::string>& args, const std::string& format, const Flags& flags) {
  std::vector<std::string> files;
  std::vector<std::string> exprs;
  for (const auto& a : args) (is_spec_file(a) ? files : exprs).push_back(a);
  if (exprs.size() != 1) throw Error("BAD_FLAG", "eval takes spec files and exactly one expression");
  auto spec = load(files);
  if (!spec) return 1;
  Limits limits = flags.limits.empty() ? Limits{} : parse_limits(flags.limits);
  Value v = evaluate(*spec, exprs[0], limits, flags.trace ? &std::cerr : nullptr);
  std::cout << (format == "text" ? to_text(v) : serialize(v)) << "\n";
  return 0;
}

int cmd_gen(const std::vector<std::string>& files, const std::string& out_dir) {
  auto spec = load(files);
  if (!spec) return 1;
  EmittedFiles emitted = emit_program(*spec);
  fs::create_directories(out_dir);
  for (const auto& [name, text] : emitted) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    out << text;
    if (!out) throw Error("IO_ERROR", "cannot write " + (fs::path(out_dir) / name).string());
    std::cout << (fs::path(out_dir) / name).string() << "\n";
  }
  Diagnostics problems = validate_emitted(emitted);
  std::cerr << format_diagnostics(problems);
  return has_errors(problems) ? 1 : 0;
}

bool is_dir(const std::string& p) {
  std::error_code ec;  // an entry expression can exceed the path length limit
  return fs::is_directory(p, ec);
}

std::vector<std::pair<std::string, std::string>> program_sources(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const auto& p : paths) {
    if (is_dir(p)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.path().extension() == ".slimp") found.push_back(entry.path().string());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& f : files) sources.emplace_back(f, read_file(f));
  return sources;
}

int cmd_run(const std::vector<std::string>& args, const std::string& hooks_text, const Flags& flags) {
  std::vector<std::string> spec_files;
  std::vector<std::string> program_paths;
  std::vector<std::string> rest;
  for (const auto& a : args) {
    if (is_spec_file(a)) spec_files.push_back(fs::absolute(a).string());
    else if (fs::path(a).extension() == ".slimp" || is_dir(a)) program_paths.push_back(a);
    else rest.push_back(a);
  }
  if (program_paths.empty() || rest.size() != 1) {
    throw Error("BAD_FLAG", "run takes spec files, a program directory or .slimp files, and one entry expression");
  }
  HookMode mode = parse_hook_mode(hooks_text);
  Policy policy = parse_policy(flags.policy);
  Limits limits = flags.limits.empty() ? Limits{} : parse_limits(flags.limits);
  auto spec = load(spec_files);
  if (!spec) return 1;
  auto parsed = parse_slimp(program_sources(program_paths));
  std::cerr << format_diagnostics(parsed.diags);
  if (!parsed.ok()) return 1;
  ExprPtr entry = parse_query(*spec, rest[0]);

  CheckRuntime runtime(*spec, limits);
  std::unique_ptr<HookSink> hooks;
  if (mode == HookMode::Inproc) hooks = std::make_unique<InprocHooks>(runtime, policy);
  if (mode == HookMode::Spawn) {
    hooks = std::make_unique<SpawnHooks>(*spec, spec_files, self_executable(), policy, runtime.collector(),
                                         flags.limits);
  }
  SlimpInterpreter interp(parsed.program, spec->hierarchy, hooks.get(), limits);
  int status = 0;
  auto started = std::chrono::steady_clock::now();
  try {
    interp.run_main(std::cout, entry);
  } catch (const PolicyAbort& abort) {
    std::cerr << "aborted: " << abort.record().function << " " << check_kind_name(abort.record().kind)
              << " check failed\n";
    status = kExitAborted;
  } catch (const Error& e) {
    std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
    status = kExitError;
  }
  std::cout.flush();
  double elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  auto records = runtime.collector().records();
  std::cerr << report_text(records);
  std::cerr << "run: " << elapsed << " ms, " << interp.calls() << " calls, hooks " << hooks_text << "\n";
  write_report(flags, records);
  return status != 0 ? status : exit_status(records);
}

int cmd_check_call(const std::vector<std::string>& spec_files, const std::string& function, const std::string& kind_text,
                   const std::string& file, const Flags& flags) {
  CheckKind kind = parse_check_kind(kind_text);
  auto spec = load(spec_files);
  if (!spec) return kExitError;
  Limits limits = flags.limits.empty() ? Limits{} : parse_limits(flags.limits);
  CheckRuntime runtime(*spec, limits);
  CheckRecord rec;
  try {
    rec = check_document(runtime, *spec, function, kind, read_file(file));
  } catch (const Error& e) {
    rec.function = function;
    rec.kind = kind;
    rec.verdict = Verdict::Error;
    rec.error_code = e.code();
    rec.error_message = e.what();
    runtime.collector().add(rec);
  }
  auto records = runtime.collector().records();
  std::cout << report_text(records);
  write_report(flags, records);
  return exit_status(records);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slamc: specification checker, translator and skeleton runner"};
  app.require_subcommand(1);
  app.allow_extras();
  Flags flags;
  app.add_option("--report", flags.report, "write the check report as JSON to this path");
  app.add_option("--policy", flags.policy, "on a failing check: abort (exit 2) or report")
      ->check(CLI::IsMember({"abort", "report"}));
  app.add_option("--limits", flags.limits, "depth=N,enum=N,timeout=SECONDS");
  app.add_flag("--trace", flags.trace, "print the engine trace to stderr");

  std::vector<std::string> files;
  auto* parse = app.add_subcommand("parse", "parse spec files and pretty-print them")->fallthrough();
  parse->add_option("files", files, "spec files")->required();
  auto* check = app.add_subcommand("check", "parse and check spec files")->fallthrough();
  check->add_option("files", files, "spec files")->required();
  auto* translate = app.add_subcommand("translate", "dump the logic program")->fallthrough();
  translate->add_option("files", files, "spec files")->required();

  std::string format = "wire";
  auto* eval = app.add_subcommand("eval", "evaluate an expression through the logic engine")->fallthrough();
  // positional arguments are taken raw: CLI11 would split a bracketed list literal
  eval->allow_extras();
  eval->add_option("--format", format, "wire or text")->check(CLI::IsMember({"wire", "text"}));

  std::string out_dir = "out";
  auto* gen = app.add_subcommand("gen", "emit .slimp skeletons")->fallthrough();
  gen->add_option("files", files, "spec files")->required();
  gen->add_option("-o,--out", out_dir, "output directory");

  std::string hooks = "spawn";
  auto* run = app.add_subcommand("run", "run a skeleton with live checks")->fallthrough();
  run->allow_extras();
  run->add_option("--hooks", hooks, "spawn, inproc or off")->check(CLI::IsMember({"spawn", "inproc", "off"}));

  std::string function;
  std::string kind;
  std::string file;
  auto* check_call = app.add_subcommand("check-call", "check one call stored in a .slamx file")->fallthrough();
  check_call->add_option("--spec", files, "spec files")->required();
  check_call->add_option("--fn", function, "Class:function")->required();
  check_call->add_option("--kind", kind, "pre or post")->required()->check(CLI::IsMember({"pre", "post"}));
  check_call->add_option("--file", file, ".slamx document")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    std::vector<std::string> rest = app.remaining(true);
    for (const auto& r : rest) {
      if (r.rfind("--", 0) == 0) throw Error("BAD_FLAG", "unknown flag " + r);
    }
    if (!rest.empty() && !*eval && !*run) throw Error("BAD_FLAG", "unexpected argument " + rest.front());
    if (*parse) return cmd_parse(files);
    if (*check) return cmd_check(files);
    if (*translate) return cmd_translate(files);
    if (*eval) return cmd_eval(rest, format, flags);
    if (*gen) return cmd_gen(files, out_dir);
    if (*run) return cmd_run(rest, hooks, flags);
    if (*check_call) return cmd_check_call(files, function, kind, file, flags);
  } catch (const Error& e) {
    std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
    bool engine = e.code() == "DEPTH_LIMIT" || e.code() == "ENUMERATION_LIMIT" || e.code() == "TIMEOUT" ||
                  e.code() == "MALFORMED_WIRE" || e.code() == "IO_ERROR" || e.code() == "BAD_FLAG" ||
                  e.code() == "BAD_LIMITS";
    return engine ? kExitError : kExitFail;
  }
  return 0;
}
