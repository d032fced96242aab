#include "slam/hooks.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "slam/serializer.hpp"

extern char** environ;

namespace slam {

HookMode parse_hook_mode(std::string_view text) {
  if (text == "spawn") return HookMode::Spawn;
  if (text == "inproc") return HookMode::Inproc;
  if (text == "off") return HookMode::Off;
  throw Error("BAD_FLAG", "hooks must be spawn, inproc or off, got '" + std::string(text) + "'");
}

void enforce(const CheckRecord& record, Policy policy) {
  if (record.verdict == Verdict::Fail && policy == Policy::Abort) throw PolicyAbort(record);
}

CheckRecord InprocHooks::run(const std::string& function, CheckKind kind, ValueList values) {
  CheckRecord rec;
  try {
    return runtime_.check(runtime_.make_request(function, kind, values));
  } catch (const Error& e) {
    rec.function = function;
    rec.kind = kind;
    rec.verdict = Verdict::Error;
    rec.error_code = e.code();
    rec.error_message = e.what();
  }
  runtime_.collector().add(rec);
  return rec;
}

void InprocHooks::pre(const std::string& function, const ValueList& args) {
  enforce(run(function, CheckKind::Pre, args), policy_);
}

Value InprocHooks::post(const std::string& function, const Value& result, const ValueList& args) {
  ValueList values = args;
  values.push_back(result);
  enforce(run(function, CheckKind::Post, std::move(values)), policy_);
  return result;
}

SpawnHooks::SpawnHooks(const Spec& spec, std::vector<std::string> spec_files, std::string slamc, Policy policy,
                       ReportCollector& collector, std::string limits_flag)
    : spec_(spec),
      spec_files_(std::move(spec_files)),
      slamc_(std::move(slamc)),
      policy_(policy),
      collector_(collector),
      limits_flag_(std::move(limits_flag)) {
  std::string pattern = (std::filesystem::temp_directory_path() / "slamc-hooks-XXXXXX").string();
  if (!mkdtemp(pattern.data())) throw Error("IO_ERROR", "cannot create temp directory: " + std::string(std::strerror(errno)));
  dir_ = pattern;
}

SpawnHooks::~SpawnHooks() {
  std::error_code ignored;
  std::filesystem::remove_all(dir_, ignored);
}

namespace {

int spawn_and_wait(const std::vector<std::string>& argv) {
  std::vector<char*> raw;
  for (const auto& a : argv) raw.push_back(const_cast<char*>(a.c_str()));
  raw.push_back(nullptr);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
  pid_t pid = 0;
  int rc = posix_spawn(&pid, raw[0], &actions, nullptr, raw.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw Error("SPAWN_FAILED", "cannot run " + argv[0] + ": " + std::strerror(rc));
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw Error("SPAWN_FAILED", std::strerror(errno));
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

CheckRecord SpawnHooks::run(const std::string& function, CheckKind kind, const ValueList& values) {
  std::string stem = "call" + std::to_string(++counter_);
  auto doc_path = dir_ / (stem + ".slamx");
  auto report_path = dir_ / (stem + ".json");
  {
    std::ofstream out(doc_path, std::ios::binary);
    out << write_doc({spec_.fingerprint, values});
    if (!out) throw Error("IO_ERROR", "cannot write " + doc_path.string());
  }
  std::vector<std::string> argv{slamc_, "check-call"};
  for (const auto& f : spec_files_) {
    argv.push_back("--spec");
    argv.push_back(f);
  }
  argv.insert(argv.end(), {"--fn", function, "--kind", std::string(check_kind_name(kind)), "--file",
                           doc_path.string(), "--report", report_path.string()});
  if (!limits_flag_.empty()) argv.insert(argv.end(), {"--limits", limits_flag_});
  int status = spawn_and_wait(argv);

  CheckRecord rec;
  std::ifstream in(report_path);
  if (in) {
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (!doc.is_discarded() && doc.contains("records") && doc["records"].size() == 1) {
      rec = record_from_json(doc["records"][0]);
    } else {
      in.close();
      in.setstate(std::ios::failbit);
    }
  }
  if (!in) {
    rec.function = function;
    rec.kind = kind;
    rec.verdict = Verdict::Error;
    rec.error_code = "CHECK_CALL_FAILED";
    rec.error_message = "check-call exited with status " + std::to_string(status) + " and no report";
  }
  std::error_code ignored;
  std::filesystem::remove(doc_path, ignored);
  std::filesystem::remove(report_path, ignored);
  collector_.add(rec);
  return rec;
}

void SpawnHooks::pre(const std::string& function, const ValueList& args) {
  enforce(run(function, CheckKind::Pre, args), policy_);
}

Value SpawnHooks::post(const std::string& function, const Value& result, const ValueList& args) {
  ValueList values = args;
  values.push_back(result);
  enforce(run(function, CheckKind::Post, values), policy_);
  return result;
}

std::string self_executable() {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (ec) throw Error("IO_ERROR", "cannot locate the running executable");
  return p.string();
}

}  // namespace slam
