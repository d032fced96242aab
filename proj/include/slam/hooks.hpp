#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slam/check.hpp"
#include "slam/slimp.hpp"

namespace slam {

/// How a running skeleton reaches the checker: `spawn` runs `slamc
/// check-call` per hook with a `.slamx` temp file, `inproc` calls the
/// check runtime directly, `off` strips the hooks.
enum class HookMode { Spawn, Inproc, Off };

/// Throws Error("BAD_FLAG").
HookMode parse_hook_mode(std::string_view text);

/// Applies the policy to a collected record: a failing pre or post check
/// throws PolicyAbort under Policy::Abort.
void enforce(const CheckRecord& record, Policy policy);

class InprocHooks : public HookSink {
 public:
  InprocHooks(CheckRuntime& runtime, Policy policy) : runtime_(runtime), policy_(policy) {}

  void pre(const std::string& function, const ValueList& args) override;
  Value post(const std::string& function, const Value& result, const ValueList& args) override;

 private:
  CheckRecord run(const std::string& function, CheckKind kind, ValueList values);

  CheckRuntime& runtime_;
  Policy policy_;
};

class SpawnHooks : public HookSink {
 public:
  /// `slamc` is the executable to spawn; `spec_files` are handed to it.
  SpawnHooks(const Spec& spec, std::vector<std::string> spec_files, std::string slamc, Policy policy,
             ReportCollector& collector, std::string limits_flag = {});
  ~SpawnHooks() override;
  SpawnHooks(const SpawnHooks&) = delete;
  SpawnHooks& operator=(const SpawnHooks&) = delete;

  void pre(const std::string& function, const ValueList& args) override;
  Value post(const std::string& function, const Value& result, const ValueList& args) override;

 private:
  CheckRecord run(const std::string& function, CheckKind kind, const ValueList& values);

  const Spec& spec_;
  std::vector<std::string> spec_files_;
  std::string slamc_;
  Policy policy_;
  ReportCollector& collector_;
  std::string limits_flag_;
  std::filesystem::path dir_;
  std::size_t counter_ = 0;
};

/// Path of the running executable.
std::string self_executable();

}  // namespace slam
