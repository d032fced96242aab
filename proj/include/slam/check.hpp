#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slam/builtins.hpp"
#include "slam/pipeline.hpp"
#include "slam/serializer.hpp"
#include "json.hpp"

namespace slam {

enum class CheckKind { Pre, Post };
enum class Verdict { Pass, Fail, Error };
enum class Policy { Abort, Report };

std::string_view check_kind_name(CheckKind k);
std::string_view verdict_name(Verdict v);
CheckKind parse_check_kind(std::string_view s);  // throws Error("BAD_FLAG")
Policy parse_policy(std::string_view s);         // throws Error("BAD_FLAG")

struct CheckRequest {
  std::string cls;    // class named in `C:f`
  std::string fname;
  CheckKind kind = CheckKind::Pre;
  ValueList args;
  std::optional<Value> result;  // post only

  std::string function() const { return cls + ":" + fname; }
};

/// Where a failing condition first goes wrong: the innermost false
/// conjunct, descending through `and`, `forall` elements and the
/// consequent of `implies`.
struct FailureLocus {
  std::string path;     // e.g. "post / and[2] / forall i=2 / and[2]"
  std::string formula;  // printed sub-formula
  SourceSpan span;
  bool operator==(const FailureLocus&) const = default;
};

struct CheckRecord {
  std::string function;  // C:f
  CheckKind kind = CheckKind::Pre;
  Verdict verdict = Verdict::Pass;
  CheckModeKind annotation = CheckModeKind::Full;
  double elapsed_ms = 0;
  /// The verdict covers only the checked part of the condition.
  bool partial() const { return annotation != CheckModeKind::Full; }
  // failures only
  std::vector<std::pair<std::string, Value>> bindings;
  std::optional<FailureLocus> locus;
  // errors only
  std::string error_code;
  std::string error_message;
};

nlohmann::json record_to_json(const CheckRecord& r);
/// Inverse of record_to_json; binding values travel as wire text.
CheckRecord record_from_json(const nlohmann::json& j);

/// Thread-safe accumulator for check records.
class ReportCollector {
 public:
  void add(CheckRecord r);
  std::vector<CheckRecord> records() const;

 private:
  mutable std::mutex mu_;
  std::vector<CheckRecord> records_;
};

/// Human summary, e.g. "3 checks: 2 pass, 1 fail, 0 error", one line per
/// record, failure details, and the partial checks listed.
std::string report_text(const std::vector<CheckRecord>& records);
nlohmann::json report_json(const std::vector<CheckRecord>& records);

/// 0 all pass, 1 some fail, 3 some error (errors win over failures).
int exit_status(const std::vector<CheckRecord>& records);
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitAborted = 2;
inline constexpr int kExitError = 3;

/// Raised by post_return_check / pre gates when policy=abort and a check
/// failed. The record has already been collected.
class PolicyAbort : public std::exception {
 public:
  explicit PolicyAbort(CheckRecord r) : record_(std::move(r)) {}
  const char* what() const noexcept override { return "check failed, aborted by policy"; }
  const CheckRecord& record() const { return record_; }

 private:
  CheckRecord record_;
};

/// Pre/post checks of single calls against a loaded specification. The
/// verdict comes from solving `pre-f` / `post-f` in the logic program, fed
/// through the wire-reading entry clauses; the failure locus is computed by
/// re-evaluating the checked part of the first applicable rule.
class CheckRuntime {
 public:
  CheckRuntime(const Spec& spec, Limits limits = {});

  /// Validates `C:f`, arity and argument/result types. Throws Error
  /// (UNKNOWN_FUNCTION, ARITY_MISMATCH, WRONG_CLASS, UNKNOWN_TAG, ...).
  CheckRequest make_request(std::string_view function, CheckKind kind, const ValueList& wire_values) const;

  CheckRecord pre_check(const CheckRequest& req);
  CheckRecord post_check(const CheckRequest& req);
  /// Runs post_check and hands back the result unchanged; with
  /// Policy::Abort a failing verdict throws PolicyAbort.
  Value post_return_check(const CheckRequest& req, Policy policy);

  /// Dispatches on req.kind.
  CheckRecord check(const CheckRequest& req);

  ReportCollector& collector() { return collector_; }

 private:
  CheckRecord run(const CheckRequest& req);

  const Spec& spec_;
  Limits limits_;
  ReportCollector collector_;
};

/// check-call: reads a `.slamx` document and checks it. Throws Error for
/// wire and request errors; FINGERPRINT_MISMATCH when the document was
/// written for a different spec.
CheckRecord check_document(CheckRuntime& runtime, const Spec& spec, std::string_view function, CheckKind kind,
                           std::string_view document);

}  // namespace slam
