#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace slam {

/// Location of a construct in a source text. Positions are 1-based.
struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 0;

  std::string to_string() const;
  bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string message;
  std::string code;

  std::string to_string() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);

Diagnostic make_error(std::string code, SourceSpan span, std::string message);
Diagnostic make_warning(std::string code, SourceSpan span, std::string message);

/// Base exception for runtime failures that carry a stable code
/// (engine resource limits, wire format errors, evaluation errors).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace slam
