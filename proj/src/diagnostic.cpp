#include "slam/diagnostic.hpp"

#include <algorithm>

namespace slam {

std::string SourceSpan::to_string() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  out += ':' + std::to_string(line) + ':' + std::to_string(column);
  return out;
}

std::string Diagnostic::to_string() const {
  std::string out = span.to_string();
  out += severity == Severity::Error ? ": error[" : ": warning[";
  out += code + "]: " + message;
  return out;
}

bool has_errors(const Diagnostics& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

Diagnostic make_error(std::string code, SourceSpan span, std::string message) {
  return Diagnostic{Severity::Error, std::move(span), std::move(message), std::move(code)};
}

Diagnostic make_warning(std::string code, SourceSpan span, std::string message) {
  return Diagnostic{Severity::Warning, std::move(span), std::move(message), std::move(code)};
}

}  // namespace slam
