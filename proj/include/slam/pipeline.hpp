#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "slam/builtins.hpp"
#include "slam/logic_ir.hpp"
#include "slam/semantics.hpp"

namespace slam {

/// A checked and translated specification.
struct Spec {
  std::vector<ClassDef> defs;
  std::shared_ptr<const ClassHierarchy> hierarchy;  // null on error
  std::shared_ptr<const LogicProgram> program;      // null on error
  std::string fingerprint;                          // 16 hex digits
  Diagnostics diags;

  bool ok() const { return program != nullptr; }
};

/// Parses, analyzes and translates the concatenation of several spec files.
/// Unreadable files are reported as `IO_ERROR` diagnostics.
Spec load_spec(const std::vector<std::string>& paths);
Spec load_spec_source(std::string_view source, const std::string& file = "<input>");

/// Evaluates a free-standing expression through the logic engine. A
/// top-level call of a spec function has its arguments coerced to the
/// declared parameter types first, so `FinalAmount([tran(..)], [..])` may
/// pass a bare sequence for a single-component class.
///
/// Throws Error: `PARSE`/`RESOLVE` for bad input, `NO_APPLICABLE_RULE` when
/// the query has no solution, and whatever the engine raises.
Value evaluate(const Spec& spec, std::string_view expr_text, const Limits& limits = {},
               std::ostream* trace = nullptr);

/// Same contract, computed by the direct evaluator instead of the engine.
Value evaluate_direct(const Spec& spec, std::string_view expr_text, const Limits& limits = {});

/// Parses and resolves a free-standing expression; throws Error.
ExprPtr parse_query(const Spec& spec, std::string_view expr_text);

std::string format_diagnostics(const Diagnostics& diags);

}  // namespace slam
