#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "slam/ast.hpp"
#include "slam/diagnostic.hpp"

namespace slam {

struct SpecParseResult {
  std::vector<ClassDef> defs;  // empty whenever diags holds an error
  Diagnostics diags;

  bool ok() const { return !has_errors(diags); }
};

struct ExprParseResult {
  ExprPtr expr;  // null whenever diags holds an error
  Diagnostics diags;

  bool ok() const { return !has_errors(diags); }
};

/// Parses specification text (`.slam`).
///
/// The grammar, informally:
///
///     class Name[(Param, ...)] [extends Parent, ...] {
///       case Tag(Type, label: Type, ...)
///       label [tag] : Type
///       constructor f(Type, ...)        observer f(Type, ...) : Type
///       modifier f(Type, ...)           friend f(Type, ...) : Type
///       traverse Pattern => [expr, ...]
///       rule { pre: Cond  call: Scheme  post: Cond  sol: Expr }
///     }
///
/// where `Cond` is `[check] expr`, `and_check expr :: expr` or
/// `either_check expr :: expr`, and `Scheme` is `f(p, ...)` or
/// `p.f(p, ...)`. Quantifiers read `Q x in D | filter . body`; the separating
/// dot must be preceded by whitespace (an attached dot is member access).
///
/// Names are left unresolved: `f(x)` is a Call even when `f` later turns out
/// to be a constructor tag or a sequence variable. Resolution happens when
/// the class hierarchy is built.
SpecParseResult parse_spec(std::string_view source, const std::string& file = "");

ExprParseResult parse_expr(std::string_view source, const std::string& file = "");

/// Canonical text for a list of classes; `parse_spec(pretty_print(d))`
/// reproduces `d` up to source spans.
std::string pretty_print(const std::vector<ClassDef>& defs);

std::string print_expr(const ExprPtr& e);
std::string print_pattern(const Pattern& p);
std::string print_condition(const Condition& c);

}  // namespace slam
