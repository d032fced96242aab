#pragma once

// Entry points into the expression parser for the skeleton-language parser.
// Not part of the public interface.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexer.hpp"
#include "slam/ast.hpp"

namespace slam::detail {

const std::set<std::string>& expression_keywords();

/// Parses one expression starting at `pos`; advances `pos`. Returns null
/// after recording a diagnostic.
ExprPtr parse_expr_at(const std::vector<Token>& tokens, std::size_t& pos, Diagnostics& diags);
std::optional<Pattern> parse_pattern_at(const std::vector<Token>& tokens, std::size_t& pos, Diagnostics& diags);

}  // namespace slam::detail
