#pragma once

// Tokenizer shared by the specification parser and the skeleton-language
// parser. Not part of the public interface.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slam/diagnostic.hpp"

namespace slam::detail {

enum class TokKind { Ident, Keyword, Int, Real, String, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;  // identifier/keyword/punct spelling, decoded string contents
  std::int64_t int_value = 0;
  double real_value = 0.0;
  SourceSpan span;
  /// Whitespace or a comment separates this token from the previous one.
  bool space_before = false;

  bool is(TokKind k, std::string_view t) const { return kind == k && text == t; }
  bool punct(std::string_view t) const { return is(TokKind::Punct, t); }
  bool keyword(std::string_view t) const { return is(TokKind::Keyword, t); }
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by an End token
  Diagnostics diags;
};

/// Splits `source` into tokens. `//` starts a line comment. Reports
/// LEX_ERROR for bad characters or literals and UNBALANCED_DELIMITER for
/// mismatched brackets.
LexResult lex(std::string_view source, const std::string& file, const std::set<std::string>& keywords);

std::string describe(const Token& t);

}  // namespace slam::detail
