#include "lexer.hpp"

#include <cctype>
#include <charconv>

namespace slam::detail {

namespace {

constexpr std::string_view kTwoCharPuncts[] = {"::", "..", "=>", "<>", "<=", ">=",
                                               "!=", ":=", "->"};
constexpr std::string_view kOneCharPuncts = "()[]{},:.|=<>+-*/;";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& file, const std::set<std::string>& keywords)
      : src_(src), file_(file), keywords_(keywords) {}

  LexResult run() {
    LexResult out;
    bool space = true;
    while (true) {
      space = skip_space() || space;
      if (pos_ >= src_.size()) break;
      Token t;
      t.space_before = space;
      t.span = here();
      std::size_t start = pos_;
      char c = src_[pos_];
      if (ident_start(c)) {
        while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = keywords_.count(t.text) ? TokKind::Keyword : TokKind::Ident;
      } else if (digit(c)) {
        if (!number(t, out.diags)) continue;
      } else if (c == '"') {
        if (!string_lit(t, out.diags)) continue;
      } else if (!punct(t)) {
        out.diags.push_back(make_error("LEX_ERROR", t.span,
                                       std::string("unexpected character '") + c + "'"));
        advance();
        continue;
      }
      t.span.length = static_cast<int>(pos_ - start);
      out.tokens.push_back(std::move(t));
      space = false;
    }
    Token end;
    end.span = here();
    end.space_before = true;
    out.tokens.push_back(end);
    check_balance(out);
    return out;
  }

 private:
  SourceSpan here() const { return SourceSpan{file_, line_, col_, 0}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool skip_space() {
    bool skipped = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
        skipped = true;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        skipped = true;
      } else {
        break;
      }
    }
    return skipped;
  }

  bool number(Token& t, Diagnostics& diags) {
    std::size_t start = pos_;
    bool is_real = false;
    while (pos_ < src_.size() && digit(src_[pos_])) advance();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && digit(src_[pos_ + 1])) {
      is_real = true;
      advance();
      while (pos_ < src_.size() && digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      int save_col = col_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && digit(src_[pos_])) {
        is_real = true;
        while (pos_ < src_.size() && digit(src_[pos_])) advance();
      } else {
        pos_ = save;
        col_ = save_col;
      }
    }
    std::string_view text = src_.substr(start, pos_ - start);
    t.text = std::string(text);
    if (is_real) {
      t.kind = TokKind::Real;
      auto res = std::from_chars(text.data(), text.data() + text.size(), t.real_value);
      if (res.ec != std::errc()) {
        diags.push_back(make_error("LEX_ERROR", t.span, "malformed real literal"));
        return false;
      }
    } else {
      t.kind = TokKind::Int;
      auto res = std::from_chars(text.data(), text.data() + text.size(), t.int_value);
      if (res.ec != std::errc()) {
        diags.push_back(make_error("LEX_ERROR", t.span, "integer literal out of range"));
        return false;
      }
    }
    return true;
  }

  bool string_lit(Token& t, Diagnostics& diags) {
    advance();  // opening quote
    std::string value;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_];
      if (c == '\n') break;
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) break;
        char e = src_[pos_];
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default:
            diags.push_back(make_error("LEX_ERROR", here(), "unknown escape sequence"));
            value += e;
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
    if (pos_ >= src_.size() || src_[pos_] != '"') {
      diags.push_back(make_error("LEX_ERROR", t.span, "unterminated string literal"));
      return false;
    }
    advance();
    t.kind = TokKind::String;
    t.text = std::move(value);
    return true;
  }

  bool punct(Token& t) {
    if (pos_ + 1 < src_.size()) {
      std::string_view two = src_.substr(pos_, 2);
      for (auto p : kTwoCharPuncts) {
        if (two == p) {
          advance();
          advance();
          t.kind = TokKind::Punct;
          t.text = std::string(p);
          return true;
        }
      }
    }
    if (kOneCharPuncts.find(src_[pos_]) == std::string_view::npos) return false;
    t.kind = TokKind::Punct;
    t.text = std::string(1, src_[pos_]);
    advance();
    return true;
  }

  static void check_balance(LexResult& out) {
    std::vector<const Token*> stack;
    auto closer = [](const std::string& open) {
      return open == "(" ? ")" : open == "[" ? "]" : "}";
    };
    for (const auto& t : out.tokens) {
      if (t.kind != TokKind::Punct) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") {
        stack.push_back(&t);
      } else if (t.text == ")" || t.text == "]" || t.text == "}") {
        if (stack.empty() || closer(stack.back()->text) != t.text) {
          out.diags.push_back(
              make_error("UNBALANCED_DELIMITER", t.span, "unmatched '" + t.text + "'"));
          return;
        }
        stack.pop_back();
      }
    }
    if (!stack.empty()) {
      out.diags.push_back(make_error("UNBALANCED_DELIMITER", stack.back()->span,
                                     "'" + stack.back()->text + "' is never closed"));
    }
  }

  std::string_view src_;
  const std::string& file_;
  const std::set<std::string>& keywords_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

LexResult lex(std::string_view source, const std::string& file,
              const std::set<std::string>& keywords) {
  return Lexer(source, file, keywords).run();
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokKind::End: return "end of input";
    case TokKind::String: return "string literal";
    case TokKind::Int:
    case TokKind::Real: return "number '" + t.text + "'";
    case TokKind::Keyword: return "keyword '" + t.text + "'";
    case TokKind::Ident: return "identifier '" + t.text + "'";
    case TokKind::Punct: return "'" + t.text + "'";
  }
  return "token";
}

}  // namespace slam::detail
