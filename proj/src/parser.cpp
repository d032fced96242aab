#include "slam/parser.hpp"

#include <cmath>
#include <optional>
#include <set>
#include <sstream>

#include "lexer.hpp"
#include "parser_internal.hpp"

namespace slam {

using detail::Token;
using detail::TokKind;

namespace {

const std::set<std::string>& spec_keywords() {
  static const std::set<std::string> kw = [] {
    std::set<std::string> k = {"class",    "extends", "case",    "label",     "constructor",
                               "observer", "modifier", "friend", "rule",      "pre",
                               "call",     "post",    "sol",     "check",     "and_check",
                               "either_check", "traverse", "true", "false",  "and",
                               "or",       "not",     "implies", "iff",       "in",
                               "Result"};
    for (QuantSymbol s : kAllQuantifiers) k.insert(std::string(quantifier_keyword(s)));
    return k;
  }();
  return kw;
}

// Thrown after the diagnostic has been recorded.
struct SyntaxFailure {};

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, Diagnostics& diags, std::size_t pos = 0)
      : toks_(tokens), pos_(pos), diags_(diags) {}

  std::size_t position() const { return pos_; }

  ExprPtr embedded_expr() {
    try {
      return expr();
    } catch (const SyntaxFailure&) {
      return nullptr;
    }
  }

  std::optional<Pattern> embedded_pattern() {
    try {
      return pattern();
    } catch (const SyntaxFailure&) {
      return std::nullopt;
    }
  }

  std::vector<ClassDef> spec() {
    std::vector<ClassDef> defs;
    while (!at_end()) {
      try {
        defs.push_back(class_def());
      } catch (const SyntaxFailure&) {
        sync_to_class();
      }
    }
    return defs;
  }

  ExprPtr lone_expr() {
    try {
      ExprPtr e = expr();
      if (!at_end()) fail("SYNTAX", "unexpected " + describe(peek()) + " after expression");
      return e;
    } catch (const SyntaxFailure&) {
      return nullptr;
    }
  }

 private:
  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_end() const { return peek().kind == TokKind::End; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept_punct(std::string_view p) {
    if (!peek().punct(p)) return false;
    next();
    return true;
  }
  bool accept_keyword(std::string_view k) {
    if (!peek().keyword(k)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const std::string& code, const std::string& message) {
    fail_at(peek().span, code, message);
  }
  [[noreturn]] void fail_at(const SourceSpan& span, const std::string& code,
                            const std::string& message) {
    diags_.push_back(make_error(code, span, message));
    throw SyntaxFailure{};
  }

  const Token& expect_punct(std::string_view p) {
    if (!peek().punct(p)) fail("SYNTAX", "expected '" + std::string(p) + "', found " + describe(peek()));
    return next();
  }
  void expect_keyword(std::string_view k) {
    if (!peek().keyword(k)) fail("SYNTAX", "expected '" + std::string(k) + "', found " + describe(peek()));
    next();
  }
  std::string expect_ident(std::string_view what) {
    if (peek().kind != TokKind::Ident) {
      fail("SYNTAX", "expected " + std::string(what) + ", found " + describe(peek()));
    }
    return next().text;
  }

  void sync_to_class() {
    if (!at_end()) next();
    while (!at_end() && !peek().keyword("class")) next();
  }

  // -- declarations ---------------------------------------------------------

  ClassDef class_def() {
    ClassDef c;
    c.span = peek().span;
    if (!accept_keyword("class")) {
      if (peek().kind == TokKind::Ident) {
        fail("UNKNOWN_KEYWORD", "unknown keyword '" + peek().text + "' at top level");
      }
      fail("SYNTAX", "expected 'class', found " + describe(peek()));
    }
    c.name = expect_ident("class name");
    if (accept_punct("(")) {
      if (!peek().punct(")")) {
        do {
          c.type_params.push_back(expect_ident("type parameter"));
        } while (accept_punct(","));
      }
      expect_punct(")");
    }
    if (accept_keyword("extends")) {
      do {
        c.parents.push_back(expect_ident("parent class name"));
      } while (accept_punct(","));
    }
    expect_punct("{");
    while (!peek().punct("}")) {
      if (at_end()) fail("SYNTAX", "unterminated class body");
      member(c);
    }
    expect_punct("}");
    return c;
  }

  TypeExpr class_type(const ClassDef& c) const {
    std::vector<TypeExpr> args;
    for (const auto& p : c.type_params) args.push_back(TypeExpr::named(p));
    return TypeExpr::named(c.name, std::move(args));
  }

  void member(ClassDef& c) {
    const Token& t = peek();
    if (t.keyword("case")) {
      next();
      AttrConstructor alt;
      alt.span = peek().span;
      alt.tag = expect_ident("constructor tag");
      expect_punct("(");
      if (!peek().punct(")")) {
        do {
          AttrComponent comp;
          if (peek().kind == TokKind::Ident && peek(1).punct(":")) {
            comp.label = next().text;
            next();
          }
          comp.type = type_expr();
          alt.components.push_back(std::move(comp));
        } while (accept_punct(","));
      }
      expect_punct(")");
      c.alternatives.push_back(std::move(alt));
    } else if (t.keyword("label")) {
      next();
      AttrConstructor alt;
      alt.span = t.span;
      alt.labeled = true;
      if (peek().kind == TokKind::Ident) {
        alt.tag = next().text;
      } else {
        alt.tag = synthetic_tag(c.name);
      }
      expect_punct(":");
      alt.components.push_back(AttrComponent{std::nullopt, type_expr()});
      c.alternatives.push_back(std::move(alt));
    } else if (t.keyword("constructor") || t.keyword("observer") || t.keyword("modifier") ||
               t.keyword("friend")) {
      c.op_decls.push_back(op_decl(c));
    } else if (t.keyword("traverse")) {
      next();
      TraversalRule tr;
      tr.span = t.span;
      tr.shape = pattern();
      expect_punct("=>");
      expect_punct("[");
      if (!peek().punct("]")) {
        do {
          tr.items.push_back(expr());
        } while (accept_punct(","));
      }
      expect_punct("]");
      c.traversal_rules.push_back(std::move(tr));
    } else if (t.keyword("rule")) {
      c.rules.push_back(rule(c));
    } else if (t.kind == TokKind::Ident) {
      fail("UNKNOWN_KEYWORD", "unknown keyword '" + t.text + "' in class body");
    } else {
      fail("SYNTAX", "unexpected " + describe(t) + " in class body");
    }
  }

  OpDecl op_decl(const ClassDef& c) {
    OpDecl d;
    d.span = peek().span;
    const std::string kw = next().text;
    d.kind = kw == "constructor" ? OpKind::Constructor
             : kw == "observer"  ? OpKind::Observer
             : kw == "modifier"  ? OpKind::Modifier
                                 : OpKind::Friend;
    d.name = expect_ident("operation name");
    expect_punct("(");
    if (!peek().punct(")")) {
      do {
        d.arg_types.push_back(type_expr());
      } while (accept_punct(","));
    }
    expect_punct(")");
    if (d.kind == OpKind::Observer || d.kind == OpKind::Friend) {
      expect_punct(":");
      d.result_type = type_expr();
    } else {
      d.result_type = class_type(c);
      if (peek().punct(":")) {
        fail("SYNTAX", std::string(kw) + " result type is implied by the class");
      }
    }
    return d;
  }

  TypeExpr type_expr() {
    if (accept_punct("{")) {
      std::vector<std::pair<std::string, TypeExpr>> fields;
      if (!peek().punct("}")) {
        do {
          std::string label = expect_ident("field label");
          expect_punct(":");
          fields.emplace_back(std::move(label), type_expr());
        } while (accept_punct(","));
      }
      expect_punct("}");
      return TypeExpr::record(std::move(fields));
    }
    std::string name = expect_ident("type name");
    std::vector<TypeExpr> args;
    if (accept_punct("(")) {
      if (!peek().punct(")")) {
        do {
          args.push_back(type_expr());
        } while (accept_punct(","));
      }
      expect_punct(")");
    }
    return TypeExpr::named(std::move(name), std::move(args));
  }

  FunctionRule rule(const ClassDef& c) {
    FunctionRule r;
    r.span = peek().span;
    r.cls = c.name;
    expect_keyword("rule");
    expect_punct("{");
    bool have_pre = false, have_call = false, have_post = false, have_sol = false;
    auto once = [&](bool& seen, const char* what) {
      if (seen) fail("SYNTAX", std::string("duplicate '") + what + "' section");
      seen = true;
      next();
      expect_punct(":");
    };
    while (!peek().punct("}")) {
      const Token& t = peek();
      if (t.keyword("pre")) {
        once(have_pre, "pre");
        r.pre = condition();
      } else if (t.keyword("call")) {
        once(have_call, "call");
        call_scheme(r);
      } else if (t.keyword("post")) {
        once(have_post, "post");
        r.post = condition();
      } else if (t.keyword("sol")) {
        once(have_sol, "sol");
        r.sol = expr();
      } else if (t.kind == TokKind::Ident) {
        fail("UNKNOWN_KEYWORD", "unknown rule section '" + t.text + "'");
      } else {
        fail("SYNTAX", "unexpected " + describe(t) + " in rule");
      }
    }
    expect_punct("}");
    if (!have_call) fail_at(r.span, "SYNTAX", "rule has no 'call' section");
    auto truth = [&] { return make_expr(Expr::Literal{Value::boolean(true)}, r.span); };
    if (!have_pre) r.pre = Condition::full(truth());
    if (!have_post) r.post = Condition::full(truth());
    return r;
  }

  Condition condition() {
    Condition c;
    if (accept_keyword("check")) {
      c.checked_part = expr();
    } else if (peek().keyword("and_check") || peek().keyword("either_check")) {
      c.mode = next().text == "and_check" ? CheckModeKind::ConjunctOnly
                                          : CheckModeKind::Approximation;
      c.unchecked_part = expr();
      expect_punct("::");
      c.checked_part = expr();
    } else {
      c.checked_part = expr();
    }
    return c;
  }

  void call_scheme(FunctionRule& r) {
    SourceSpan at = peek().span;
    Pattern first = pattern();
    if (peek().punct(".") && !peek().space_before) {
      next();
      r.fname = expect_ident("function name");
      r.receiver_form = true;
      r.args.push_back(std::move(first));
      expect_punct("(");
      if (!peek().punct(")")) {
        do {
          r.args.push_back(pattern());
        } while (accept_punct(","));
      }
      expect_punct(")");
      return;
    }
    auto* con = std::get_if<Pattern::Con>(&first.node);
    if (!con) fail_at(at, "SYNTAX", "call scheme must be 'f(p, ...)' or 'p.f(p, ...)'");
    r.fname = con->tag;
    r.args = std::move(con->args);
  }

  // -- patterns -------------------------------------------------------------

  Pattern pattern() {
    const Token& t = peek();
    SourceSpan span = t.span;
    if (t.kind == TokKind::Ident) {
      next();
      if (t.text == "_") return Pattern::wildcard(span);
      if (accept_punct("(")) {
        std::vector<Pattern> args;
        if (!peek().punct(")")) {
          do {
            args.push_back(pattern());
          } while (accept_punct(","));
        }
        expect_punct(")");
        return Pattern::con(t.text, std::move(args), span);
      }
      return Pattern::var(t.text, span);
    }
    if (t.punct("{")) {
      next();
      std::vector<std::pair<std::string, Pattern>> fields;
      if (!peek().punct("}")) {
        do {
          std::string label = expect_ident("field label");
          expect_punct(":");
          fields.emplace_back(std::move(label), pattern());
        } while (accept_punct(","));
      }
      expect_punct("}");
      return Pattern::record(std::move(fields), span);
    }
    if (t.keyword("Result")) fail("RESULT_IN_PATTERN", "'Result' cannot appear in a pattern");
    if (auto lit = literal_value()) return Pattern::lit(*lit, span);
    fail("SYNTAX", "expected pattern, found " + describe(t));
  }

  // Consumes an optionally negated literal.
  std::optional<Value> literal_value() {
    const Token& t = peek();
    bool negative = false;
    if (t.punct("-") && (peek(1).kind == TokKind::Int || peek(1).kind == TokKind::Real)) {
      negative = true;
      next();
    }
    const Token& l = peek();
    switch (l.kind) {
      case TokKind::Int:
        next();
        return Value::integer(negative ? -l.int_value : l.int_value);
      case TokKind::Real:
        next();
        return Value::real(negative ? -l.real_value : l.real_value);
      case TokKind::String:
        if (negative) break;
        next();
        return Value::string(l.text);
      case TokKind::Keyword:
        if (negative) break;
        if (l.text == "true" || l.text == "false") {
          next();
          return Value::boolean(l.text == "true");
        }
        break;
      default:
        break;
    }
    return std::nullopt;
  }

  // -- expressions ----------------------------------------------------------

  ExprPtr expr() { return iff_expr(); }

  ExprPtr logical(LogicalOp op, ExprPtr a, ExprPtr b, SourceSpan span) {
    return make_expr(Expr::Logical{op, {std::move(a), std::move(b)}}, std::move(span));
  }

  ExprPtr iff_expr() {
    ExprPtr lhs = implies_expr();
    while (peek().keyword("iff")) {
      SourceSpan span = next().span;
      lhs = logical(LogicalOp::Iff, lhs, implies_expr(), span);
    }
    return lhs;
  }

  ExprPtr implies_expr() {
    ExprPtr lhs = or_expr();
    if (peek().keyword("implies")) {
      SourceSpan span = next().span;
      return logical(LogicalOp::Implies, lhs, implies_expr(), span);
    }
    return lhs;
  }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (peek().keyword("or")) {
      SourceSpan span = next().span;
      lhs = logical(LogicalOp::Or, lhs, and_expr(), span);
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = not_expr();
    while (peek().keyword("and")) {
      SourceSpan span = next().span;
      lhs = logical(LogicalOp::And, lhs, not_expr(), span);
    }
    return lhs;
  }

  ExprPtr not_expr() {
    if (peek().keyword("not")) {
      SourceSpan span = next().span;
      return make_expr(Expr::Logical{LogicalOp::Not, {not_expr()}}, span);
    }
    return relational_expr();
  }

  std::optional<BinaryOp> relational_op() const {
    const Token& t = peek();
    if (t.kind != TokKind::Punct) return std::nullopt;
    if (t.text == "=") return BinaryOp::Eq;
    if (t.text == "<>" || t.text == "!=") return BinaryOp::Ne;
    if (t.text == "<") return BinaryOp::Lt;
    if (t.text == "<=") return BinaryOp::Le;
    if (t.text == ">") return BinaryOp::Gt;
    if (t.text == ">=") return BinaryOp::Ge;
    return std::nullopt;
  }

  ExprPtr relational_expr() {
    ExprPtr lhs = range_expr();
    if (auto op = relational_op()) {
      SourceSpan span = next().span;
      ExprPtr rhs = range_expr();
      if (relational_op()) fail("SYNTAX", "relational operators do not chain; add parentheses");
      return make_expr(Expr::Binary{*op, lhs, rhs}, span);
    }
    return lhs;
  }

  ExprPtr range_expr() {
    ExprPtr lo = additive_expr();
    if (peek().punct("..")) {
      SourceSpan span = next().span;
      return make_expr(Expr::Range{lo, additive_expr()}, span);
    }
    return lo;
  }

  ExprPtr additive_expr() {
    ExprPtr lhs = multiplicative_expr();
    while (peek().punct("+") || peek().punct("-")) {
      const Token& t = next();
      BinaryOp op = t.text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      lhs = make_expr(Expr::Binary{op, lhs, multiplicative_expr()}, t.span);
    }
    return lhs;
  }

  ExprPtr multiplicative_expr() {
    ExprPtr lhs = unary_expr();
    while (peek().punct("*") || peek().punct("/")) {
      const Token& t = next();
      BinaryOp op = t.text == "*" ? BinaryOp::Mul : BinaryOp::Div;
      lhs = make_expr(Expr::Binary{op, lhs, unary_expr()}, t.span);
    }
    return lhs;
  }

  ExprPtr unary_expr() {
    if (peek().punct("-")) {
      SourceSpan span = peek().span;
      const Token& after = peek(1);
      if (after.kind == TokKind::Int || after.kind == TokKind::Real) {
        Value v = *literal_value();
        return postfix(make_expr(Expr::Literal{v}, span));
      }
      next();
      return make_expr(Expr::Negate{unary_expr()}, span);
    }
    return postfix(primary());
  }

  std::vector<ExprPtr> arguments() {
    expect_punct("(");
    std::vector<ExprPtr> args;
    if (!peek().punct(")")) {
      do {
        args.push_back(expr());
      } while (accept_punct(","));
    }
    expect_punct(")");
    return args;
  }

  ExprPtr postfix(ExprPtr base) {
    while (true) {
      const Token& t = peek();
      if (t.punct("(")) {
        SourceSpan span = base->span;
        std::vector<ExprPtr> args = arguments();
        if (auto* v = base->as<Expr::Var>()) {
          base = make_expr(Expr::Call{v->name, std::move(args)}, span);
        } else if (args.size() == 1) {
          base = make_expr(Expr::SeqIndex{base, args[0]}, span);
        } else {
          fail_at(span, "SYNTAX", "only a name can be applied to several arguments");
        }
      } else if (t.punct(".") && !t.space_before) {
        next();
        SourceSpan span = peek().span;
        std::string name = expect_ident("member name after '.'");
        if (peek().punct("(")) {
          base = make_expr(Expr::DottedCall{base, name, arguments()}, span);
        } else if (peek().punct(":") && peek(1).kind == TokKind::Ident && peek(2).punct("(")) {
          next();
          std::string fname = next().text;
          base = make_expr(Expr::QualifiedCall{base, name, fname, arguments()}, span);
        } else {
          base = make_expr(Expr::RecordAccess{base, name}, span);
        }
      } else {
        return base;
      }
    }
  }

  ExprPtr primary() {
    const Token& t = peek();
    SourceSpan span = t.span;
    if (auto lit = literal_value()) return make_expr(Expr::Literal{*lit}, span);
    if (t.kind == TokKind::Ident) {
      next();
      return make_expr(Expr::Var{t.text}, span);
    }
    if (t.keyword("Result")) {
      next();
      return make_expr(Expr::ResultVar{}, span);
    }
    if (t.kind == TokKind::Keyword) {
      if (auto q = quantifier_from_keyword(t.text)) {
        next();
        return quantifier(*q, span);
      }
    }
    if (accept_punct("(")) {
      ExprPtr inner = expr();
      expect_punct(")");
      return inner;
    }
    if (accept_punct("[")) {
      std::vector<ExprPtr> elems;
      if (!peek().punct("]")) {
        do {
          elems.push_back(expr());
        } while (accept_punct(","));
      }
      expect_punct("]");
      return make_expr(Expr::SeqLiteral{std::move(elems)}, span);
    }
    if (accept_punct("{")) {
      std::vector<std::pair<std::string, ExprPtr>> fields;
      if (!peek().punct("}")) {
        do {
          std::string label = expect_ident("field label");
          expect_punct(":");
          fields.emplace_back(std::move(label), expr());
        } while (accept_punct(","));
      }
      expect_punct("}");
      return make_expr(Expr::RecordLiteral{std::move(fields)}, span);
    }
    fail("SYNTAX", "expected expression, found " + describe(t));
  }

  ExprPtr quantifier(QuantSymbol symbol, SourceSpan span) {
    if (peek().keyword("Result")) fail("RESULT_AS_VARIABLE", "'Result' cannot be a bound variable");
    std::string var = expect_ident("bound variable");
    expect_keyword("in");
    ExprPtr collection = expr();
    ExprPtr filter;
    if (accept_punct("|")) {
      filter = expr();
    } else {
      filter = make_expr(Expr::Literal{Value::boolean(true)}, span);
    }
    if (!peek().punct(".")) {
      fail("SYNTAX", "expected ' . ' before the quantifier body, found " + describe(peek()));
    }
    next();
    ExprPtr body = expr();
    return make_expr(Expr::Quantifier{symbol, std::move(var), collection, filter, body}, span);
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  Diagnostics& diags_;
};

// ---------------------------------------------------------------------------
// Printing

enum Prec {
  kIff = 1,
  kImplies,
  kOr,
  kAnd,
  kNot,
  kRelational,
  kRange,
  kAdditive,
  kMultiplicative,
  kUnary,
  kPostfix
};

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string literal_text(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Int: return std::to_string(v.as_int());
    case ValueKind::Real: {
      std::string s = format_real(v.as_real());
      if (s.find_first_of(".en") == std::string::npos) s += ".0";
      return s;
    }
    case ValueKind::Bool: return v.as_bool() ? "true" : "false";
    case ValueKind::String: return quote_string(v.as_string());
    default: return to_text(v);
  }
}

bool negative_number(const Value& v) {
  return (v.is_int() && v.as_int() < 0) || (v.is_real() && std::signbit(v.as_real()));
}

int precedence(const Expr& e) {
  if (auto* l = e.as<Expr::Logical>()) {
    switch (l->op) {
      case LogicalOp::Iff: return kIff;
      case LogicalOp::Implies: return kImplies;
      case LogicalOp::Or: return kOr;
      case LogicalOp::And: return kAnd;
      case LogicalOp::Not: return kNot;
    }
  }
  if (auto* b = e.as<Expr::Binary>()) {
    if (is_relational(b->op)) return kRelational;
    if (b->op == BinaryOp::Add || b->op == BinaryOp::Sub) return kAdditive;
    return kMultiplicative;
  }
  if (e.as<Expr::Range>()) return kRange;
  if (e.as<Expr::Negate>()) return kUnary;
  if (auto* lit = e.as<Expr::Literal>(); lit && negative_number(lit->value)) return kUnary;
  return kPostfix;
}

void print(std::ostream& os, const ExprPtr& e, int min_prec);

void print_list(std::ostream& os, const std::vector<ExprPtr>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ", ";
    print(os, xs[i], kIff);
  }
}

void print_node(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Literal>) {
          os << literal_text(n.value);
        } else if constexpr (std::is_same_v<T, Expr::Var>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, Expr::ResultVar>) {
          os << "Result";
        } else if constexpr (std::is_same_v<T, Expr::Construct>) {
          os << n.tag << "(";
          print_list(os, n.args);
          os << ")";
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          os << n.fname << "(";
          print_list(os, n.args);
          os << ")";
        } else if constexpr (std::is_same_v<T, Expr::DottedCall>) {
          print(os, n.receiver, kPostfix);
          os << "." << n.fname << "(";
          print_list(os, n.args);
          os << ")";
        } else if constexpr (std::is_same_v<T, Expr::QualifiedCall>) {
          print(os, n.receiver, kPostfix);
          os << "." << n.cls << ":" << n.fname << "(";
          print_list(os, n.args);
          os << ")";
        } else if constexpr (std::is_same_v<T, Expr::Logical>) {
          switch (n.op) {
            case LogicalOp::Not:
              os << "not ";
              print(os, n.operands[0], kNot);
              break;
            case LogicalOp::Implies:
              print(os, n.operands[0], kImplies + 1);
              os << " implies ";
              print(os, n.operands[1], kImplies);
              break;
            default: {
              int p = precedence(e);
              const char* word = n.op == LogicalOp::And ? " and " : n.op == LogicalOp::Or ? " or " : " iff ";
              for (std::size_t i = 0; i < n.operands.size(); ++i) {
                if (i) os << word;
                print(os, n.operands[i], i == 0 ? p : p + 1);
              }
            }
          }
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          int p = precedence(e);
          bool relational = is_relational(n.op);
          print(os, n.lhs, relational ? p + 1 : p);
          os << " " << binary_op_symbol(n.op) << " ";
          print(os, n.rhs, p + 1);
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          os << "-";
          auto* lit = n.operand->template as<Expr::Literal>();
          if (lit && lit->value.is_number()) {
            os << "(" << literal_text(lit->value) << ")";
          } else {
            print(os, n.operand, kUnary);
          }
        } else if constexpr (std::is_same_v<T, Expr::Quantifier>) {
          os << "(" << quantifier_keyword(n.symbol) << " " << n.var << " in ";
          print(os, n.collection, kIff);
          os << " | ";
          print(os, n.filter, kIff);
          os << " . ";
          print(os, n.body, kIff);
          os << ")";
        } else if constexpr (std::is_same_v<T, Expr::RecordAccess>) {
          print(os, n.record, kPostfix);
          os << "." << n.label;
        } else if constexpr (std::is_same_v<T, Expr::SeqIndex>) {
          print(os, n.seq, kPostfix);
          os << "(";
          print(os, n.index, kIff);
          os << ")";
        } else if constexpr (std::is_same_v<T, Expr::Range>) {
          print(os, n.lo, kRange + 1);
          os << " .. ";
          print(os, n.hi, kRange + 1);
        } else if constexpr (std::is_same_v<T, Expr::SeqLiteral>) {
          os << "[";
          print_list(os, n.elems);
          os << "]";
        } else if constexpr (std::is_same_v<T, Expr::RecordLiteral>) {
          os << "{";
          for (std::size_t i = 0; i < n.fields.size(); ++i) {
            if (i) os << ", ";
            os << n.fields[i].first << ": ";
            print(os, n.fields[i].second, kIff);
          }
          os << "}";
        }
      },
      e.node);
}

void print(std::ostream& os, const ExprPtr& e, int min_prec) {
  if (!e) {
    os << "<null>";
    return;
  }
  bool parens = precedence(*e) < min_prec;
  if (parens) os << "(";
  print_node(os, *e);
  if (parens) os << ")";
}

std::string type_text(const TypeExpr& t) {
  if (t.is_record) {
    std::string out = "{";
    for (std::size_t i = 0; i < t.fields.size(); ++i) {
      if (i) out += ", ";
      out += t.fields[i].first + ": " + type_text(t.fields[i].second);
    }
    return out + "}";
  }
  std::string out = t.name;
  if (!t.args.empty()) {
    out += "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) out += ", ";
      out += type_text(t.args[i]);
    }
    out += ")";
  }
  return out;
}

void print_class(std::ostream& os, const ClassDef& c) {
  os << "class " << c.name;
  if (!c.type_params.empty()) {
    os << "(";
    for (std::size_t i = 0; i < c.type_params.size(); ++i) os << (i ? ", " : "") << c.type_params[i];
    os << ")";
  }
  if (!c.parents.empty()) {
    os << " extends ";
    for (std::size_t i = 0; i < c.parents.size(); ++i) os << (i ? ", " : "") << c.parents[i];
  }
  os << " {\n";
  for (const auto& alt : c.alternatives) {
    if (alt.labeled) {
      os << "  label ";
      if (alt.tag != synthetic_tag(c.name)) os << alt.tag << " ";
      os << ": " << type_text(alt.components.at(0).type) << "\n";
      continue;
    }
    os << "  case " << alt.tag << "(";
    for (std::size_t i = 0; i < alt.components.size(); ++i) {
      if (i) os << ", ";
      if (alt.components[i].label) os << *alt.components[i].label << ": ";
      os << type_text(alt.components[i].type);
    }
    os << ")\n";
  }
  for (const auto& d : c.op_decls) {
    os << "  " << op_kind_keyword(d.kind) << " " << d.name << "(";
    for (std::size_t i = 0; i < d.arg_types.size(); ++i) os << (i ? ", " : "") << type_text(d.arg_types[i]);
    os << ")";
    if (d.kind == OpKind::Observer || d.kind == OpKind::Friend) os << " : " << type_text(d.result_type);
    os << "\n";
  }
  for (const auto& tr : c.traversal_rules) {
    os << "  traverse " << print_pattern(tr.shape) << " => [";
    print_list(os, tr.items);
    os << "]\n";
  }
  for (const auto& r : c.rules) {
    os << "  rule {\n";
    os << "    pre: " << print_condition(r.pre) << "\n";
    os << "    call: ";
    std::size_t first = 0;
    if (r.receiver_form) {
      os << print_pattern(r.args.at(0)) << ".";
      first = 1;
    }
    os << r.fname << "(";
    for (std::size_t i = first; i < r.args.size(); ++i) {
      if (i > first) os << ", ";
      os << print_pattern(r.args[i]);
    }
    os << ")\n";
    os << "    post: " << print_condition(r.post) << "\n";
    if (r.sol) os << "    sol: " << print_expr(r.sol) << "\n";
    os << "  }\n";
  }
  os << "}\n";
}

}  // namespace

SpecParseResult parse_spec(std::string_view source, const std::string& file) {
  SpecParseResult out;
  auto lexed = detail::lex(source, file, spec_keywords());
  out.diags = std::move(lexed.diags);
  if (has_errors(out.diags)) return out;
  Parser p(lexed.tokens, out.diags);
  auto defs = p.spec();
  if (!has_errors(out.diags)) out.defs = std::move(defs);
  return out;
}

ExprParseResult parse_expr(std::string_view source, const std::string& file) {
  ExprParseResult out;
  auto lexed = detail::lex(source, file, spec_keywords());
  out.diags = std::move(lexed.diags);
  if (has_errors(out.diags)) return out;
  Parser p(lexed.tokens, out.diags);
  auto e = p.lone_expr();
  if (!has_errors(out.diags)) out.expr = std::move(e);
  return out;
}

std::string print_expr(const ExprPtr& e) {
  std::ostringstream os;
  print(os, e, kIff);
  return os.str();
}

std::string print_pattern(const Pattern& p) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Pattern::Var>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, Pattern::Wildcard>) {
          return "_";
        } else if constexpr (std::is_same_v<T, Pattern::Con>) {
          std::string out = n.tag + "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            out += print_pattern(n.args[i]);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, Pattern::Lit>) {
          return literal_text(n.value);
        } else {
          std::string out = "{";
          for (std::size_t i = 0; i < n.fields.size(); ++i) {
            if (i) out += ", ";
            out += n.fields[i].first + ": " + print_pattern(n.fields[i].second);
          }
          return out + "}";
        }
      },
      p.node);
}

std::string print_condition(const Condition& c) {
  switch (c.mode) {
    case CheckModeKind::Full: return print_expr(c.checked_part);
    case CheckModeKind::ConjunctOnly:
      return "and_check " + print_expr(c.unchecked_part) + " :: " + print_expr(c.checked_part);
    case CheckModeKind::Approximation:
      return "either_check " + print_expr(c.unchecked_part) + " :: " + print_expr(c.checked_part);
  }
  return "";
}

std::string pretty_print(const std::vector<ClassDef>& defs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    if (i) os << "\n";
    print_class(os, defs[i]);
  }
  return os.str();
}

namespace detail {

const std::set<std::string>& expression_keywords() { return spec_keywords(); }

ExprPtr parse_expr_at(const std::vector<Token>& tokens, std::size_t& pos, Diagnostics& diags) {
  Parser p(tokens, diags, pos);
  ExprPtr e = p.embedded_expr();
  pos = p.position();
  return e;
}

std::optional<Pattern> parse_pattern_at(const std::vector<Token>& tokens, std::size_t& pos, Diagnostics& diags) {
  Parser p(tokens, diags, pos);
  auto pat = p.embedded_pattern();
  pos = p.position();
  return pat;
}

}  // namespace detail

}  // namespace slam
