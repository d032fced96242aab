#include "slam/slimp.hpp"

#include <set>

#include "lexer.hpp"
#include "parser_internal.hpp"
#include "slam/parser.hpp"

namespace slam {

using detail::Token;
using detail::TokKind;

namespace {

const std::set<std::string>& slimp_keywords() {
  static const std::set<std::string> kw = [] {
    std::set<std::string> k = detail::expression_keywords();
    for (const char* w : {"func", "proc", "main", "type", "union", "record", "var", "for", "if", "else", "when",
                          "is", "return", "fail", "print"}) {
      k.insert(w);
    }
    return k;
  }();
  return kw;
}

struct SyntaxAbort {};

class SlimpParser {
 public:
  SlimpParser(const std::vector<Token>& toks, Diagnostics& diags, SlimpProgram& program)
      : toks_(toks), diags_(diags), program_(program) {}

  void file() {
    while (!at_end()) {
      try {
        item();
      } catch (const SyntaxAbort&) {
        recover();
      }
    }
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_end() const { return peek().kind == TokKind::End; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& msg) {
    diags_.push_back(make_error("SYNTAX", peek().span, msg));
    throw SyntaxAbort{};
  }
  void expect_punct(std::string_view p) {
    if (!peek().punct(p)) fail("expected '" + std::string(p) + "', found " + detail::describe(peek()));
    next();
  }
  void expect_keyword(std::string_view k) {
    if (!peek().keyword(k)) fail("expected '" + std::string(k) + "', found " + detail::describe(peek()));
    next();
  }
  bool accept_punct(std::string_view p) {
    if (!peek().punct(p)) return false;
    next();
    return true;
  }
  std::string ident(std::string_view what) {
    if (peek().kind != TokKind::Ident) fail("expected " + std::string(what) + ", found " + detail::describe(peek()));
    return next().text;
  }
  void recover() {
    while (!at_end()) {
      const Token& t = peek();
      if (t.keyword("func") || t.keyword("proc") || t.keyword("type") || t.keyword("main")) return;
      next();
    }
  }

  ExprPtr expr() {
    std::size_t before = diags_.size();
    ExprPtr e = detail::parse_expr_at(toks_, pos_, diags_);
    if (!e || diags_.size() != before) throw SyntaxAbort{};
    return e;
  }

  Pattern pattern() {
    std::size_t before = diags_.size();
    auto p = detail::parse_pattern_at(toks_, pos_, diags_);
    if (!p || diags_.size() != before) throw SyntaxAbort{};
    return *p;
  }

  TypeExpr type() {
    if (accept_punct("{")) {
      std::vector<std::pair<std::string, TypeExpr>> fields;
      if (!peek().punct("}")) {
        do {
          std::string label = ident("field label");
          expect_punct(":");
          fields.emplace_back(std::move(label), type());
        } while (accept_punct(","));
      }
      expect_punct("}");
      return TypeExpr::record(std::move(fields));
    }
    std::string name = ident("type name");
    std::vector<TypeExpr> args;
    if (accept_punct("(")) {
      do {
        args.push_back(type());
      } while (accept_punct(","));
      expect_punct(")");
    }
    return TypeExpr::named(std::move(name), std::move(args));
  }

  void item() {
    const Token& t = peek();
    if (t.keyword("type")) {
      next();
      std::string name = ident("type name");
      expect_punct("=");
      if (!peek().keyword("union") && !peek().keyword("record")) fail("expected 'union' or 'record'");
      next();
      expect_punct("{");
      int depth = 1;
      while (depth > 0) {
        if (at_end()) fail("unterminated type layout");
        if (peek().punct("{")) ++depth;
        if (peek().punct("}")) --depth;
        next();
      }
      program_.types.push_back(std::move(name));
      return;
    }
    if (t.keyword("main")) {
      SourceSpan span = t.span;
      next();
      if (program_.main) diags_.push_back(make_error("DUPLICATE_FUNCTION", span, "second 'main' block"));
      program_.main = block();
      return;
    }
    if (t.keyword("func") || t.keyword("proc")) {
      SlimpFunction fn;
      fn.checked = t.keyword("func");
      fn.span = t.span;
      next();
      fn.name = ident("function name");
      expect_punct("(");
      if (!peek().punct(")")) {
        do {
          SlimpParam p;
          p.name = ident("parameter name");
          if (accept_punct(":")) p.type = type();
          fn.params.push_back(std::move(p));
        } while (accept_punct(","));
      }
      expect_punct(")");
      if (accept_punct(":")) fn.result = type();
      fn.body = block();
      if (program_.functions.count(fn.name)) {
        diags_.push_back(make_error("DUPLICATE_FUNCTION", fn.span, "function '" + fn.name + "' defined twice"));
        return;
      }
      std::string name = fn.name;
      program_.functions.emplace(std::move(name), std::move(fn));
      return;
    }
    fail("expected 'func', 'proc', 'type' or 'main', found " + detail::describe(t));
  }

  SlimpBlock block() {
    expect_punct("{");
    SlimpBlock out;
    while (!peek().punct("}")) {
      if (at_end()) fail("unterminated block");
      out.push_back(statement());
    }
    next();
    return out;
  }

  SlimpStmt statement() {
    SlimpStmt s;
    s.span = peek().span;
    const Token& t = peek();
    if (t.keyword("var")) {
      next();
      s.kind = SlimpStmt::Kind::Var;
      s.name = ident("variable name");
      if (accept_punct(":")) s.type = type();
      if (accept_punct(":=")) s.expr = expr();
    } else if (t.keyword("for")) {
      next();
      s.kind = SlimpStmt::Kind::For;
      s.name = ident("loop variable");
      expect_keyword("in");
      s.expr = expr();
      s.body = block();
    } else if (t.keyword("if")) {
      next();
      s.kind = SlimpStmt::Kind::If;
      s.expr = expr();
      s.body = block();
      if (peek().keyword("else")) {
        next();
        if (peek().keyword("if")) {
          s.else_body.push_back(statement());
        } else {
          s.else_body = block();
        }
      }
    } else if (t.keyword("when")) {
      next();
      s.kind = SlimpStmt::Kind::When;
      do {
        ExprPtr subject = expr();
        expect_keyword("is");
        s.matches.emplace_back(std::move(subject), pattern());
      } while (accept_punct(","));
      s.body = block();
    } else if (t.keyword("return")) {
      next();
      s.kind = SlimpStmt::Kind::Return;
      s.expr = expr();
    } else if (t.keyword("fail")) {
      next();
      s.kind = SlimpStmt::Kind::Fail;
      if (peek().kind != TokKind::String) fail("expected an error code string after 'fail'");
      s.name = next().text;
    } else if (t.keyword("print")) {
      next();
      s.kind = SlimpStmt::Kind::Print;
      s.expr = expr();
    } else if (t.kind == TokKind::Ident && peek(1).punct(":=")) {
      s.kind = SlimpStmt::Kind::Assign;
      s.name = next().text;
      next();
      s.expr = expr();
    } else {
      s.kind = SlimpStmt::Kind::Expr;
      s.expr = expr();
    }
    return s;
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  Diagnostics& diags_;
  SlimpProgram& program_;
};

// -- validation --------------------------------------------------------------

const Expr::Call* hook_call(const ExprPtr& e, std::string_view hook) {
  if (!e) return nullptr;
  auto* c = e->as<Expr::Call>();
  return c && c->fname == hook ? c : nullptr;
}

std::optional<std::string> hook_label(const Expr::Call& c) {
  if (c.args.empty()) return std::nullopt;
  auto* lit = c.args[0]->as<Expr::Literal>();
  if (!lit || !lit->value.is_string()) return std::nullopt;
  return lit->value.as_string();
}

bool label_names(const std::string& label, const std::string& fname) {
  auto colon = label.find(':');
  return colon != std::string::npos && label.substr(colon + 1) == fname;
}

class Validator {
 public:
  explicit Validator(Diagnostics& diags) : diags_(diags) {}

  void function(const SlimpFunction& fn) {
    fn_ = &fn;
    pre_hooks_ = 0;
    returns_ = 0;
    block(fn.body, true);
    if (!fn.checked) return;
    if (pre_hooks_ == 0) {
      diags_.push_back(make_error("MISSING_PRE_HOOK", fn.span, "func " + fn.name + " has no pre_check at entry"));
    } else if (pre_hooks_ > 1) {
      diags_.push_back(make_error("DUPLICATE_PRE_HOOK", fn.span, "func " + fn.name + " calls pre_check " +
                                                                     std::to_string(pre_hooks_) + " times"));
    }
  }

  void block(const SlimpBlock& b, bool at_entry = false) {
    for (std::size_t i = 0; i < b.size(); ++i) statement(b[i], at_entry && i == 0);
  }

  void statement(const SlimpStmt& s, bool first_of_body) {
    if (s.kind == SlimpStmt::Kind::Expr) {
      if (auto* c = hook_call(s.expr, "pre_check")) {
        ++pre_hooks_;
        if (!fn_->checked) {
          diags_.push_back(make_error("HOOK_MISMATCH", s.span, "proc " + fn_->name + " has a pre_check"));
        } else if (!first_of_body) {
          diags_.push_back(make_error("PRE_HOOK_NOT_AT_ENTRY", s.span,
                                      "pre_check of " + fn_->name + " is not the first statement"));
        }
        check_label(*c, s.span);
        for (std::size_t i = 1; i < c->args.size(); ++i) expr(c->args[i], s.span);
        return;
      }
    }
    if (s.kind == SlimpStmt::Kind::Return && fn_->checked) {
      ++returns_;
      if (auto* c = hook_call(s.expr, "post_check")) {
        check_label(*c, s.span);
        if (c->args.size() < 2) {
          diags_.push_back(make_error("HOOK_MISMATCH", s.span, "post_check needs a label and a result"));
        }
        for (std::size_t i = 1; i < c->args.size(); ++i) expr(c->args[i], s.span);
      } else {
        diags_.push_back(make_error("MISSING_POST_HOOK", s.span,
                                    "return in func " + fn_->name + " does not go through post_check"));
        expr(s.expr, s.span);
      }
      return;
    }
    expr(s.expr, s.span);
    for (const auto& [subject, _] : s.matches) expr(subject, s.span);
    block(s.body);
    block(s.else_body);
  }

  void check_label(const Expr::Call& c, const SourceSpan& span) {
    auto label = hook_label(c);
    if (!label || !label_names(*label, fn_->name)) {
      diags_.push_back(make_error("HOOK_MISMATCH", span,
                                  c.fname + " in " + fn_->name + " must be labelled \"Class:" + fn_->name + "\""));
    }
  }

  void expr(const ExprPtr& e, const SourceSpan& span) {
    visit_expr(e, [&](const Expr& x) {
      if (x.as<Expr::Quantifier>()) {
        diags_.push_back(make_error("QUANTIFIER_IN_SKELETON", x.span.line ? x.span : span,
                                    "quantifiers must be written as loops"));
      }
      if (auto* c = x.as<Expr::Call>()) {
        if (c->fname == "pre_check") {
          diags_.push_back(make_error("PRE_HOOK_NOT_AT_ENTRY", span, "pre_check used inside an expression"));
        }
        if (c->fname == "post_check") {
          diags_.push_back(make_error("MISSING_POST_HOOK", span, "post_check used outside a return"));
        }
      }
    });
  }

 private:
  Diagnostics& diags_;
  const SlimpFunction* fn_ = nullptr;
  int pre_hooks_ = 0;
  int returns_ = 0;
};

}  // namespace

SlimpParseResult parse_slimp(const std::vector<std::pair<std::string, std::string>>& files) {
  SlimpParseResult out;
  for (const auto& [name, text] : files) {
    auto lexed = detail::lex(text, name, slimp_keywords());
    out.diags.insert(out.diags.end(), lexed.diags.begin(), lexed.diags.end());
    if (has_errors(lexed.diags)) continue;
    SlimpParser parser(lexed.tokens, out.diags, out.program);
    parser.file();
  }
  return out;
}

Diagnostics validate_emitted(const std::map<std::string, std::string>& files) {
  std::vector<std::pair<std::string, std::string>> list(files.begin(), files.end());
  auto parsed = parse_slimp(list);
  Diagnostics diags = parsed.diags;
  Validator v(diags);
  for (const auto& [_, fn] : parsed.program.functions) v.function(fn);
  if (parsed.ok() && !parsed.program.main) {
    SourceSpan span;
    diags.push_back(make_error("MISSING_MAIN", span, "no main block in the program"));
  }
  return diags;
}

// -- interpreter -------------------------------------------------------------

struct SlimpInterpreter::Frame {
  std::vector<std::map<std::string, Value>> scopes;
  std::string function;

  Value* lookup(const std::string& name) {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }
};

namespace {

struct ScopeGuard {
  std::vector<std::map<std::string, Value>>& scopes;
  explicit ScopeGuard(std::vector<std::map<std::string, Value>>& s) : scopes(s) { scopes.emplace_back(); }
  ~ScopeGuard() { scopes.pop_back(); }
};

[[noreturn]] void runtime_error(const std::string& code, const std::string& msg) { throw Error(code, msg); }

}  // namespace

SlimpInterpreter::SlimpInterpreter(const SlimpProgram& program, std::shared_ptr<const ClassHierarchy> hierarchy,
                                   HookSink* hooks, Limits limits)
    : program_(program), hierarchy_(std::move(hierarchy)), hooks_(hooks), limits_(limits) {}

Value SlimpInterpreter::call(const std::string& name, const ValueList& args) {
  auto it = program_.functions.find(name);
  if (it == program_.functions.end()) runtime_error("UNDEFINED_FUNCTION", "no skeleton function '" + name + "'");
  const SlimpFunction& fn = it->second;
  if (fn.params.size() != args.size()) {
    runtime_error("ARITY_MISMATCH", name + " takes " + std::to_string(fn.params.size()) + " argument(s), given " +
                                        std::to_string(args.size()));
  }
  if (depth_ >= limits_.max_depth) runtime_error("DEPTH_LIMIT", "call depth exceeds " + std::to_string(limits_.max_depth));
  ++depth_;
  ++calls_;
  struct Leave {
    std::size_t& d;
    ~Leave() { --d; }
  } leave{depth_};
  Frame frame;
  frame.function = name;
  frame.scopes.emplace_back();
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& p = fn.params[i];
    frame.scopes.back()[p.name] = p.type && hierarchy_ ? coerce(args[i], *p.type, *hierarchy_) : args[i];
  }
  Value returned;
  if (!exec(fn.body, frame, returned)) runtime_error("NO_RETURN", name + " ended without returning a value");
  return returned;
}

Value SlimpInterpreter::eval(const ExprPtr& e) {
  Frame frame;
  frame.function = "<entry>";
  frame.scopes.emplace_back();
  return eval(e, frame);
}

void SlimpInterpreter::run_main(std::ostream& out, const ExprPtr& entry) {
  out_ = &out;
  entry_ = entry;
  if (!program_.main) runtime_error("MISSING_MAIN", "no main block in the program");
  Frame frame;
  frame.function = "main";
  frame.scopes.emplace_back();
  Value ignored;
  exec(*program_.main, frame, ignored);
}

std::vector<Value> SlimpInterpreter::elements(const Value& v) {
  if (auto builtin = builtin_elements(v)) return *builtin;
  if (v.is_con() && hierarchy_) {
    std::string proc = "elements_" + hierarchy_->class_of_tag(v.tag());
    if (program_.functions.count(proc)) {
      Value seq = call(proc, {v});
      if (seq.is_seq()) return seq.items();
    }
  }
  runtime_error("NOT_TRAVERSABLE", "cannot iterate over " + to_text(v));
}

bool SlimpInterpreter::exec(const SlimpBlock& block, Frame& f, Value& returned) {
  ScopeGuard scope(f.scopes);
  for (const auto& s : block) {
    switch (s.kind) {
      case SlimpStmt::Kind::Var: {
        Value v;
        if (s.expr) {
          v = eval(s.expr, f);
          if (s.type && hierarchy_) v = coerce(v, *s.type, *hierarchy_);
        }
        f.scopes.back()[s.name] = std::move(v);
        break;
      }
      case SlimpStmt::Kind::Assign: {
        Value* slot = f.lookup(s.name);
        if (!slot) runtime_error("UNBOUND_VARIABLE", "assignment to undeclared '" + s.name + "' in " + f.function);
        *slot = eval(s.expr, f);
        break;
      }
      case SlimpStmt::Kind::For: {
        for (const auto& element : elements(eval(s.expr, f))) {
          ScopeGuard loop(f.scopes);
          f.scopes.back()[s.name] = element;
          if (exec(s.body, f, returned)) return true;
        }
        break;
      }
      case SlimpStmt::Kind::If: {
        Value c = eval(s.expr, f);
        if (!c.is_bool()) runtime_error("TYPE_ERROR", "if condition is not Bool in " + f.function);
        if (exec(c.as_bool() ? s.body : s.else_body, f, returned)) return true;
        break;
      }
      case SlimpStmt::Kind::When: {
        Bindings env;
        bool ok = true;
        for (const auto& [subject, pat] : s.matches) {
          if (!match_pattern(pat, eval(subject, f), env)) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
        ScopeGuard bound(f.scopes);
        for (auto& [name, v] : env) f.scopes.back()[name] = std::move(v);
        if (exec(s.body, f, returned)) return true;
        break;
      }
      case SlimpStmt::Kind::Return:
        returned = eval(s.expr, f);
        return true;
      case SlimpStmt::Kind::Fail:
        runtime_error(s.name, "'fail' reached in " + f.function);
      case SlimpStmt::Kind::Print: {
        Value v = eval(s.expr, f);
        if (out_) *out_ << to_text(v) << "\n";
        break;
      }
      case SlimpStmt::Kind::Expr:
        eval(s.expr, f);
        break;
    }
  }
  return false;
}

Value SlimpInterpreter::invoke(const std::string& name, ValueList args, Frame& f) {
  if (name == "pre_check" || name == "post_check") {
    if (args.empty() || !args[0].is_string()) runtime_error("HOOK_MISMATCH", name + " without a label");
    std::string label = args[0].as_string();
    if (name == "pre_check") {
      if (hooks_) hooks_->pre(label, ValueList(args.begin() + 1, args.end()));
      return Value::boolean(true);
    }
    if (args.size() < 2) runtime_error("HOOK_MISMATCH", "post_check without a result");
    Value result = args[1];
    if (!hooks_) return result;
    return hooks_->post(label, result, ValueList(args.begin() + 2, args.end()));
  }
  if (name == "cast") {
    if (args.size() != 2 || !args[1].is_string()) runtime_error("TYPE_ERROR", "cast(value, \"Class\")");
    return project_to_ancestor(args[0], args[1].as_string(), *hierarchy_);
  }
  if (name == "entry") {
    if (!entry_) runtime_error("NO_ENTRY", "entry() used without an entry expression");
    return eval(entry_, f);
  }
  if (program_.functions.count(name)) return call(name, args);
  if (is_builtin_function(name)) return apply_function(name, args);
  if (hierarchy_) {
    if (const ResolvedAlt* alt = hierarchy_->alternative(name)) {
      if (alt->labeled && alt->components.size() == 1 && alt->components[0].type.is_record &&
          alt->components[0].type.fields.size() == args.size() && !(args.size() == 1 && args[0].is_record())) {
        FieldList fields;
        for (std::size_t i = 0; i < args.size(); ++i) fields.emplace_back(alt->components[0].type.fields[i].first, args[i]);
        args = {Value::record(std::move(fields))};
      }
      return construct(name, std::move(args), *hierarchy_);
    }
  }
  runtime_error("UNDEFINED_FUNCTION", "undefined function '" + name + "' called from " + f.function);
}

Value SlimpInterpreter::eval(const ExprPtr& e, Frame& f) {
  auto values = [&](const std::vector<ExprPtr>& xs) {
    ValueList out;
    for (const auto& x : xs) out.push_back(eval(x, f));
    return out;
  };
  try {
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Expr::Literal>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, Expr::Var>) {
            if (Value* v = f.lookup(n.name)) return *v;
            runtime_error("UNBOUND_VARIABLE", "unbound name '" + n.name + "' in " + f.function);
          } else if constexpr (std::is_same_v<T, Expr::ResultVar>) {
            runtime_error("SYNTAX", "'Result' has no meaning in a skeleton");
          } else if constexpr (std::is_same_v<T, Expr::Construct>) {
            return construct(n.tag, values(n.args), *hierarchy_);
          } else if constexpr (std::is_same_v<T, Expr::Call>) {
            if (Value* v = f.lookup(n.fname); v && n.args.size() == 1) return seq_index(*v, eval(n.args[0], f));
            return invoke(n.fname, values(n.args), f);
          } else if constexpr (std::is_same_v<T, Expr::DottedCall>) {
            ValueList args{eval(n.receiver, f)};
            for (auto& a : values(n.args)) args.push_back(std::move(a));
            return invoke(n.fname, std::move(args), f);
          } else if constexpr (std::is_same_v<T, Expr::QualifiedCall>) {
            ValueList args{project_to_ancestor(eval(n.receiver, f), n.cls, *hierarchy_)};
            for (auto& a : values(n.args)) args.push_back(std::move(a));
            return invoke(n.fname, std::move(args), f);
          } else if constexpr (std::is_same_v<T, Expr::Logical>) {
            return apply_logical(n.op, values(n.operands));
          } else if constexpr (std::is_same_v<T, Expr::Binary>) {
            Value l = eval(n.lhs, f);
            Value r = eval(n.rhs, f);
            return apply_binary(n.op, l, r);
          } else if constexpr (std::is_same_v<T, Expr::Negate>) {
            return apply_negate(eval(n.operand, f));
          } else if constexpr (std::is_same_v<T, Expr::Quantifier>) {
            runtime_error("QUANTIFIER_IN_SKELETON", "quantifiers must be written as loops");
          } else if constexpr (std::is_same_v<T, Expr::RecordAccess>) {
            return record_field(eval(n.record, f), n.label);
          } else if constexpr (std::is_same_v<T, Expr::SeqIndex>) {
            Value s = eval(n.seq, f);
            return seq_index(s, eval(n.index, f));
          } else if constexpr (std::is_same_v<T, Expr::Range>) {
            Value lo = eval(n.lo, f);
            return make_range(lo, eval(n.hi, f), limits_);
          } else if constexpr (std::is_same_v<T, Expr::SeqLiteral>) {
            return Value::seq(values(n.elems));
          } else {
            FieldList fields;
            for (const auto& [label, x] : n.fields) fields.emplace_back(label, eval(x, f));
            return Value::record(std::move(fields));
          }
        },
        e->node);
  } catch (const Fail& failure) {
    throw Error("RUNTIME_FAIL", std::string(failure.what()) + " in " + f.function);
  }
}

}  // namespace slam
