#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slam/ast.hpp"
#include "slam/builtins.hpp"
#include "slam/diagnostic.hpp"
#include "slam/semantics.hpp"
#include "slam/value.hpp"

namespace slam {

/// Skeleton language (`.slimp`): the imperative programs produced by the
/// code generator and then edited by hand.
///
///     type Point = union { PointCartesian(Real, Real) | PointPolar(Real, Real) }
///     func CoordX(arg_1: Point) : Real {
///       pre_check("Point:CoordX", arg_1)
///       when arg_1 is PointCartesian(x, y) {
///         return post_check("Point:CoordX", x, arg_1)
///       }
///       fail "NO_APPLICABLE_RULE"
///     }
///     proc elements_Tree(v: Tree) : Seq(Elem) { ... }
///     main { print entry() }
///
/// Statements: `var x [: T] [:= e]`, `x := e`, `for x in e { }`,
/// `if e { } [else { }]`, `when e is pattern, ... { }`, `return e`,
/// `fail "CODE"`, `print e`, and call statements. Expressions are spec
/// expressions without quantifiers; `for` over a constructor value walks
/// the `elements_<Class>` procedure of its class.
///
/// `func` is a checked function: `pre_check("C:f", args...)` at entry and
/// every `return post_check("C:f", result, args...)`. `proc` is a helper
/// without hooks.

struct SlimpStmt;
using SlimpBlock = std::vector<SlimpStmt>;

struct SlimpStmt {
  enum class Kind { Var, Assign, For, If, When, Return, Fail, Print, Expr };
  Kind kind = Kind::Expr;
  SourceSpan span;
  std::string name;                 // Var/Assign/For variable, Fail code
  std::optional<TypeExpr> type;     // Var
  ExprPtr expr;                     // initializer, value, collection, condition
  std::vector<std::pair<ExprPtr, Pattern>> matches;  // When
  SlimpBlock body;
  SlimpBlock else_body;
};

struct SlimpParam {
  std::string name;
  std::optional<TypeExpr> type;
};

struct SlimpFunction {
  bool checked = true;  // func (hooks required) vs proc
  std::string name;
  std::vector<SlimpParam> params;
  std::optional<TypeExpr> result;
  SlimpBlock body;
  SourceSpan span;
};

struct SlimpProgram {
  std::map<std::string, SlimpFunction> functions;
  std::vector<std::string> types;  // declared layouts, by name
  std::optional<SlimpBlock> main;
};

struct SlimpParseResult {
  SlimpProgram program;
  Diagnostics diags;
  bool ok() const { return !has_errors(diags); }
};

/// Parses one or more files into a single program; DUPLICATE_FUNCTION when
/// two files define the same name.
SlimpParseResult parse_slimp(const std::vector<std::pair<std::string, std::string>>& files);

/// Structural check of emitted or hand-edited skeletons: they parse, and
/// every `func` has exactly one `pre_check` (its first statement) naming
/// itself, and every `return` goes through `post_check` naming itself.
/// Codes: SYNTAX, MISSING_PRE_HOOK, DUPLICATE_PRE_HOOK,
/// PRE_HOOK_NOT_AT_ENTRY, MISSING_POST_HOOK, HOOK_MISMATCH,
/// QUANTIFIER_IN_SKELETON, DUPLICATE_FUNCTION, MISSING_MAIN.
Diagnostics validate_emitted(const std::map<std::string, std::string>& files);

/// Receives the hook calls of a running skeleton.
class HookSink {
 public:
  virtual ~HookSink() = default;
  /// `function` is the `C:f` label. May throw PolicyAbort.
  virtual void pre(const std::string& function, const ValueList& args) = 0;
  /// Returns the result unchanged. May throw PolicyAbort.
  virtual Value post(const std::string& function, const Value& result, const ValueList& args) = 0;
};

/// Tree-walking interpreter for skeletons. Hooks may be null (stripped).
class SlimpInterpreter {
 public:
  SlimpInterpreter(const SlimpProgram& program, std::shared_ptr<const ClassHierarchy> hierarchy,
                   HookSink* hooks, Limits limits = {});

  /// Throws Error (runtime errors, `fail` statements) and PolicyAbort.
  Value call(const std::string& name, const ValueList& args);
  /// Evaluates a resolved expression whose calls go to skeleton functions.
  Value eval(const ExprPtr& e);
  /// Runs `main`; `entry()` inside it evaluates `entry`.
  void run_main(std::ostream& out, const ExprPtr& entry);

  std::size_t calls() const { return calls_; }

 private:
  struct Frame;
  Value eval(const ExprPtr& e, Frame& f);
  Value invoke(const std::string& name, ValueList args, Frame& f);
  bool exec(const SlimpBlock& block, Frame& f, Value& returned);
  std::vector<Value> elements(const Value& v);

  const SlimpProgram& program_;
  std::shared_ptr<const ClassHierarchy> hierarchy_;
  HookSink* hooks_;
  Limits limits_;
  std::ostream* out_ = nullptr;
  ExprPtr entry_;
  std::size_t depth_ = 0;
  std::size_t calls_ = 0;
};

}  // namespace slam
