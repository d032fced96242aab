#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "slam/diagnostic.hpp"
#include "slam/value.hpp"

namespace slam {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Type expression: a named type with arguments (`Seq(Bank)`, `Tree(Elem)`,
/// `Real`) or a record type (`{name: String, amount: Real}`).
struct TypeExpr {
  std::string name;  // empty for record types
  std::vector<TypeExpr> args;
  std::vector<std::pair<std::string, TypeExpr>> fields;
  bool is_record = false;

  static TypeExpr named(std::string name, std::vector<TypeExpr> args = {});
  static TypeExpr record(std::vector<std::pair<std::string, TypeExpr>> fields);

  bool operator==(const TypeExpr& other) const = default;
};

std::string to_string(const TypeExpr& t);

/// Names of the built-in types. `Nat` is an alias of `Int`.
bool is_primitive_type(std::string_view name);

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

struct Pattern {
  struct Var {
    std::string name;
  };
  struct Wildcard {};
  struct Con {
    std::string tag;  // unqualified after parsing, qualified after resolution
    std::vector<Pattern> args;
  };
  struct Lit {
    Value value;
  };
  struct Record {
    std::vector<std::pair<std::string, Pattern>> fields;
  };

  std::variant<Var, Wildcard, Con, Lit, Record> node;
  SourceSpan span;

  static Pattern var(std::string name, SourceSpan span = {});
  static Pattern wildcard(SourceSpan span = {});
  static Pattern con(std::string tag, std::vector<Pattern> args, SourceSpan span = {});
  static Pattern lit(Value v, SourceSpan span = {});
  static Pattern record(std::vector<std::pair<std::string, Pattern>> fields, SourceSpan span = {});
};

/// Span-insensitive structural equality.
bool same_structure(const Pattern& a, const Pattern& b);

/// Variables bound by the pattern, in left-to-right order (duplicates kept).
void pattern_variables(const Pattern& p, std::vector<std::string>& out);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class LogicalOp { And, Or, Not, Implies, Iff };
enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge };
enum class QuantSymbol {
  Exists,
  Forall,
  Sum,
  Product,
  Count,
  Select,
  Max,
  Maximizer,
  Min,
  Minimizer,
  Filter,
  Map,
  SeqCons
};

inline constexpr QuantSymbol kAllQuantifiers[] = {
    QuantSymbol::Exists, QuantSymbol::Forall,    QuantSymbol::Sum,     QuantSymbol::Product,
    QuantSymbol::Count,  QuantSymbol::Select,    QuantSymbol::Max,     QuantSymbol::Maximizer,
    QuantSymbol::Min,    QuantSymbol::Minimizer, QuantSymbol::Filter,  QuantSymbol::Map,
    QuantSymbol::SeqCons};

/// Surface keyword (`argmax`, `seqof`, ...).
std::string_view quantifier_keyword(QuantSymbol s);
/// Name used in predicate names (`quan-maximizer`, ...).
std::string_view quantifier_name(QuantSymbol s);
std::optional<QuantSymbol> quantifier_from_keyword(std::string_view kw);

std::string_view binary_op_symbol(BinaryOp op);
bool is_relational(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct Literal {
    Value value;
  };
  struct Var {
    std::string name;
  };
  struct ResultVar {};
  struct Construct {
    std::string tag;  // qualified
    std::vector<ExprPtr> args;
  };
  struct Call {
    std::string fname;
    std::vector<ExprPtr> args;
  };
  struct DottedCall {
    ExprPtr receiver;
    std::string fname;
    std::vector<ExprPtr> args;
  };
  struct QualifiedCall {
    ExprPtr receiver;
    std::string cls;
    std::string fname;
    std::vector<ExprPtr> args;
  };
  struct Logical {
    LogicalOp op;
    std::vector<ExprPtr> operands;
  };
  struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct Negate {
    ExprPtr operand;
  };
  struct Quantifier {
    QuantSymbol symbol;
    std::string var;
    ExprPtr collection;
    ExprPtr filter;
    ExprPtr body;
  };
  struct RecordAccess {
    ExprPtr record;
    std::string label;
  };
  struct SeqIndex {
    ExprPtr seq;
    ExprPtr index;
  };
  struct Range {
    ExprPtr lo;
    ExprPtr hi;
  };
  struct SeqLiteral {
    std::vector<ExprPtr> elems;
  };
  struct RecordLiteral {
    std::vector<std::pair<std::string, ExprPtr>> fields;
  };

  using Node = std::variant<Literal, Var, ResultVar, Construct, Call, DottedCall, QualifiedCall,
                            Logical, Binary, Negate, Quantifier, RecordAccess, SeqIndex, Range,
                            SeqLiteral, RecordLiteral>;

  Node node;
  SourceSpan span;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

ExprPtr make_expr(Expr::Node node, SourceSpan span = {});

bool same_structure(const ExprPtr& a, const ExprPtr& b);

/// True when `Result` occurs anywhere in the expression.
bool mentions_result(const ExprPtr& e);

/// Free variables in order of first occurrence (quantifier-bound variables
/// excluded; `Result` reported as "Result" when `include_result`).
std::vector<std::string> free_variables(const ExprPtr& e, bool include_result = false);

/// Visits every node, pre-order.
template <typename F>
void visit_expr(const ExprPtr& e, F&& f);

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct AttrComponent {
  std::optional<std::string> label;
  TypeExpr type;

  bool operator==(const AttrComponent&) const = default;
};

struct AttrConstructor {
  std::string tag;
  std::vector<AttrComponent> components;
  /// Written with `label`; the single component holds the record.
  bool labeled = false;
  SourceSpan span;
};

enum class OpKind { Constructor, Observer, Modifier, Friend };

std::string_view op_kind_keyword(OpKind k);

struct OpDecl {
  OpKind kind = OpKind::Friend;
  std::string name;
  std::vector<TypeExpr> arg_types;
  TypeExpr result_type;
  SourceSpan span;

  /// Receiver-first kinds take the declaring class as an implicit argument.
  bool has_receiver() const { return kind == OpKind::Observer || kind == OpKind::Modifier; }
};

enum class CheckModeKind { Full, ConjunctOnly, Approximation };

std::string_view check_mode_name(CheckModeKind k);

/// A pre/postcondition with its check annotation. For `ConjunctOnly` and
/// `Approximation` only `checked_part` is evaluated at run time.
struct Condition {
  CheckModeKind mode = CheckModeKind::Full;
  ExprPtr checked_part;
  ExprPtr unchecked_part;  // null when mode == Full

  static Condition full(ExprPtr e);
  /// The whole formula as written (`unchecked and checked` for
  /// ConjunctOnly, the unchecked formula for Approximation).
  ExprPtr whole() const;
};

struct FunctionRule {
  std::string cls;
  std::string fname;
  std::vector<Pattern> args;
  /// Call scheme written as `receiver.f(...)`.
  bool receiver_form = false;
  Condition pre;
  Condition post;
  ExprPtr sol;
  SourceSpan span;
};

struct TraversalRule {
  Pattern shape;
  std::vector<ExprPtr> items;
  SourceSpan span;
};

struct ClassDef {
  std::string name;
  std::vector<std::string> type_params;
  std::vector<std::string> parents;
  std::vector<AttrConstructor> alternatives;
  std::vector<TraversalRule> traversal_rules;
  std::vector<FunctionRule> rules;
  std::vector<OpDecl> op_decls;
  SourceSpan span;
};

bool same_structure(const ClassDef& a, const ClassDef& b);
bool same_structure(const std::vector<ClassDef>& a, const std::vector<ClassDef>& b);

/// Class-prefixed constructor name: (Point, Cartesian) -> PointCartesian.
std::string qualify_tag(std::string_view cls, std::string_view tag);

/// Synthetic tag given to an unlabeled single alternative.
std::string synthetic_tag(std::string_view cls);

/// The rule's solution: `sol` when present, otherwise the right-hand side of
/// a `Result = e` conjunct in the postcondition. Null when neither exists.
ExprPtr executable_solution(const FunctionRule& r);

// ---------------------------------------------------------------------------

template <typename F>
void visit_expr(const ExprPtr& e, F&& f) {
  if (!e) return;
  f(*e);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Construct> || std::is_same_v<T, Expr::Call>) {
          for (const auto& a : n.args) visit_expr(a, f);
        } else if constexpr (std::is_same_v<T, Expr::DottedCall> ||
                             std::is_same_v<T, Expr::QualifiedCall>) {
          visit_expr(n.receiver, f);
          for (const auto& a : n.args) visit_expr(a, f);
        } else if constexpr (std::is_same_v<T, Expr::Logical>) {
          for (const auto& a : n.operands) visit_expr(a, f);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          visit_expr(n.lhs, f);
          visit_expr(n.rhs, f);
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          visit_expr(n.operand, f);
        } else if constexpr (std::is_same_v<T, Expr::Quantifier>) {
          visit_expr(n.collection, f);
          visit_expr(n.filter, f);
          visit_expr(n.body, f);
        } else if constexpr (std::is_same_v<T, Expr::RecordAccess>) {
          visit_expr(n.record, f);
        } else if constexpr (std::is_same_v<T, Expr::SeqIndex>) {
          visit_expr(n.seq, f);
          visit_expr(n.index, f);
        } else if constexpr (std::is_same_v<T, Expr::Range>) {
          visit_expr(n.lo, f);
          visit_expr(n.hi, f);
        } else if constexpr (std::is_same_v<T, Expr::SeqLiteral>) {
          for (const auto& a : n.elems) visit_expr(a, f);
        } else if constexpr (std::is_same_v<T, Expr::RecordLiteral>) {
          for (const auto& [_, a] : n.fields) visit_expr(a, f);
        }
      },
      e->node);
}

}  // namespace slam
