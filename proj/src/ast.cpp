#include "slam/ast.hpp"

#include <algorithm>

namespace slam {

TypeExpr TypeExpr::named(std::string name, std::vector<TypeExpr> args) {
  TypeExpr t;
  t.name = std::move(name);
  t.args = std::move(args);
  return t;
}

TypeExpr TypeExpr::record(std::vector<std::pair<std::string, TypeExpr>> fields) {
  TypeExpr t;
  t.fields = std::move(fields);
  t.is_record = true;
  return t;
}

std::string to_string(const TypeExpr& t) {
  std::string out;
  if (t.is_record) {
    out += '{';
    for (std::size_t i = 0; i < t.fields.size(); ++i) {
      if (i) out += ", ";
      out += t.fields[i].first + ": " + to_string(t.fields[i].second);
    }
    out += '}';
    return out;
  }
  out = t.name;
  if (!t.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) out += ", ";
      out += to_string(t.args[i]);
    }
    out += ')';
  }
  return out;
}

bool is_primitive_type(std::string_view name) {
  return name == "Int" || name == "Nat" || name == "Real" || name == "Bool" ||
         name == "String" || name == "Seq" || name == "Range";
}

// ---------------------------------------------------------------------------

Pattern Pattern::var(std::string name, SourceSpan span) {
  return Pattern{Var{std::move(name)}, std::move(span)};
}
Pattern Pattern::wildcard(SourceSpan span) { return Pattern{Wildcard{}, std::move(span)}; }
Pattern Pattern::con(std::string tag, std::vector<Pattern> args, SourceSpan span) {
  return Pattern{Con{std::move(tag), std::move(args)}, std::move(span)};
}
Pattern Pattern::lit(Value v, SourceSpan span) { return Pattern{Lit{std::move(v)}, std::move(span)}; }
Pattern Pattern::record(std::vector<std::pair<std::string, Pattern>> fields, SourceSpan span) {
  return Pattern{Record{std::move(fields)}, std::move(span)};
}

bool same_structure(const Pattern& a, const Pattern& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* x = std::get_if<Pattern::Var>(&a.node)) {
    return x->name == std::get<Pattern::Var>(b.node).name;
  }
  if (std::holds_alternative<Pattern::Wildcard>(a.node)) return true;
  if (auto* x = std::get_if<Pattern::Con>(&a.node)) {
    const auto& y = std::get<Pattern::Con>(b.node);
    if (x->tag != y.tag || x->args.size() != y.args.size()) return false;
    for (std::size_t i = 0; i < x->args.size(); ++i) {
      if (!same_structure(x->args[i], y.args[i])) return false;
    }
    return true;
  }
  if (auto* x = std::get_if<Pattern::Lit>(&a.node)) {
    return x->value == std::get<Pattern::Lit>(b.node).value;
  }
  const auto& x = std::get<Pattern::Record>(a.node);
  const auto& y = std::get<Pattern::Record>(b.node);
  if (x.fields.size() != y.fields.size()) return false;
  for (std::size_t i = 0; i < x.fields.size(); ++i) {
    if (x.fields[i].first != y.fields[i].first) return false;
    if (!same_structure(x.fields[i].second, y.fields[i].second)) return false;
  }
  return true;
}

void pattern_variables(const Pattern& p, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Pattern::Var>) {
          out.push_back(n.name);
        } else if constexpr (std::is_same_v<T, Pattern::Con>) {
          for (const auto& a : n.args) pattern_variables(a, out);
        } else if constexpr (std::is_same_v<T, Pattern::Record>) {
          for (const auto& [_, a] : n.fields) pattern_variables(a, out);
        }
      },
      p.node);
}

// ---------------------------------------------------------------------------

std::string_view quantifier_keyword(QuantSymbol s) {
  switch (s) {
    case QuantSymbol::Exists: return "exists";
    case QuantSymbol::Forall: return "forall";
    case QuantSymbol::Sum: return "sum";
    case QuantSymbol::Product: return "product";
    case QuantSymbol::Count: return "count";
    case QuantSymbol::Select: return "select";
    case QuantSymbol::Max: return "max";
    case QuantSymbol::Maximizer: return "argmax";
    case QuantSymbol::Min: return "min";
    case QuantSymbol::Minimizer: return "argmin";
    case QuantSymbol::Filter: return "filter";
    case QuantSymbol::Map: return "map";
    case QuantSymbol::SeqCons: return "seqof";
  }
  return "?";
}

std::string_view quantifier_name(QuantSymbol s) {
  switch (s) {
    case QuantSymbol::Exists: return "exists";
    case QuantSymbol::Forall: return "forall";
    case QuantSymbol::Sum: return "sum";
    case QuantSymbol::Product: return "product";
    case QuantSymbol::Count: return "count";
    case QuantSymbol::Select: return "select";
    case QuantSymbol::Max: return "max";
    case QuantSymbol::Maximizer: return "maximizer";
    case QuantSymbol::Min: return "min";
    case QuantSymbol::Minimizer: return "minimizer";
    case QuantSymbol::Filter: return "filter";
    case QuantSymbol::Map: return "map";
    case QuantSymbol::SeqCons: return "seq";
  }
  return "?";
}

std::optional<QuantSymbol> quantifier_from_keyword(std::string_view kw) {
  for (QuantSymbol s : kAllQuantifiers) {
    if (quantifier_keyword(s) == kw) return s;
  }
  return std::nullopt;
}

std::string_view binary_op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
  }
  return "?";
}

bool is_relational(BinaryOp op) {
  return op == BinaryOp::Eq || op == BinaryOp::Ne || op == BinaryOp::Lt || op == BinaryOp::Le ||
         op == BinaryOp::Gt || op == BinaryOp::Ge;
}

ExprPtr make_expr(Expr::Node node, SourceSpan span) {
  return std::make_shared<const Expr>(Expr{std::move(node), std::move(span)});
}

namespace {

bool same_list(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_structure(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool same_structure(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Expr::Literal>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Expr::Var>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Expr::ResultVar>) {
          return true;
        } else if constexpr (std::is_same_v<T, Expr::Construct>) {
          return x.tag == y.tag && same_list(x.args, y.args);
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          return x.fname == y.fname && same_list(x.args, y.args);
        } else if constexpr (std::is_same_v<T, Expr::DottedCall>) {
          return x.fname == y.fname && same_structure(x.receiver, y.receiver) &&
                 same_list(x.args, y.args);
        } else if constexpr (std::is_same_v<T, Expr::QualifiedCall>) {
          return x.cls == y.cls && x.fname == y.fname && same_structure(x.receiver, y.receiver) &&
                 same_list(x.args, y.args);
        } else if constexpr (std::is_same_v<T, Expr::Logical>) {
          return x.op == y.op && same_list(x.operands, y.operands);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          return x.op == y.op && same_structure(x.lhs, y.lhs) && same_structure(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          return same_structure(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, Expr::Quantifier>) {
          return x.symbol == y.symbol && x.var == y.var &&
                 same_structure(x.collection, y.collection) &&
                 same_structure(x.filter, y.filter) && same_structure(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Expr::RecordAccess>) {
          return x.label == y.label && same_structure(x.record, y.record);
        } else if constexpr (std::is_same_v<T, Expr::SeqIndex>) {
          return same_structure(x.seq, y.seq) && same_structure(x.index, y.index);
        } else if constexpr (std::is_same_v<T, Expr::Range>) {
          return same_structure(x.lo, y.lo) && same_structure(x.hi, y.hi);
        } else if constexpr (std::is_same_v<T, Expr::SeqLiteral>) {
          return same_list(x.elems, y.elems);
        } else {
          if (x.fields.size() != y.fields.size()) return false;
          for (std::size_t i = 0; i < x.fields.size(); ++i) {
            if (x.fields[i].first != y.fields[i].first) return false;
            if (!same_structure(x.fields[i].second, y.fields[i].second)) return false;
          }
          return true;
        }
      },
      a->node);
}

bool mentions_result(const ExprPtr& e) {
  bool found = false;
  visit_expr(e, [&](const Expr& n) {
    if (n.as<Expr::ResultVar>()) found = true;
  });
  return found;
}

namespace {

void collect_free(const ExprPtr& e, std::vector<std::string>& bound, bool include_result,
                  std::vector<std::string>& out) {
  if (!e) return;
  auto add = [&](const std::string& name) {
    if (std::find(bound.begin(), bound.end(), name) != bound.end()) return;
    if (std::find(out.begin(), out.end(), name) != out.end()) return;
    out.push_back(name);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Var>) {
          add(n.name);
        } else if constexpr (std::is_same_v<T, Expr::ResultVar>) {
          if (include_result) add("Result");
        } else if constexpr (std::is_same_v<T, Expr::Construct> || std::is_same_v<T, Expr::Call>) {
          for (const auto& a : n.args) collect_free(a, bound, include_result, out);
        } else if constexpr (std::is_same_v<T, Expr::DottedCall> ||
                             std::is_same_v<T, Expr::QualifiedCall>) {
          collect_free(n.receiver, bound, include_result, out);
          for (const auto& a : n.args) collect_free(a, bound, include_result, out);
        } else if constexpr (std::is_same_v<T, Expr::Logical>) {
          for (const auto& a : n.operands) collect_free(a, bound, include_result, out);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          collect_free(n.lhs, bound, include_result, out);
          collect_free(n.rhs, bound, include_result, out);
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          collect_free(n.operand, bound, include_result, out);
        } else if constexpr (std::is_same_v<T, Expr::Quantifier>) {
          collect_free(n.collection, bound, include_result, out);
          bound.push_back(n.var);
          collect_free(n.filter, bound, include_result, out);
          collect_free(n.body, bound, include_result, out);
          bound.pop_back();
        } else if constexpr (std::is_same_v<T, Expr::RecordAccess>) {
          collect_free(n.record, bound, include_result, out);
        } else if constexpr (std::is_same_v<T, Expr::SeqIndex>) {
          collect_free(n.seq, bound, include_result, out);
          collect_free(n.index, bound, include_result, out);
        } else if constexpr (std::is_same_v<T, Expr::Range>) {
          collect_free(n.lo, bound, include_result, out);
          collect_free(n.hi, bound, include_result, out);
        } else if constexpr (std::is_same_v<T, Expr::SeqLiteral>) {
          for (const auto& a : n.elems) collect_free(a, bound, include_result, out);
        } else if constexpr (std::is_same_v<T, Expr::RecordLiteral>) {
          for (const auto& [_, a] : n.fields) collect_free(a, bound, include_result, out);
        }
      },
      e->node);
}

}  // namespace

std::vector<std::string> free_variables(const ExprPtr& e, bool include_result) {
  std::vector<std::string> bound, out;
  collect_free(e, bound, include_result, out);
  return out;
}

// ---------------------------------------------------------------------------

std::string_view op_kind_keyword(OpKind k) {
  switch (k) {
    case OpKind::Constructor: return "constructor";
    case OpKind::Observer: return "observer";
    case OpKind::Modifier: return "modifier";
    case OpKind::Friend: return "friend";
  }
  return "?";
}

std::string_view check_mode_name(CheckModeKind k) {
  switch (k) {
    case CheckModeKind::Full: return "full";
    case CheckModeKind::ConjunctOnly: return "conjunct_only";
    case CheckModeKind::Approximation: return "approximation";
  }
  return "?";
}

Condition Condition::full(ExprPtr e) {
  Condition c;
  c.checked_part = std::move(e);
  return c;
}

ExprPtr Condition::whole() const {
  switch (mode) {
    case CheckModeKind::Full: return checked_part;
    case CheckModeKind::ConjunctOnly:
      return make_expr(Expr::Logical{LogicalOp::And, {unchecked_part, checked_part}},
                       checked_part ? checked_part->span : SourceSpan{});
    case CheckModeKind::Approximation: return unchecked_part;
  }
  return checked_part;
}

namespace {

bool same_condition(const Condition& a, const Condition& b) {
  return a.mode == b.mode && same_structure(a.checked_part, b.checked_part) &&
         same_structure(a.unchecked_part, b.unchecked_part);
}

bool same_patterns(const std::vector<Pattern>& a, const std::vector<Pattern>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_structure(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool same_structure(const ClassDef& a, const ClassDef& b) {
  if (a.name != b.name || a.type_params != b.type_params || a.parents != b.parents) return false;
  if (a.alternatives.size() != b.alternatives.size()) return false;
  for (std::size_t i = 0; i < a.alternatives.size(); ++i) {
    const auto& x = a.alternatives[i];
    const auto& y = b.alternatives[i];
    if (x.tag != y.tag || x.labeled != y.labeled || x.components != y.components) return false;
  }
  if (a.op_decls.size() != b.op_decls.size()) return false;
  for (std::size_t i = 0; i < a.op_decls.size(); ++i) {
    const auto& x = a.op_decls[i];
    const auto& y = b.op_decls[i];
    if (x.kind != y.kind || x.name != y.name || x.arg_types != y.arg_types ||
        x.result_type != y.result_type) {
      return false;
    }
  }
  if (a.traversal_rules.size() != b.traversal_rules.size()) return false;
  for (std::size_t i = 0; i < a.traversal_rules.size(); ++i) {
    const auto& x = a.traversal_rules[i];
    const auto& y = b.traversal_rules[i];
    if (!same_structure(x.shape, y.shape) || !same_list(x.items, y.items)) return false;
  }
  if (a.rules.size() != b.rules.size()) return false;
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    const auto& x = a.rules[i];
    const auto& y = b.rules[i];
    if (x.cls != y.cls || x.fname != y.fname || x.receiver_form != y.receiver_form ||
        !same_patterns(x.args, y.args) || !same_condition(x.pre, y.pre) ||
        !same_condition(x.post, y.post) || !same_structure(x.sol, y.sol)) {
      return false;
    }
  }
  return true;
}

bool same_structure(const std::vector<ClassDef>& a, const std::vector<ClassDef>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_structure(a[i], b[i])) return false;
  }
  return true;
}

std::string qualify_tag(std::string_view cls, std::string_view tag) {
  std::string out(cls);
  out += tag;
  return out;
}

std::string synthetic_tag(std::string_view cls) { return "Mk" + std::string(cls); }

namespace {

ExprPtr solution_in(const ExprPtr& e) {
  if (!e) return nullptr;
  if (auto* b = e->as<Expr::Binary>(); b && b->op == BinaryOp::Eq) {
    if (b->lhs->as<Expr::ResultVar>() && !mentions_result(b->rhs)) return b->rhs;
    if (b->rhs->as<Expr::ResultVar>() && !mentions_result(b->lhs)) return b->lhs;
    return nullptr;
  }
  if (auto* l = e->as<Expr::Logical>(); l && l->op == LogicalOp::And) {
    for (const auto& operand : l->operands) {
      if (auto s = solution_in(operand)) return s;
    }
  }
  return nullptr;
}

}  // namespace

ExprPtr executable_solution(const FunctionRule& r) {
  if (r.sol) return r.sol;
  if (auto s = solution_in(r.post.checked_part)) return s;
  return solution_in(r.post.unchecked_part);
}

}  // namespace slam
