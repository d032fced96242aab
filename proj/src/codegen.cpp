#include "slam/codegen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "slam/parser.hpp"

namespace slam {

namespace {

ExprPtr var(std::string name) { return make_expr(Expr::Var{std::move(name)}); }
ExprPtr lit(Value v) { return make_expr(Expr::Literal{std::move(v)}); }
ExprPtr binary(BinaryOp op, ExprPtr l, ExprPtr r) { return make_expr(Expr::Binary{op, std::move(l), std::move(r)}); }
ExprPtr logical(LogicalOp op, std::vector<ExprPtr> xs) { return make_expr(Expr::Logical{op, std::move(xs)}); }
ExprPtr call(std::string f, std::vector<ExprPtr> args) { return make_expr(Expr::Call{std::move(f), std::move(args)}); }

bool is_true_literal(const ExprPtr& e) {
  auto* l = e->as<Expr::Literal>();
  return l && l->value.is_bool() && l->value.as_bool();
}

class Writer {
 public:
  void line(const std::string& text) { os_ << std::string(2 * indent_, ' ') << text << "\n"; }
  void open(const std::string& text) {
    line(text + " {");
    ++indent_;
  }
  void close() {
    --indent_;
    line("}");
  }
  void blank() { os_ << "\n"; }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  int indent_ = 0;
};

// Rewrites a resolved spec expression into skeleton form, emitting the
// loops that compute its quantifiers first.
class Lowering {
 public:
  explicit Lowering(Writer& w) : w_(w) {}

  ExprPtr lower(const ExprPtr& e) {
    return std::visit(
        [&](const auto& n) -> ExprPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Expr::Construct>) {
            return make_expr(Expr::Construct{n.tag, list(n.args)}, e->span);
          } else if constexpr (std::is_same_v<T, Expr::Call>) {
            return call(n.fname, list(n.args));
          } else if constexpr (std::is_same_v<T, Expr::DottedCall>) {
            std::vector<ExprPtr> args{lower(n.receiver)};
            for (auto& a : list(n.args)) args.push_back(std::move(a));
            return call(n.fname, std::move(args));
          } else if constexpr (std::is_same_v<T, Expr::QualifiedCall>) {
            std::vector<ExprPtr> args{call("cast", {lower(n.receiver), lit(Value::string(n.cls))})};
            for (auto& a : list(n.args)) args.push_back(std::move(a));
            return call(n.fname, std::move(args));
          } else if constexpr (std::is_same_v<T, Expr::Logical>) {
            return logical(n.op, list(n.operands));
          } else if constexpr (std::is_same_v<T, Expr::Binary>) {
            ExprPtr l = lower(n.lhs);
            return binary(n.op, l, lower(n.rhs));
          } else if constexpr (std::is_same_v<T, Expr::Negate>) {
            return make_expr(Expr::Negate{lower(n.operand)});
          } else if constexpr (std::is_same_v<T, Expr::Quantifier>) {
            return quantifier(n);
          } else if constexpr (std::is_same_v<T, Expr::RecordAccess>) {
            return make_expr(Expr::RecordAccess{lower(n.record), n.label});
          } else if constexpr (std::is_same_v<T, Expr::SeqIndex>) {
            ExprPtr s = lower(n.seq);
            return make_expr(Expr::SeqIndex{s, lower(n.index)});
          } else if constexpr (std::is_same_v<T, Expr::Range>) {
            ExprPtr lo = lower(n.lo);
            return make_expr(Expr::Range{lo, lower(n.hi)});
          } else if constexpr (std::is_same_v<T, Expr::SeqLiteral>) {
            return make_expr(Expr::SeqLiteral{list(n.elems)});
          } else if constexpr (std::is_same_v<T, Expr::RecordLiteral>) {
            std::vector<std::pair<std::string, ExprPtr>> fields;
            for (const auto& [label, x] : n.fields) fields.emplace_back(label, lower(x));
            return make_expr(Expr::RecordLiteral{std::move(fields)});
          } else {
            return e;
          }
        },
        e->node);
  }

 private:
  std::vector<ExprPtr> list(const std::vector<ExprPtr>& xs) {
    std::vector<ExprPtr> out;
    for (const auto& x : xs) out.push_back(lower(x));
    return out;
  }

  std::string fresh(const char* prefix) { return std::string(prefix) + std::to_string(++counter_); }

  void assign(const std::string& name, const ExprPtr& value) { w_.line(name + " := " + print_expr(value)); }

  ExprPtr quantifier(const Expr::Quantifier& q) {
    const std::string acc = fresh("q_");
    std::string found;
    std::string best;
    auto seed = [&](const char* text) { w_.line("var " + acc + " := " + text); };
    switch (q.symbol) {
      case QuantSymbol::Exists: seed("false"); break;
      case QuantSymbol::Forall: seed("true"); break;
      case QuantSymbol::Sum:
      case QuantSymbol::Count: seed("0"); break;
      case QuantSymbol::Product: seed("1"); break;
      case QuantSymbol::Filter:
      case QuantSymbol::Map:
      case QuantSymbol::SeqCons: seed("[]"); break;
      case QuantSymbol::Maximizer:
      case QuantSymbol::Minimizer:
        best = fresh("best_");
        w_.line("var " + best);
        [[fallthrough]];
      default:
        w_.line("var " + acc);
        found = fresh("found_");
        w_.line("var " + found + " := false");
    }
    ExprPtr collection = lower(q.collection);
    w_.open("for " + q.var + " in " + print_expr(collection));
    bool filtered = !is_true_literal(q.filter);
    if (filtered) w_.open("if " + print_expr(lower(q.filter)));
    ExprPtr body = lower(q.body);
    ExprPtr a = var(acc);
    ExprPtr x = var(q.var);
    switch (q.symbol) {
      case QuantSymbol::Exists: assign(acc, logical(LogicalOp::Or, {a, body})); break;
      case QuantSymbol::Forall: assign(acc, logical(LogicalOp::And, {a, body})); break;
      case QuantSymbol::Sum: assign(acc, binary(BinaryOp::Add, a, body)); break;
      case QuantSymbol::Product: assign(acc, binary(BinaryOp::Mul, a, body)); break;
      case QuantSymbol::Count:
        w_.open("if " + print_expr(body));
        assign(acc, binary(BinaryOp::Add, a, lit(Value::integer(1))));
        w_.close();
        break;
      case QuantSymbol::Select:
        w_.open("if " + print_expr(logical(LogicalOp::And, {logical(LogicalOp::Not, {var(found)}), body})));
        assign(acc, x);
        w_.line(found + " := true");
        w_.close();
        break;
      case QuantSymbol::Max:
      case QuantSymbol::Min: {
        std::string v = fresh("v_");
        w_.line("var " + v + " := " + print_expr(body));
        BinaryOp better = q.symbol == QuantSymbol::Max ? BinaryOp::Gt : BinaryOp::Lt;
        w_.open("if " + found);
        w_.open("if " + print_expr(binary(better, var(v), a)));
        w_.line(acc + " := " + v);
        w_.close();
        w_.close();
        w_.open("else");
        w_.line(acc + " := " + v);
        w_.line(found + " := true");
        w_.close();
        break;
      }
      case QuantSymbol::Maximizer:
      case QuantSymbol::Minimizer: {
        std::string v = fresh("v_");
        w_.line("var " + v + " := " + print_expr(body));
        BinaryOp better = q.symbol == QuantSymbol::Maximizer ? BinaryOp::Gt : BinaryOp::Lt;
        w_.open("if " + found);
        w_.open("if " + print_expr(binary(better, var(v), var(best))));
        w_.line(best + " := " + v);
        w_.line(acc + " := " + q.var);
        w_.close();
        w_.close();
        w_.open("else");
        w_.line(best + " := " + v);
        w_.line(acc + " := " + q.var);
        w_.line(found + " := true");
        w_.close();
        break;
      }
      case QuantSymbol::Filter:
        w_.open("if " + print_expr(logical(LogicalOp::Not, {body})));
        assign(acc, call("concat", {a, make_expr(Expr::SeqLiteral{{x}})}));
        w_.close();
        break;
      case QuantSymbol::Map:
      case QuantSymbol::SeqCons:
        assign(acc, call("concat", {a, make_expr(Expr::SeqLiteral{{body}})}));
        break;
    }
    if (filtered) w_.close();
    w_.close();
    if (!found.empty()) {
      w_.open("if not " + found);
      w_.line(q.symbol == QuantSymbol::Select ? "fail \"NO_SELECTION\"" : "fail \"EMPTY_EXTREMUM\"");
      w_.close();
    }
    return a;
  }

  Writer& w_;
  int counter_ = 0;
};

std::string type_layout(const ClassInfo& info) {
  std::string out = "type " + info.def.name + " = " + (info.alts.size() == 1 ? "record" : "union") + " { ";
  for (std::size_t i = 0; i < info.alts.size(); ++i) {
    const auto& alt = info.alts[i];
    if (i) out += " | ";
    out += alt.qualified + "(";
    for (std::size_t j = 0; j < alt.components.size(); ++j) {
      if (j) out += ", ";
      out += to_string(alt.components[j].type);
    }
    out += ")";
  }
  return out + " }";
}

void emit_elements(Writer& w, const ClassHierarchy& h, const ClassInfo& info) {
  const std::string& cls = info.def.name;
  w.open("proc elements_" + cls + "(v: " + to_string(info.self_type()) + ")");
  w.line("var out := []");
  for (const auto& tr : info.def.traversal_rules) {
    if (tr.items.empty()) continue;
    w.open("when v is " + print_pattern(tr.shape));
    for (std::size_t i = 0; i < tr.items.size(); ++i) {
      std::string item = print_expr(Lowering(w).lower(tr.items[i]));
      if (h.item_is_collection(cls, tr, i)) {
        w.open("for e in " + item);
        w.line("out := concat(out, [e])");
        w.close();
      } else {
        w.line("out := concat(out, [" + item + "])");
      }
    }
    w.close();
  }
  w.line("return out");
  w.close();
}

// `overloaded`: the name is declared by unrelated classes, so the
// parameters stay untyped and the rules of every class are tried.
void emit_function(Writer& w, const ClassHierarchy& h, const FunctionSig& sig, bool overloaded) {
  const std::string& fname = sig.decl.name;
  const std::string label = "\"" + sig.cls + ":" + fname + "\"";
  std::vector<std::string> params;
  std::string header = "func " + fname + "(";
  for (std::size_t i = 0; i < sig.params.size(); ++i) {
    params.push_back("arg_" + std::to_string(i + 1));
    header += (i ? ", " : "") + params.back();
    if (!overloaded) header += ": " + to_string(sig.params[i]);
  }
  header += ")";
  if (!overloaded) header += " : " + to_string(sig.result);
  std::string arg_list;
  for (const auto& p : params) arg_list += ", " + p;

  auto candidates = h.sol_candidates(fname);
  bool any_executable = false;
  for (const auto& c : candidates) any_executable = any_executable || !c.rule || executable_solution(*c.rule);

  w.open(header);
  w.line("pre_check(" + label + arg_list + ")");
  if (!any_executable) {
    w.line("fail \"NOT_EXECUTABLE\"");
    w.close();
    return;
  }
  for (const auto& cand : candidates) {
    if (cand.rule) {
      const FunctionRule& r = *cand.rule;
      ExprPtr sol = executable_solution(r);
      if (!sol) {
        w.line("// rule at " + r.span.to_string() + " has no executable solution");
        continue;
      }
      if (r.args.size() != params.size()) continue;
      std::string matches;
      for (std::size_t i = 0; i < params.size(); ++i) {
        matches += (i ? ", " : "") + params[i] + " is " + print_pattern(r.args[i]);
      }
      if (!params.empty()) w.open("when " + matches);
      ExprPtr value = Lowering(w).lower(sol);
      w.line("return post_check(" + label + ", " + print_expr(value) + arg_list + ")");
      if (!params.empty()) w.close();
    } else {
      const ResolvedAlt* alt = h.alternative(cand.heir_tag);
      if (!alt || params.empty()) continue;
      std::string wildcards;
      for (std::size_t i = 0; i < alt->components.size(); ++i) wildcards += i ? ", _" : "_";
      w.open("when " + params[0] + " is " + cand.heir_tag + "(" + wildcards + ")");
      std::string forwarded = fname + "(cast(" + params[0] + ", \"" + cand.definer + "\")";
      for (std::size_t i = 1; i < params.size(); ++i) forwarded += ", " + params[i];
      forwarded += ")";
      w.line("return post_check(" + label + ", " + forwarded + arg_list + ")");
      w.close();
    }
  }
  w.line("fail \"NO_APPLICABLE_RULE\"");
  w.close();
}

}  // namespace

EmittedFiles emit_program(const Spec& spec) {
  EmittedFiles files;
  if (spec.ok()) {
    const ClassHierarchy& h = *spec.hierarchy;
    std::set<std::string> emitted;
    for (const auto& [name, info] : h.classes) {
      Writer w;
      w.line("// " + name);
      w.line(type_layout(info));
      if (!info.def.traversal_rules.empty()) {
        w.blank();
        emit_elements(w, h, info);
      }
      for (const auto& [fname, sigs] : h.functions) {
        if (sigs.empty() || sigs.front().cls != name || !emitted.insert(fname).second) continue;
        w.blank();
        bool overloaded = std::any_of(sigs.begin(), sigs.end(), [&](const FunctionSig& s) {
          return !h.is_descendant(s.cls, sigs.front().cls);
        });
        emit_function(w, h, sigs.front(), overloaded);
      }
      files[name + ".slimp"] = w.str();
    }
  }
  files["main.slimp"] =
      "// slamc run <spec> <dir> '<expression>' prints the value of the expression\n"
      "main {\n"
      "  print entry()\n"
      "}\n";
  return files;
}

}  // namespace slam
