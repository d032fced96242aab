#include "slam/logic_ir.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

namespace slam {

Term Term::var(std::string name) {
  Term t;
  t.kind = Kind::Var;
  t.name = std::move(name);
  return t;
}

Term Term::constant(Value v) {
  Term t;
  t.kind = Kind::Const;
  t.value = std::move(v);
  return t;
}

Term Term::atom(std::string text) {
  Term t;
  t.kind = Kind::Atom;
  t.name = std::move(text);
  return t;
}

Term Term::con(std::string tag, std::vector<Term> args) {
  Term t;
  t.kind = Kind::Con;
  t.name = std::move(tag);
  t.args = std::move(args);
  return t;
}

Term Term::list(std::vector<Term> items) {
  Term t;
  t.kind = Kind::List;
  t.args = std::move(items);
  return t;
}

Term Term::record(std::vector<std::string> labels, std::vector<Term> args) {
  Term t;
  t.kind = Kind::Record;
  t.labels = std::move(labels);
  t.args = std::move(args);
  return t;
}

Goal Goal::call(std::string pred, std::vector<Term> args) {
  Goal g;
  g.kind = Kind::Call;
  g.name = std::move(pred);
  g.args = std::move(args);
  return g;
}

Goal Goal::builtin(std::string op, std::vector<Term> args) {
  Goal g;
  g.kind = Kind::Builtin;
  g.name = std::move(op);
  g.args = std::move(args);
  return g;
}

Goal Goal::eq(Term lhs, Term rhs) {
  Goal g;
  g.kind = Kind::Eq;
  g.lhs = std::move(lhs);
  g.rhs = std::move(rhs);
  return g;
}

Goal Goal::guard(Term t) {
  Goal g;
  g.kind = Kind::Guard;
  g.lhs = std::move(t);
  return g;
}

Goal Goal::build(Term out, Term structure) {
  Goal g;
  g.kind = Kind::Build;
  g.lhs = std::move(out);
  g.rhs = std::move(structure);
  return g;
}

std::string predicate_key(const std::string& name, std::size_t arity) {
  return name + "/" + std::to_string(arity);
}

const Predicate* LogicProgram::find(const std::string& name, std::size_t arity) const {
  auto it = predicates.find(predicate_key(name, arity));
  return it == predicates.end() ? nullptr : &it->second;
}

void LogicProgram::add_clause(const std::string& name, Clause clause) {
  std::size_t arity = clause.head.size();
  auto& pred = predicates[predicate_key(name, arity)];
  pred.name = name;
  pred.arity = arity;
  pred.clauses.push_back(std::move(clause));
}

std::string sol_pred(const std::string& fname) { return "sol-" + fname; }
std::string pre_pred(const std::string& fname) { return "pre-" + fname; }
std::string post_pred(const std::string& fname) { return "post-" + fname; }
std::string cast_pred(const std::string& cls) { return "to-" + cls; }
std::string read_pred(const TypeExpr& t) { return "read-" + to_string(t); }
std::string quantifier_pred(QuantSymbol s) { return "quan-" + std::string(quantifier_name(s)); }

namespace {

std::string_view binary_builtin(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "add";
    case BinaryOp::Sub: return "sub";
    case BinaryOp::Mul: return "mul";
    case BinaryOp::Div: return "div";
    case BinaryOp::Eq: return "eq";
    case BinaryOp::Ne: return "ne";
    case BinaryOp::Lt: return "lt";
    case BinaryOp::Le: return "le";
    case BinaryOp::Gt: return "gt";
    case BinaryOp::Ge: return "ge";
  }
  return "?";
}

std::string_view logical_builtin(LogicalOp op) {
  switch (op) {
    case LogicalOp::And: return "and";
    case LogicalOp::Or: return "or";
    case LogicalOp::Not: return "not";
    case LogicalOp::Implies: return "implies";
    case LogicalOp::Iff: return "iff";
  }
  return "?";
}

// Source variables become capitalized logic variables; names that would
// clash with the fixed ones get a prefix.
std::string logic_var(const std::string& source) {
  if (source.empty()) return "S_";
  std::string v = source;
  bool already_upper = std::isupper(static_cast<unsigned char>(v[0])) != 0 || v[0] == '_';
  v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
  if (already_upper || v == "Result" || v == "Pre" || v == "Post") return "S_" + source;
  return v;
}

Term pattern_term(const Pattern& p) {
  return std::visit(
      [&](const auto& n) -> Term {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Pattern::Var>) {
          return Term::var(logic_var(n.name));
        } else if constexpr (std::is_same_v<T, Pattern::Wildcard>) {
          return Term::var("_");
        } else if constexpr (std::is_same_v<T, Pattern::Lit>) {
          return Term::constant(n.value);
        } else if constexpr (std::is_same_v<T, Pattern::Con>) {
          std::vector<Term> args;
          for (const auto& a : n.args) args.push_back(pattern_term(a));
          return Term::con(n.tag, std::move(args));
        } else {
          std::vector<std::string> labels;
          std::vector<Term> args;
          for (const auto& [l, sub] : n.fields) {
            labels.push_back(l);
            args.push_back(pattern_term(sub));
          }
          return Term::record(std::move(labels), std::move(args));
        }
      },
      p.node);
}

class Translator {
 public:
  Translator(LogicProgram& prog, std::set<std::string>& cast_targets)
      : prog_(prog), cast_targets_(cast_targets) {}

  Term fresh() { return Term::var("_V" + std::to_string(++aux_)); }

  Term value_term(const ExprPtr& e, std::vector<Goal>& goals) {
    if (auto* lit = e->as<Expr::Literal>()) return Term::constant(lit->value);
    if (auto* v = e->as<Expr::Var>()) return Term::var(logic_var(v->name));
    if (e->as<Expr::ResultVar>()) return Term::var("Result");
    Term out = fresh();
    into(e, out, goals);
    return out;
  }

  std::vector<Term> values(const std::vector<ExprPtr>& es, std::vector<Goal>& goals) {
    std::vector<Term> out;
    for (const auto& e : es) out.push_back(value_term(e, goals));
    return out;
  }

  void call_function(const std::string& fname, std::vector<Term> args, const Term& out,
                     std::vector<Goal>& goals) {
    args.push_back(out);
    if (is_builtin_function(fname) && !prog_.hierarchy->is_function(fname)) {
      goals.push_back(Goal::builtin(fname, std::move(args)));
    } else {
      goals.push_back(Goal::call(sol_pred(fname), std::move(args)));
    }
  }

  void into(const ExprPtr& e, const Term& out, std::vector<Goal>& goals) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Expr::Literal>) {
            goals.push_back(Goal::eq(out, Term::constant(n.value)));
          } else if constexpr (std::is_same_v<T, Expr::Var>) {
            goals.push_back(Goal::eq(out, Term::var(logic_var(n.name))));
          } else if constexpr (std::is_same_v<T, Expr::ResultVar>) {
            goals.push_back(Goal::eq(out, Term::var("Result")));
          } else if constexpr (std::is_same_v<T, Expr::Construct>) {
            auto args = values(n.args, goals);
            goals.push_back(Goal::build(out, Term::con(n.tag, std::move(args))));
          } else if constexpr (std::is_same_v<T, Expr::Call>) {
            call_function(n.fname, values(n.args, goals), out, goals);
          } else if constexpr (std::is_same_v<T, Expr::DottedCall>) {
            std::vector<Term> args{value_term(n.receiver, goals)};
            for (auto& a : values(n.args, goals)) args.push_back(std::move(a));
            call_function(n.fname, std::move(args), out, goals);
          } else if constexpr (std::is_same_v<T, Expr::QualifiedCall>) {
            Term receiver = value_term(n.receiver, goals);
            Term cast = fresh();
            cast_targets_.insert(n.cls);
            goals.push_back(Goal::call(cast_pred(n.cls), {receiver, cast}));
            std::vector<Term> args{cast};
            for (auto& a : values(n.args, goals)) args.push_back(std::move(a));
            call_function(n.fname, std::move(args), out, goals);
          } else if constexpr (std::is_same_v<T, Expr::Logical>) {
            auto args = values(n.operands, goals);
            args.push_back(out);
            goals.push_back(Goal::builtin(std::string(logical_builtin(n.op)), std::move(args)));
          } else if constexpr (std::is_same_v<T, Expr::Binary>) {
            Term l = value_term(n.lhs, goals);
            Term r = value_term(n.rhs, goals);
            goals.push_back(Goal::builtin(std::string(binary_builtin(n.op)), {l, r, out}));
          } else if constexpr (std::is_same_v<T, Expr::Negate>) {
            Term x = value_term(n.operand, goals);
            goals.push_back(Goal::builtin("neg", {x, out}));
          } else if constexpr (std::is_same_v<T, Expr::Quantifier>) {
            quantifier(n, out, goals);
          } else if constexpr (std::is_same_v<T, Expr::RecordAccess>) {
            Term r = value_term(n.record, goals);
            goals.push_back(Goal::builtin("field", {r, Term::atom(n.label), out}));
          } else if constexpr (std::is_same_v<T, Expr::SeqIndex>) {
            Term s = value_term(n.seq, goals);
            Term i = value_term(n.index, goals);
            goals.push_back(Goal::builtin("index", {s, i, out}));
          } else if constexpr (std::is_same_v<T, Expr::Range>) {
            Term lo = value_term(n.lo, goals);
            Term hi = value_term(n.hi, goals);
            goals.push_back(Goal::builtin("range", {lo, hi, out}));
          } else if constexpr (std::is_same_v<T, Expr::SeqLiteral>) {
            goals.push_back(Goal::build(out, Term::list(values(n.elems, goals))));
          } else {
            std::vector<std::string> labels;
            std::vector<Term> args;
            for (const auto& [l, x] : n.fields) {
              labels.push_back(l);
              args.push_back(value_term(x, goals));
            }
            goals.push_back(Goal::build(out, Term::record(std::move(labels), std::move(args))));
          }
        },
        e->node);
  }

 private:
  void quantifier(const Expr::Quantifier& q, const Term& out, std::vector<Goal>& goals) {
    Term coll = value_term(q.collection, goals);
    int id = ++prog_.closure_counter;
    std::string base = quantifier_pred(q.symbol) + "-" + std::to_string(id);
    std::vector<std::string> captured;
    for (const ExprPtr& part : {q.filter, q.body}) {
      for (const auto& v : free_variables(part, true)) {
        if (v != q.var && std::find(captured.begin(), captured.end(), v) == captured.end()) {
          captured.push_back(v);
        }
      }
    }
    std::vector<Term> caps;
    for (const auto& v : captured) caps.push_back(Term::var(v == "Result" ? v : logic_var(v)));
    auto closure = [&](const std::string& name, const ExprPtr& part) {
      Translator inner(prog_, cast_targets_);
      Clause c;
      c.head = caps;
      c.head.push_back(Term::var(logic_var(q.var)));
      Term result = Term::var("_Out");
      c.head.push_back(result);
      inner.into(part, result, c.body);
      prog_.add_clause(name, std::move(c));
    };
    closure(base + "-filter", q.filter);
    closure(base + "-body", q.body);
    goals.push_back(Goal::call(quantifier_pred(q.symbol),
                               {coll, Term::con(base + "-filter", caps), Term::con(base + "-body", caps), out}));
  }

  LogicProgram& prog_;
  std::set<std::string>& cast_targets_;
  int aux_ = 0;
};

std::vector<Term> numbered_vars(const std::string& prefix, std::size_t from, std::size_t count) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(Term::var(prefix + std::to_string(from + i)));
  return out;
}

}  // namespace

LogicProgram translate(std::shared_ptr<const ClassHierarchy> hierarchy) {
  LogicProgram prog;
  prog.hierarchy = hierarchy;
  const ClassHierarchy& h = *hierarchy;
  std::set<std::string> cast_targets;

  // Iteration over built-in collections; class traversals add more `in` clauses.
  prog.add_clause("in", Clause{{Term::var("O"), Term::var("X")},
                               {Goal::builtin("first", {Term::var("O"), Term::var("X")})}});
  prog.add_clause("in", Clause{{Term::var("O"), Term::var("X")},
                               {Goal::builtin("next", {Term::var("O"), Term::var("O2")}),
                                Goal::builtin("inside", {Term::var("O2")}),
                                Goal::call("in", {Term::var("O2"), Term::var("X")})}});
  for (QuantSymbol s : kAllQuantifiers) {
    std::vector<Term> vars = {Term::var("D"), Term::var("F"), Term::var("B"), Term::var("R")};
    std::vector<Term> args = {Term::atom(std::string(quantifier_name(s)))};
    args.insert(args.end(), vars.begin(), vars.end());
    prog.add_clause(quantifier_pred(s), Clause{vars, {Goal::builtin("quantify", std::move(args))}});
  }

  for (const auto& [name, info] : h.classes) {
    for (const auto& a : info.ancestors) cast_targets.insert(a);
    for (const auto& tr : info.def.traversal_rules) {
      Term shape = pattern_term(tr.shape);
      for (std::size_t i = 0; i < tr.items.size(); ++i) {
        Translator t(prog, cast_targets);
        Clause c;
        c.head = {shape, Term::var("_X")};
        if (h.item_is_collection(name, tr, i)) {
          Term item = t.value_term(tr.items[i], c.body);
          c.body.push_back(Goal::call("in", {item, Term::var("_X")}));
        } else {
          t.into(tr.items[i], Term::var("_X"), c.body);
        }
        prog.add_clause("in", std::move(c));
      }
    }
  }

  std::set<std::string> fnames;
  for (const auto& [name, info] : h.classes) {
    for (const auto& r : info.def.rules) fnames.insert(r.fname);
  }

  std::map<std::string, TypeExpr> read_types;
  for (const auto& fname : fnames) {
    for (const auto& sig : h.functions.at(fname)) {
      std::vector<Term> args = numbered_vars("A", 1, sig.params.size());
      std::vector<Goal> reads;
      for (std::size_t i = 0; i < sig.params.size(); ++i) {
        read_types[to_string(sig.params[i])] = sig.params[i];
        reads.push_back(Goal::call(read_pred(sig.params[i]),
                                   {Term::constant(Value::integer(static_cast<std::int64_t>(i + 1))), args[i]}));
      }
      // a nullary pre clause already is its own wire entry
      if (!args.empty()) {
        Clause pre;
        pre.body = reads;
        pre.body.push_back(Goal::call(pre_pred(fname), args));
        prog.add_clause(pre_pred(fname), std::move(pre));
      }

      read_types[to_string(sig.result)] = sig.result;
      Clause post;
      post.body = reads;
      post.body.push_back(Goal::call(read_pred(sig.result),
                                     {Term::constant(Value::integer(static_cast<std::int64_t>(args.size() + 1))),
                                      Term::var("Result")}));
      std::vector<Term> post_args = args;
      post_args.push_back(Term::var("Result"));
      post.body.push_back(Goal::call(post_pred(fname), std::move(post_args)));
      prog.add_clause(post_pred(fname), std::move(post));
    }
  }
  for (const auto& [text, type] : read_types) {
    prog.add_clause(read_pred(type), Clause{{Term::var("K"), Term::var("V")},
                                            {Goal::builtin("wire_read", {Term::atom(text), Term::var("K"), Term::var("V")})}});
  }

  for (const auto& fname : fnames) {
    for (const auto& cand : h.sol_candidates(fname)) {
      if (cand.rule) {
        const FunctionRule& r = *cand.rule;
        std::vector<Term> pats;
        for (const auto& p : r.args) pats.push_back(pattern_term(p));
        {
          Translator t(prog, cast_targets);
          Clause c{pats, {}};
          t.into(r.pre.checked_part, Term::var("Pre"), c.body);
          c.body.push_back(Goal::guard(Term::var("Pre")));
          prog.add_clause(pre_pred(fname), std::move(c));
        }
        {
          Translator t(prog, cast_targets);
          Clause c{pats, {}};
          c.head.push_back(Term::var("Result"));
          t.into(r.post.checked_part, Term::var("Post"), c.body);
          c.body.push_back(Goal::guard(Term::var("Post")));
          prog.add_clause(post_pred(fname), std::move(c));
        }
        if (ExprPtr sol = executable_solution(r)) {
          Translator t(prog, cast_targets);
          Clause c{pats, {}};
          c.head.push_back(Term::var("Result"));
          t.into(sol, Term::var("Result"), c.body);
          prog.add_clause(sol_pred(fname), std::move(c));
        }
        continue;
      }
      // Forwarder from an heir alternative to the definer's rules.
      const FunctionSig* sig = h.signature(fname, cand.heir);
      const ResolvedAlt* heir = h.alternative(cand.heir_tag);
      const ResolvedAlt* definer = h.alternative(cand.definer_tag);
      std::vector<Term> comps = numbered_vars("A", 1, heir->components.size());
      std::vector<Term> rest = numbered_vars("B", 2, sig->params.size() - 1);
      for (const auto& mode : {pre_pred(fname), post_pred(fname), sol_pred(fname)}) {
        bool with_result = mode != pre_pred(fname);
        Clause c;
        c.head.push_back(Term::con(cand.heir_tag, comps));
        c.head.insert(c.head.end(), rest.begin(), rest.end());
        Term receiver;
        if (cand.truncation_only) {
          receiver = Term::con(cand.definer_tag,
                               std::vector<Term>(comps.begin(), comps.begin() + static_cast<long>(definer->components.size())));
        } else {
          c.body.push_back(Goal::build(Term::var("_V1"), Term::con(cand.heir_tag, comps)));
          c.body.push_back(Goal::call(cast_pred(cand.definer), {Term::var("_V1"), Term::var("_V2")}));
          cast_targets.insert(cand.definer);
          receiver = Term::var("_V2");
        }
        std::vector<Term> args{receiver};
        args.insert(args.end(), rest.begin(), rest.end());
        if (with_result) {
          c.head.push_back(Term::var("Result"));
          args.push_back(Term::var("Result"));
        }
        c.body.push_back(Goal::call(mode, std::move(args)));
        prog.add_clause(mode, std::move(c));
      }
    }
  }

  for (const auto& cls : cast_targets) {
    prog.add_clause(cast_pred(cls), Clause{{Term::var("O"), Term::var("P")},
                                           {Goal::builtin("cast", {Term::var("O"), Term::atom(cls), Term::var("P")})}});
  }
  return prog;
}

Query translate_query(const ExprPtr& expr, LogicProgram& program) {
  std::set<std::string> cast_targets;
  Translator t(program, cast_targets);
  Query q;
  q.result = t.value_term(expr, q.goals);
  for (const auto& cls : cast_targets) {
    if (!program.find(cast_pred(cls), 2)) {
      program.add_clause(cast_pred(cls), Clause{{Term::var("O"), Term::var("P")},
                                                {Goal::builtin("cast", {Term::var("O"), Term::atom(cls), Term::var("P")})}});
    }
  }
  return q;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool plain_atom(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool plain_functor(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string quoted(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

std::string atom_text(const std::string& s) { return plain_atom(s) ? s : quoted(s); }

std::string args_text(const std::vector<Term>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += print_term(args[i]);
  }
  return out;
}

std::string call_text(const std::string& name, const std::vector<Term>& args) {
  std::string out = atom_text(name);
  if (!args.empty()) out += "(" + args_text(args) + ")";
  return out;
}

}  // namespace

std::string print_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var: return t.name;
    case Term::Kind::Const: return to_text(t.value);
    case Term::Kind::Atom: return atom_text(t.name);
    case Term::Kind::Con: return (plain_functor(t.name) ? t.name : quoted(t.name)) + "(" + args_text(t.args) + ")";
    case Term::Kind::List: return "[" + args_text(t.args) + "]";
    case Term::Kind::Record: {
      std::string out = "{";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ", ";
        out += t.labels[i] + ": " + print_term(t.args[i]);
      }
      return out + "}";
    }
  }
  return "?";
}

std::string print_goal(const Goal& g) {
  switch (g.kind) {
    case Goal::Kind::Call:
    case Goal::Kind::Builtin: return call_text(g.name, g.args);
    case Goal::Kind::Eq: return print_term(g.lhs) + " = " + print_term(g.rhs);
    case Goal::Kind::Guard: return print_term(g.lhs) + " == true";
    case Goal::Kind::Build: return print_term(g.lhs) + " is " + print_term(g.rhs);
  }
  return "?";
}

std::string dump(const LogicProgram& program) {
  std::ostringstream os;
  for (const auto& [key, pred] : program.predicates) {
    os << "% " << key << "\n";
    for (const auto& c : pred.clauses) {
      os << call_text(pred.name, c.head);
      for (std::size_t i = 0; i < c.body.size(); ++i) os << (i ? ", " : " :- ") << print_goal(c.body[i]);
      os << ".\n";
    }
  }
  return os.str();
}

std::uint64_t fingerprint(const LogicProgram& program) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : dump(program)) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

}  // namespace slam
