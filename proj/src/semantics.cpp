#include "slam/semantics.hpp"

#include <algorithm>
#include <functional>

namespace slam {

namespace {

const std::map<std::string, std::size_t, std::less<>>& builtin_arities() {
  static const std::map<std::string, std::size_t, std::less<>> table = {
      {"length", 1}, {"concat", 2}, {"tail", 1}, {"sqrt", 1},
      {"abs", 1},    {"sin", 1},    {"cos", 1}};
  return table;
}

TypeExpr named(std::string n, std::vector<TypeExpr> args = {}) {
  return TypeExpr::named(std::move(n), std::move(args));
}

bool is_named(const TypeExpr& t, std::string_view n) { return !t.is_record && t.name == n; }

// Replaces the class's type parameters by the arguments of `actual`.
TypeExpr subst_params(const TypeExpr& t, const ClassInfo& cls, const TypeExpr* actual) {
  if (!actual || actual->is_record || actual->args.size() != cls.def.type_params.size()) return t;
  std::function<TypeExpr(const TypeExpr&)> go = [&](const TypeExpr& x) -> TypeExpr {
    if (x.is_record) {
      std::vector<std::pair<std::string, TypeExpr>> fields;
      for (const auto& [l, ft] : x.fields) fields.emplace_back(l, go(ft));
      return TypeExpr::record(std::move(fields));
    }
    if (x.args.empty()) {
      for (std::size_t i = 0; i < cls.def.type_params.size(); ++i) {
        if (cls.def.type_params[i] == x.name) return actual->args[i];
      }
    }
    std::vector<TypeExpr> args;
    for (const auto& a : x.args) args.push_back(go(a));
    return named(x.name, std::move(args));
  };
  return go(t);
}

}  // namespace

bool is_builtin_function(std::string_view name) { return builtin_arities().count(name) > 0; }

// ---------------------------------------------------------------------------
// ClassInfo / ClassHierarchy queries

const ResolvedAlt* ClassInfo::alt(std::string_view tag) const {
  for (const auto& a : alts) {
    if (a.tag == tag) return &a;
  }
  return nullptr;
}

TypeExpr ClassInfo::self_type() const {
  std::vector<TypeExpr> args;
  for (const auto& p : def.type_params) args.push_back(named(p));
  return named(def.name, std::move(args));
}

const ClassInfo* ClassHierarchy::find(std::string_view name) const {
  auto it = classes.find(std::string(name));
  return it == classes.end() ? nullptr : &it->second;
}

bool ClassHierarchy::is_descendant(std::string_view cls, std::string_view ancestor) const {
  if (cls == ancestor) return true;
  const ClassInfo* c = find(cls);
  if (!c) return false;
  return std::find(c->ancestors.begin(), c->ancestors.end(), ancestor) != c->ancestors.end();
}

const ResolvedAlt* ClassHierarchy::alternative(std::string_view qualified) const {
  auto it = tags.find(std::string(qualified));
  if (it == tags.end()) return nullptr;
  return &classes.at(it->second.first).alts.at(it->second.second);
}

std::string ClassHierarchy::class_of_tag(std::string_view qualified) const {
  auto it = tags.find(std::string(qualified));
  return it == tags.end() ? std::string() : it->second.first;
}

const FunctionSig* ClassHierarchy::signature(std::string_view fname,
                                             std::string_view receiver_class) const {
  auto it = functions.find(std::string(fname));
  if (it == functions.end() || it->second.empty()) return nullptr;
  if (!receiver_class.empty()) {
    for (const auto& sig : it->second) {
      if (is_descendant(receiver_class, sig.cls)) return &sig;
    }
  }
  return &it->second.front();
}

std::vector<const FunctionRule*> ClassHierarchy::rules_for(std::string_view fname) const {
  std::vector<const FunctionRule*> out;
  for (const auto& [_, info] : classes) {
    for (const auto& r : info.def.rules) {
      if (r.fname == fname) out.push_back(&r);
    }
  }
  return out;
}

std::vector<SolCandidate> ClassHierarchy::sol_candidates(std::string_view fname) const {
  std::vector<SolCandidate> out;
  for (const FunctionRule* r : rules_for(fname)) {
    SolCandidate c;
    c.rule = r;
    out.push_back(std::move(c));
  }
  for (const auto& [cname, info] : classes) {
    if (!missing.count({std::string(fname), cname})) continue;
    const std::string& definer = dispatch.at({std::string(fname), cname});
    const ClassInfo* def = find(definer);
    for (const auto& a : info.alts) {
      const ResolvedAlt* target = def->alt(a.tag);
      if (!target) continue;
      SolCandidate c;
      c.heir = cname;
      c.heir_tag = a.qualified;
      c.definer = definer;
      c.definer_tag = target->qualified;
      for (std::size_t i = 0; i < target->components.size(); ++i) {
        if (!(a.components[i].type == target->components[i].type)) c.truncation_only = false;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

bool ClassHierarchy::is_type_variable(const TypeExpr& t) const {
  return !t.is_record && t.args.empty() && !is_primitive_type(t.name) && !find(t.name);
}

bool ClassHierarchy::is_traversable(const TypeExpr& t) const {
  if (t.is_record) return false;
  if (t.name == "Seq" || t.name == "Range" || t.name == "String") return true;
  const ClassInfo* c = find(t.name);
  return c && c->traversable();
}

bool ClassHierarchy::conforms(const TypeExpr& a, const TypeExpr& b) const {
  if (is_type_variable(a) || is_type_variable(b)) return true;
  if (a.is_record || b.is_record) {
    if (!(a.is_record && b.is_record) || a.fields.size() != b.fields.size()) return false;
    for (const auto& [label, bt] : b.fields) {
      auto it = std::find_if(a.fields.begin(), a.fields.end(),
                             [&](const auto& f) { return f.first == label; });
      if (it == a.fields.end() || !conforms(it->second, bt)) return false;
    }
    return true;
  }
  auto canon = [](const std::string& n) { return n == "Nat" ? std::string("Int") : n; };
  std::string an = canon(a.name), bn = canon(b.name);
  if (an == bn) {
    if (a.args.size() != b.args.size()) return true;  // one side lacks type arguments
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (!conforms(a.args[i], b.args[i])) return false;
    }
    return true;
  }
  if (an == "Int" && bn == "Real") return true;
  if (an == "Range" && bn == "Seq") return b.args.empty() || conforms(named("Int"), b.args[0]);
  if (find(an) && find(bn)) return is_descendant(an, bn);
  // A class whose only alternative wraps a single component accepts that component.
  if (const ClassInfo* c = find(bn); c && c->alts.size() == 1 && c->alts[0].components.size() == 1) {
    return conforms(a, c->alts[0].components[0].type);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Patterns

bool match_pattern(const Pattern& p, const Value& v, Bindings& env) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Pattern::Var>) {
          auto [it, inserted] = env.emplace(n.name, v);
          return inserted || equivalent(it->second, v);
        } else if constexpr (std::is_same_v<T, Pattern::Wildcard>) {
          return true;
        } else if constexpr (std::is_same_v<T, Pattern::Lit>) {
          return equivalent(n.value, v);
        } else if constexpr (std::is_same_v<T, Pattern::Con>) {
          if (!v.is_con() || v.tag() != n.tag || v.args().size() != n.args.size()) return false;
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (!match_pattern(n.args[i], v.args()[i], env)) return false;
          }
          return true;
        } else {
          if (!v.is_record()) return false;
          for (const auto& [label, sub] : n.fields) {
            const Value* f = v.field(label);
            if (!f || !match_pattern(sub, *f, env)) return false;
          }
          return true;
        }
      },
      p.node);
}

const FunctionRule* ClassHierarchy::first_matching_rule(std::string_view fname,
                                                        const ValueList& args) const {
  for (const auto& cand : sol_candidates(fname)) {
    if (cand.rule) {
      if (cand.rule->args.size() != args.size()) continue;
      Bindings env;
      bool ok = true;
      for (std::size_t i = 0; ok && i < args.size(); ++i) ok = match_pattern(cand.rule->args[i], args[i], env);
      if (ok) return cand.rule;
    } else if (!args.empty() && args[0].is_con() && args[0].tag() == cand.heir_tag) {
      ValueList projected = args;
      projected[0] = project_to_ancestor(args[0], cand.definer, *this);
      if (const FunctionRule* r = first_matching_rule(fname, projected)) return r;
    }
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Types of expressions

namespace {

using TypeEnv = std::map<std::string, TypeExpr>;

class Typer {
 public:
  Typer(const ClassHierarchy& h, Diagnostics* diags) : h_(h), diags_(diags) {}

  std::optional<TypeExpr> infer(const ExprPtr& e, TypeEnv& env) {
    if (!e) return std::nullopt;
    return std::visit([&](const auto& n) { return node(n, *e, env); }, e->node);
  }

  void expect_bool(const ExprPtr& e, TypeEnv& env, const char* what) {
    auto t = infer(e, env);
    if (t && !h_.is_type_variable(*t) && !is_named(*t, "Bool")) {
      report(e->span, "NOT_BOOLEAN", std::string(what) + " has type " + to_string(*t) + ", expected Bool");
    }
  }

  // Variables bound by a pattern matched against a value of type t.
  void bind_pattern(const Pattern& p, const std::optional<TypeExpr>& t, TypeEnv& env) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Pattern::Var>) {
            if (t) env[n.name] = *t;
          } else if constexpr (std::is_same_v<T, Pattern::Con>) {
            const ResolvedAlt* alt = h_.alternative(n.tag);
            const ClassInfo* cls = alt ? h_.find(alt->cls) : nullptr;
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              std::optional<TypeExpr> ct;
              if (alt && i < alt->components.size()) {
                ct = subst_params(alt->components[i].type, *cls, t ? &*t : nullptr);
              }
              bind_pattern(n.args[i], ct, env);
            }
          } else if constexpr (std::is_same_v<T, Pattern::Record>) {
            for (const auto& [label, sub] : n.fields) {
              bind_pattern(sub, t ? field_type(*t, label) : std::nullopt, env);
            }
          }
        },
        p.node);
  }

  std::optional<TypeExpr> field_type(const TypeExpr& t, const std::string& label) {
    if (t.is_record) {
      for (const auto& [l, ft] : t.fields) {
        if (l == label) return ft;
      }
      return std::nullopt;
    }
    const ClassInfo* c = h_.find(t.name);
    if (!c) return std::nullopt;
    for (const auto& alt : c->alts) {
      for (const auto& comp : alt.components) {
        if (comp.label == label) return subst_params(comp.type, *c, &t);
        if (alt.components.size() == 1 && comp.type.is_record) {
          if (auto ft = field_type(subst_params(comp.type, *c, &t), label)) return ft;
        }
      }
    }
    return std::nullopt;
  }

 private:
  void report(const SourceSpan& span, const std::string& code, const std::string& msg) {
    if (diags_) diags_->push_back(make_error(code, span, msg));
  }

  std::optional<TypeExpr> node(const Expr::Literal& n, const Expr&, TypeEnv&) {
    switch (n.value.kind()) {
      case ValueKind::Int: return named("Int");
      case ValueKind::Real: return named("Real");
      case ValueKind::Bool: return named("Bool");
      case ValueKind::String: return named("String");
      default: return std::nullopt;
    }
  }
  std::optional<TypeExpr> node(const Expr::Var& n, const Expr&, TypeEnv& env) {
    auto it = env.find(n.name);
    return it == env.end() ? std::nullopt : std::optional<TypeExpr>(it->second);
  }
  std::optional<TypeExpr> node(const Expr::ResultVar&, const Expr&, TypeEnv& env) {
    auto it = env.find("Result");
    return it == env.end() ? std::nullopt : std::optional<TypeExpr>(it->second);
  }
  std::optional<TypeExpr> node(const Expr::Construct& n, const Expr&, TypeEnv& env) {
    for (const auto& a : n.args) infer(a, env);
    std::string cls = h_.class_of_tag(n.tag);
    if (cls.empty()) return std::nullopt;
    return named(cls);
  }

  std::optional<TypeExpr> call(const std::string& fname, const std::vector<ExprPtr>& args,
                               const Expr& e, TypeEnv& env) {
    std::vector<std::optional<TypeExpr>> types;
    for (const auto& a : args) types.push_back(infer(a, env));
    if (auto it = builtin_arities().find(fname); it != builtin_arities().end()) {
      if (args.size() != it->second) {
        report(e.span, "CALL_ARITY", fname + " takes " + std::to_string(it->second) + " argument(s)");
        return std::nullopt;
      }
      if (fname == "length") return named("Int");
      if (fname == "concat" || fname == "tail" || fname == "abs") return types[0];
      return named("Real");
    }
    std::string receiver_cls = !types.empty() && types[0] ? types[0]->name : std::string();
    const FunctionSig* sig = h_.signature(fname, receiver_cls);
    if (!sig) return std::nullopt;
    bool arity_ok = false;
    for (const auto& s : h_.functions.at(fname)) arity_ok = arity_ok || s.params.size() == args.size();
    if (!arity_ok) {
      report(e.span, "CALL_ARITY",
             fname + " expects " + std::to_string(sig->params.size()) + " argument(s), got " +
                 std::to_string(args.size()));
      return std::nullopt;
    }
    const ClassInfo* decl = h_.find(sig->cls);
    if (sig->decl.has_receiver() && decl && types[0]) return subst_params(sig->result, *decl, &*types[0]);
    return sig->result;
  }

  std::optional<TypeExpr> node(const Expr::Call& n, const Expr& e, TypeEnv& env) {
    return call(n.fname, n.args, e, env);
  }
  std::optional<TypeExpr> node(const Expr::DottedCall& n, const Expr& e, TypeEnv& env) {
    std::vector<ExprPtr> args{n.receiver};
    args.insert(args.end(), n.args.begin(), n.args.end());
    return call(n.fname, args, e, env);
  }
  std::optional<TypeExpr> node(const Expr::QualifiedCall& n, const Expr& e, TypeEnv& env) {
    std::vector<ExprPtr> args{n.receiver};
    args.insert(args.end(), n.args.begin(), n.args.end());
    return call(n.fname, args, e, env);
  }
  std::optional<TypeExpr> node(const Expr::Logical& n, const Expr&, TypeEnv& env) {
    for (const auto& o : n.operands) expect_bool(o, env, "logical operand");
    return named("Bool");
  }
  std::optional<TypeExpr> node(const Expr::Binary& n, const Expr& e, TypeEnv& env) {
    auto l = infer(n.lhs, env);
    auto r = infer(n.rhs, env);
    if (is_relational(n.op)) return named("Bool");
    auto numeric = [&](const std::optional<TypeExpr>& t) {
      return !t || h_.is_type_variable(*t) || is_named(*t, "Int") || is_named(*t, "Nat") ||
             is_named(*t, "Real");
    };
    if (!numeric(l) || !numeric(r)) {
      report(e.span, "NOT_NUMERIC", std::string("operands of '") + std::string(binary_op_symbol(n.op)) +
                                        "' must be numbers");
      return std::nullopt;
    }
    if (n.op == BinaryOp::Div) return named("Real");
    if (!l || !r) return std::nullopt;
    if (is_named(*l, "Real") || is_named(*r, "Real")) return named("Real");
    if (h_.is_type_variable(*l)) return r;
    return l->name == "Nat" ? named("Int") : *l;
  }
  std::optional<TypeExpr> node(const Expr::Negate& n, const Expr&, TypeEnv& env) {
    return infer(n.operand, env);
  }
  std::optional<TypeExpr> node(const Expr::Quantifier& n, const Expr& e, TypeEnv& env) {
    auto ct = infer(n.collection, env);
    std::optional<TypeExpr> elem;
    if (ct) {
      if (!h_.is_type_variable(*ct) && !h_.is_traversable(*ct)) {
        report(n.collection->span, "NOT_TRAVERSABLE",
               "quantifier ranges over " + to_string(*ct) + ", which has no traversal");
      }
      elem = h_.element_type(*ct);
    }
    TypeEnv inner = env;
    if (elem) inner[n.var] = *elem;
    else inner.erase(n.var);
    expect_bool(n.filter, inner, "quantifier filter");
    std::optional<TypeExpr> body;
    switch (n.symbol) {
      case QuantSymbol::Exists:
      case QuantSymbol::Forall:
      case QuantSymbol::Count:
      case QuantSymbol::Select:
      case QuantSymbol::Filter:
        expect_bool(n.body, inner, "quantifier body");
        break;
      default:
        body = infer(n.body, inner);
    }
    (void)e;
    switch (n.symbol) {
      case QuantSymbol::Exists:
      case QuantSymbol::Forall: return named("Bool");
      case QuantSymbol::Count: return named("Int");
      case QuantSymbol::Sum:
      case QuantSymbol::Product:
      case QuantSymbol::Max:
      case QuantSymbol::Min: return body;
      case QuantSymbol::Select:
      case QuantSymbol::Maximizer:
      case QuantSymbol::Minimizer: return elem;
      case QuantSymbol::Filter:
        if (ct && is_named(*ct, "String")) return named("String");
        if (elem) return named("Seq", {*elem});
        return std::nullopt;
      case QuantSymbol::Map:
      case QuantSymbol::SeqCons:
        if (body) return named("Seq", {*body});
        return named("Seq");
    }
    return std::nullopt;
  }
  std::optional<TypeExpr> node(const Expr::RecordAccess& n, const Expr&, TypeEnv& env) {
    auto t = infer(n.record, env);
    if (!t) return std::nullopt;
    return field_type(*t, n.label);
  }
  std::optional<TypeExpr> node(const Expr::SeqIndex& n, const Expr&, TypeEnv& env) {
    auto s = infer(n.seq, env);
    infer(n.index, env);
    if (!s) return std::nullopt;
    if (is_named(*s, "Seq") && !s->args.empty()) return s->args[0];
    if (is_named(*s, "String")) return s;
    if (is_named(*s, "Range")) return named("Int");
    return std::nullopt;
  }
  std::optional<TypeExpr> node(const Expr::Range& n, const Expr&, TypeEnv& env) {
    infer(n.lo, env);
    infer(n.hi, env);
    return named("Range");
  }
  std::optional<TypeExpr> node(const Expr::SeqLiteral& n, const Expr&, TypeEnv& env) {
    std::optional<TypeExpr> elem;
    for (const auto& x : n.elems) {
      auto t = infer(x, env);
      if (!elem) elem = t;
    }
    if (elem) return named("Seq", {*elem});
    return named("Seq");
  }
  std::optional<TypeExpr> node(const Expr::RecordLiteral& n, const Expr&, TypeEnv& env) {
    std::vector<std::pair<std::string, TypeExpr>> fields;
    bool known = true;
    for (const auto& [label, x] : n.fields) {
      auto t = infer(x, env);
      if (t) fields.emplace_back(label, *t);
      else known = false;
    }
    if (!known) return std::nullopt;
    return TypeExpr::record(std::move(fields));
  }

  const ClassHierarchy& h_;
  Diagnostics* diags_;
};

}  // namespace

std::optional<TypeExpr> ClassHierarchy::element_type(const TypeExpr& t) const {
  if (t.is_record) return std::nullopt;
  if (t.name == "Seq") return t.args.empty() ? std::nullopt : std::optional<TypeExpr>(t.args[0]);
  if (t.name == "Range") return named("Int");
  if (t.name == "String") return named("String");
  const ClassInfo* c = find(t.name);
  if (!c) return std::nullopt;
  Typer typer(*this, nullptr);
  for (const auto& tr : c->def.traversal_rules) {
    TypeEnv env;
    typer.bind_pattern(tr.shape, t, env);
    for (const auto& item : tr.items) {
      auto it = typer.infer(item, env);
      if (!it) continue;
      if (!it->is_record && it->name == c->def.name) continue;
      if (!is_type_variable(*it) && is_traversable(*it)) {
        if (auto inner = element_type(*it)) return inner;
        continue;
      }
      return it;
    }
  }
  return std::nullopt;
}

bool ClassHierarchy::item_is_collection(std::string_view cls, const TraversalRule& tr,
                                        std::size_t item) const {
  const ClassInfo* c = find(cls);
  if (!c || item >= tr.items.size()) return false;
  Typer typer(*this, nullptr);
  TypeEnv env;
  typer.bind_pattern(tr.shape, c->self_type(), env);
  auto t = typer.infer(tr.items[item], env);
  return t && !is_type_variable(*t) && is_traversable(*t);
}

// ---------------------------------------------------------------------------
// Name resolution

namespace {

class Resolver {
 public:
  Resolver(const ClassHierarchy& h, Diagnostics& diags, std::string context)
      : h_(h), diags_(diags), context_(std::move(context)) {}

  std::vector<std::string> scope;

  static bool accepts(const ResolvedAlt& alt, std::size_t arity) {
    if (alt.components.size() == arity) return true;
    return alt.labeled && alt.components.size() == 1 && alt.components[0].type.is_record &&
           alt.components[0].type.fields.size() == arity;
  }

  std::optional<std::string> resolve_tag(const std::string& tag, const TypeExpr* expected,
                                         const SourceSpan& span, std::size_t arity) {
    if (h_.alternative(tag)) return tag;
    const ResolvedAlt* fallback = nullptr;
    auto prefer = [&](const ClassInfo* c) -> const ResolvedAlt* {
      if (!c) return nullptr;
      const ResolvedAlt* a = c->alt(tag);
      if (!a) return nullptr;
      if (accepts(*a, arity)) return a;
      if (!fallback) fallback = a;
      return nullptr;
    };
    if (expected && !expected->is_record) {
      if (const ResolvedAlt* a = prefer(h_.find(expected->name))) return a->qualified;
    }
    if (const ResolvedAlt* a = prefer(h_.find(context_))) return a->qualified;
    std::vector<std::string> all;
    std::vector<std::string> candidates;
    for (const auto& [name, info] : h_.classes) {
      const ResolvedAlt* a = info.alt(tag);
      if (!a) continue;
      all.push_back(name);
      if (accepts(*a, arity)) candidates.push_back(name);
    }
    if (candidates.empty()) {
      if (fallback) return fallback->qualified;
      candidates = all;
    }
    std::vector<std::string> roots;
    for (const auto& c : candidates) {
      bool has_ancestor = std::any_of(candidates.begin(), candidates.end(), [&](const std::string& d) {
        return d != c && h_.is_descendant(c, d);
      });
      if (!has_ancestor) roots.push_back(c);
    }
    if (roots.size() == 1) return h_.find(roots[0])->alt(tag)->qualified;
    if (roots.empty()) {
      diags_.push_back(make_error("UNKNOWN_TAG", span, "unknown constructor or function '" + tag + "'"));
    } else {
      std::string list;
      for (const auto& r : roots) list += (list.empty() ? "" : ", ") + r;
      diags_.push_back(make_error("AMBIGUOUS_TAG", span,
                                  "constructor '" + tag + "' is declared by unrelated classes: " + list));
    }
    return std::nullopt;
  }

  // Component types of an alternative, instantiated for the expected type.
  std::vector<TypeExpr> component_types(const ResolvedAlt& alt, const TypeExpr* expected) {
    const ClassInfo* cls = h_.find(alt.cls);
    std::vector<TypeExpr> out;
    for (const auto& c : alt.components) out.push_back(subst_params(c.type, *cls, expected));
    return out;
  }

  // Labeled alternatives accept their record's fields positionally.
  template <typename Item, typename MakeRecord>
  bool record_sugar(const ResolvedAlt& alt, std::vector<Item>& args, bool single_is_record,
                    MakeRecord make_record) {
    if (!alt.labeled || alt.components.size() != 1 || !alt.components[0].type.is_record) return false;
    const auto& fields = alt.components[0].type.fields;
    if (args.size() != fields.size()) return false;
    if (args.size() == 1 && single_is_record) return false;
    std::vector<std::pair<std::string, Item>> named_args;
    for (std::size_t i = 0; i < fields.size(); ++i) named_args.emplace_back(fields[i].first, args[i]);
    args = {make_record(std::move(named_args))};
    return true;
  }

  Pattern pattern(const Pattern& p, const TypeExpr* expected) {
    if (auto* con = std::get_if<Pattern::Con>(&p.node)) {
      auto q = resolve_tag(con->tag, expected, p.span, con->args.size());
      if (!q) return p;
      const ResolvedAlt* alt = h_.alternative(*q);
      std::vector<Pattern> args = con->args;
      bool single_record = args.size() == 1 && std::holds_alternative<Pattern::Record>(args[0].node);
      SourceSpan span = p.span;
      record_sugar(*alt, args, single_record,
                   [&](auto fields) { return Pattern::record(std::move(fields), span); });
      if (args.size() != alt->components.size()) {
        diags_.push_back(make_error("PATTERN_ARITY", p.span,
                                    *q + " has " + std::to_string(alt->components.size()) +
                                        " component(s), pattern gives " + std::to_string(args.size())));
        return p;
      }
      auto types = component_types(*alt, expected);
      std::vector<Pattern> resolved;
      for (std::size_t i = 0; i < args.size(); ++i) resolved.push_back(pattern(args[i], &types[i]));
      return Pattern::con(*q, std::move(resolved), p.span);
    }
    if (auto* rec = std::get_if<Pattern::Record>(&p.node)) {
      std::vector<std::pair<std::string, Pattern>> fields;
      for (const auto& [label, sub] : rec->fields) {
        const TypeExpr* ft = nullptr;
        if (expected && expected->is_record) {
          for (const auto& [l, t] : expected->fields) {
            if (l == label) ft = &t;
          }
        }
        fields.emplace_back(label, pattern(sub, ft));
      }
      return Pattern::record(std::move(fields), p.span);
    }
    return p;
  }

  bool in_scope(const std::string& name) const {
    return std::find(scope.begin(), scope.end(), name) != scope.end();
  }

  std::vector<ExprPtr> list(const std::vector<ExprPtr>& xs, const std::vector<TypeExpr>* types = nullptr,
                            std::size_t offset = 0) {
    std::vector<ExprPtr> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const TypeExpr* t = types && i + offset < types->size() ? &(*types)[i + offset] : nullptr;
      out.push_back(expr(xs[i], t));
    }
    return out;
  }

  const std::vector<TypeExpr>* params_of(const std::string& fname) {
    auto it = h_.functions.find(fname);
    if (it == h_.functions.end() || it->second.size() != 1) return nullptr;
    return &it->second.front().params;
  }

  ExprPtr construct(const std::string& tag, const std::vector<ExprPtr>& raw_args, const Expr& e,
                    const TypeExpr* expected) {
    auto q = resolve_tag(tag, expected, e.span, raw_args.size());
    if (!q) return make_expr(e.node, e.span);
    const ResolvedAlt* alt = h_.alternative(*q);
    std::vector<ExprPtr> args = raw_args;
    bool single_record = args.size() == 1 && args[0]->as<Expr::RecordLiteral>();
    SourceSpan span = e.span;
    record_sugar(*alt, args, single_record, [&](auto fields) {
      return make_expr(Expr::RecordLiteral{std::move(fields)}, span);
    });
    if (args.size() != alt->components.size()) {
      diags_.push_back(make_error("CONSTRUCTOR_ARITY", e.span,
                                  *q + " has " + std::to_string(alt->components.size()) +
                                      " component(s), given " + std::to_string(args.size())));
    }
    auto types = component_types(*alt, expected);
    return make_expr(Expr::Construct{*q, list(args, &types)}, e.span);
  }

  ExprPtr expr(const ExprPtr& e, const TypeExpr* expected = nullptr) {
    if (!e) return e;
    const SourceSpan& span = e->span;
    return std::visit(
        [&](const auto& n) -> ExprPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Expr::Literal> || std::is_same_v<T, Expr::ResultVar>) {
            return e;
          } else if constexpr (std::is_same_v<T, Expr::Var>) {
            if (!in_scope(n.name)) {
              diags_.push_back(make_error("UNBOUND_VARIABLE", span, "unbound name '" + n.name + "'"));
            }
            return e;
          } else if constexpr (std::is_same_v<T, Expr::Call>) {
            if (in_scope(n.fname)) {
              if (n.args.size() != 1) {
                diags_.push_back(make_error("SYNTAX", span, "sequence '" + n.fname + "' indexed with " +
                                                                std::to_string(n.args.size()) + " arguments"));
                return e;
              }
              return make_expr(Expr::SeqIndex{make_expr(Expr::Var{n.fname}, span), expr(n.args[0])}, span);
            }
            if (h_.is_function(n.fname)) {
              return make_expr(Expr::Call{n.fname, list(n.args, params_of(n.fname))}, span);
            }
            if (is_builtin_function(n.fname)) return make_expr(Expr::Call{n.fname, list(n.args)}, span);
            return construct(n.fname, n.args, *e, expected);
          } else if constexpr (std::is_same_v<T, Expr::Construct>) {
            const ResolvedAlt* alt = h_.alternative(n.tag);
            if (!alt) return construct(n.tag, n.args, *e, expected);
            auto types = component_types(*alt, expected);
            return make_expr(Expr::Construct{n.tag, list(n.args, &types)}, span);
          } else if constexpr (std::is_same_v<T, Expr::DottedCall>) {
            if (!h_.is_function(n.fname) && !is_builtin_function(n.fname)) {
              diags_.push_back(make_error("UNDEFINED_FUNCTION", span, "undefined function '" + n.fname + "'"));
            }
            return make_expr(Expr::DottedCall{expr(n.receiver), n.fname, list(n.args, params_of(n.fname), 1)},
                             span);
          } else if constexpr (std::is_same_v<T, Expr::QualifiedCall>) {
            const ClassInfo* c = h_.find(n.cls);
            if (!c) {
              diags_.push_back(make_error("UNKNOWN_CLASS", span, "unknown class '" + n.cls + "'"));
              return e;
            }
            if (!h_.is_function(n.fname)) {
              diags_.push_back(make_error("UNDEFINED_FUNCTION", span, "undefined function '" + n.fname + "'"));
            }
            TypeExpr self = c->self_type();
            return make_expr(Expr::QualifiedCall{expr(n.receiver, &self), n.cls, n.fname,
                                                 list(n.args, params_of(n.fname), 1)},
                             span);
          } else if constexpr (std::is_same_v<T, Expr::Logical>) {
            return make_expr(Expr::Logical{n.op, list(n.operands)}, span);
          } else if constexpr (std::is_same_v<T, Expr::Binary>) {
            return make_expr(Expr::Binary{n.op, expr(n.lhs), expr(n.rhs)}, span);
          } else if constexpr (std::is_same_v<T, Expr::Negate>) {
            return make_expr(Expr::Negate{expr(n.operand)}, span);
          } else if constexpr (std::is_same_v<T, Expr::Quantifier>) {
            ExprPtr coll = expr(n.collection);
            if (in_scope(n.var)) {
              diags_.push_back(make_error("NOT_FRESH", span, "bound variable '" + n.var + "' shadows an outer name"));
            }
            scope.push_back(n.var);
            ExprPtr filter = expr(n.filter);
            ExprPtr body = expr(n.body);
            scope.pop_back();
            return make_expr(Expr::Quantifier{n.symbol, n.var, coll, filter, body}, span);
          } else if constexpr (std::is_same_v<T, Expr::RecordAccess>) {
            return make_expr(Expr::RecordAccess{expr(n.record), n.label}, span);
          } else if constexpr (std::is_same_v<T, Expr::SeqIndex>) {
            return make_expr(Expr::SeqIndex{expr(n.seq), expr(n.index)}, span);
          } else if constexpr (std::is_same_v<T, Expr::Range>) {
            return make_expr(Expr::Range{expr(n.lo), expr(n.hi)}, span);
          } else if constexpr (std::is_same_v<T, Expr::SeqLiteral>) {
            const TypeExpr* elem = expected && is_named(*expected, "Seq") && !expected->args.empty()
                                       ? &expected->args[0]
                                       : nullptr;
            std::vector<ExprPtr> elems;
            for (const auto& x : n.elems) elems.push_back(expr(x, elem));
            return make_expr(Expr::SeqLiteral{std::move(elems)}, span);
          } else {
            std::vector<std::pair<std::string, ExprPtr>> fields;
            for (const auto& [label, x] : n.fields) {
              const TypeExpr* ft = nullptr;
              if (expected && expected->is_record) {
                for (const auto& [l, t] : expected->fields) {
                  if (l == label) ft = &t;
                }
              }
              fields.emplace_back(label, expr(x, ft));
            }
            return make_expr(Expr::RecordLiteral{std::move(fields)}, span);
          }
        },
        e->node);
  }

 private:
  const ClassHierarchy& h_;
  Diagnostics& diags_;
  std::string context_;
};

const FunctionSig* visible_signature(const ClassHierarchy& h, const std::string& fname,
                                     const std::string& cls) {
  auto it = h.functions.find(fname);
  if (it == h.functions.end()) return nullptr;
  for (const auto& sig : it->second) {
    if (h.is_descendant(cls, sig.cls)) return &sig;
  }
  return nullptr;
}

bool is_subtype_component(const ClassHierarchy& h, const TypeExpr& sub, const TypeExpr& super) {
  if (sub == super) return true;
  if (sub.is_record || super.is_record) {
    if (!(sub.is_record && super.is_record) || sub.fields.size() != super.fields.size()) return false;
    for (std::size_t i = 0; i < sub.fields.size(); ++i) {
      if (sub.fields[i].first != super.fields[i].first ||
          !is_subtype_component(h, sub.fields[i].second, super.fields[i].second)) {
        return false;
      }
    }
    return true;
  }
  if (sub.name == "Seq" && super.name == "Seq" && sub.args.size() == 1 && super.args.size() == 1) {
    return is_subtype_component(h, sub.args[0], super.args[0]);
  }
  if (h.find(sub.name) && h.find(super.name)) return h.is_descendant(sub.name, super.name);
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Building

HierarchyResult build_hierarchy(const std::vector<ClassDef>& input) {
  HierarchyResult out;
  auto h = std::make_shared<ClassHierarchy>();
  Diagnostics& diags = out.diags;

  std::map<std::string, const ClassDef*> defs;
  for (const auto& d : input) {
    if (!defs.emplace(d.name, &d).second) {
      diags.push_back(make_error("DUPLICATE_CLASS", d.span, "class '" + d.name + "' is declared twice"));
    }
    if (is_primitive_type(d.name)) {
      diags.push_back(make_error("RESERVED_NAME", d.span, "'" + d.name + "' names a built-in type"));
    }
  }
  for (const auto& [name, d] : defs) {
    for (const auto& p : d->parents) {
      if (!defs.count(p)) {
        diags.push_back(make_error("UNKNOWN_PARENT", d->span, "class '" + name + "' extends unknown class '" + p + "'"));
      }
    }
  }
  if (has_errors(diags)) return out;

  // Topological order, parents first; reports cycles.
  std::vector<std::string> order;
  std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
  std::function<bool(const std::string&)> visit = [&](const std::string& n) {
    if (state[n] == 2) return true;
    if (state[n] == 1) {
      diags.push_back(make_error("INHERITANCE_CYCLE", defs[n]->span, "class '" + n + "' inherits from itself"));
      return false;
    }
    state[n] = 1;
    for (const auto& p : defs[n]->parents) {
      if (!visit(p)) return false;
    }
    state[n] = 2;
    order.push_back(n);
    return true;
  };
  for (const auto& [name, _] : defs) {
    if (!visit(name)) return out;
  }

  for (const auto& name : order) {
    const ClassDef& d = *defs[name];
    ClassInfo info;
    info.def = d;
    for (const auto& p : d.parents) {
      const ClassInfo& pi = h->classes.at(p);
      std::vector<std::string> chain{p};
      chain.insert(chain.end(), pi.ancestors.begin(), pi.ancestors.end());
      for (const auto& a : chain) {
        if (std::find(info.ancestors.begin(), info.ancestors.end(), a) == info.ancestors.end()) {
          info.ancestors.push_back(a);
        }
      }
      for (const auto& alt : pi.alts) {
        if (info.alt(alt.tag)) continue;  // first parent wins
        ResolvedAlt copy = alt;
        copy.cls = name;
        copy.qualified = qualify_tag(name, alt.tag);
        copy.local = false;
        info.alts.push_back(std::move(copy));
      }
    }
    std::set<std::string> local_tags;
    for (const auto& a : d.alternatives) {
      if (!local_tags.insert(a.tag).second) {
        diags.push_back(make_error("DUPLICATE_TAG", a.span, "alternative '" + a.tag + "' declared twice in " + name));
        continue;
      }
      std::set<std::string> labels;
      for (const auto& c : a.components) {
        if (c.label && !labels.insert(*c.label).second) {
          diags.push_back(make_error("DUPLICATE_LABEL", a.span, "component label '" + *c.label + "' repeated"));
        }
      }
      ResolvedAlt r{name, a.tag, qualify_tag(name, a.tag), a.components, a.labeled, true, a.span};
      auto it = std::find_if(info.alts.begin(), info.alts.end(), [&](const ResolvedAlt& x) { return x.tag == a.tag; });
      if (it == info.alts.end()) {
        info.alts.push_back(std::move(r));
        continue;
      }
      if (r.components.size() < it->components.size()) {
        diags.push_back(make_error("OVERRIDE_ARITY", a.span,
                                   "redefinition of '" + a.tag + "' drops components (" +
                                       std::to_string(it->components.size()) + " -> " +
                                       std::to_string(r.components.size()) + ")"));
      } else {
        for (std::size_t i = 0; i < it->components.size(); ++i) {
          if (!is_subtype_component(*h, r.components[i].type, it->components[i].type)) {
            diags.push_back(make_error("OVERRIDE_TYPE", a.span,
                                       "component " + std::to_string(i + 1) + " of '" + a.tag + "' (" +
                                           to_string(r.components[i].type) + ") does not refine " +
                                           to_string(it->components[i].type)));
          }
        }
      }
      *it = std::move(r);
    }
    for (std::size_t i = 0; i < info.alts.size(); ++i) {
      h->tags[info.alts[i].qualified] = {name, i};
    }
    for (const auto& op : d.op_decls) {
      FunctionSig sig;
      sig.cls = name;
      sig.decl = op;
      if (op.has_receiver()) sig.params.push_back(info.self_type());
      sig.params.insert(sig.params.end(), op.arg_types.begin(), op.arg_types.end());
      sig.result = op.result_type;
      for (const auto& existing : h->functions[op.name]) {
        if (existing.cls == name) {
          diags.push_back(make_error("DUPLICATE_FUNCTION", op.span, "function '" + op.name + "' declared twice in " + name));
        }
      }
      h->functions[op.name].push_back(std::move(sig));
    }
    h->classes.emplace(name, std::move(info));
  }
  // Qualified tags must stay unique across classes (ClassA + Btag vs ClassAB + tag).
  {
    std::map<std::string, int> seen;
    for (const auto& [name, info] : h->classes) {
      for (const auto& a : info.alts) {
        if (++seen[a.qualified] > 1) {
          diags.push_back(make_error("TAG_CLASH", a.span, "qualified tag '" + a.qualified + "' is not unique"));
        }
      }
    }
  }
  if (has_errors(diags)) return out;

  // Resolve names inside rules and traversals.
  for (auto& [name, info] : h->classes) {
    ClassDef& d = info.def;
    TypeExpr self = info.self_type();
    for (auto& tr : d.traversal_rules) {
      Resolver res(*h, diags, name);
      tr.shape = res.pattern(tr.shape, &self);
      std::vector<std::string> vars;
      pattern_variables(tr.shape, vars);
      res.scope = vars;
      for (auto& item : tr.items) item = res.expr(item);
      auto* con = std::get_if<Pattern::Con>(&tr.shape.node);
      if (!con || h->class_of_tag(con->tag) != name) {
        diags.push_back(make_error("TRAVERSAL_SHAPE", tr.span, "traversal shape must be an alternative of " + name));
      }
    }
    if (!d.traversal_rules.empty()) {
      for (const auto& alt : info.alts) {
        bool covered = std::any_of(d.traversal_rules.begin(), d.traversal_rules.end(), [&](const TraversalRule& tr) {
          auto* con = std::get_if<Pattern::Con>(&tr.shape.node);
          return con && con->tag == alt.qualified;
        });
        if (!covered) {
          diags.push_back(make_error("TRAVERSAL_COVERAGE", d.span,
                                     "class " + name + " has no traversal rule for alternative " + alt.tag));
        }
      }
    }
    for (auto& r : d.rules) {
      const FunctionSig* sig = visible_signature(*h, r.fname, name);
      if (!sig) {
        diags.push_back(make_error("RULE_WITHOUT_DECL", r.span,
                                   "rule for '" + r.fname + "' but no such operation is declared in " + name +
                                       " or its ancestors"));
        continue;
      }
      if (sig->params.size() != r.args.size()) {
        diags.push_back(make_error("RULE_ARITY", r.span,
                                   r.fname + " takes " + std::to_string(sig->params.size()) +
                                       " argument(s) including the receiver, rule gives " +
                                       std::to_string(r.args.size())));
        continue;
      }
      Resolver res(*h, diags, name);
      for (std::size_t i = 0; i < r.args.size(); ++i) {
        const TypeExpr& expected = (i == 0 && sig->decl.has_receiver()) ? self : sig->params[i];
        r.args[i] = res.pattern(r.args[i], &expected);
      }
      std::vector<std::string> vars;
      for (const auto& p : r.args) pattern_variables(p, vars);
      std::set<std::string> seen;
      for (const auto& v : vars) {
        if (v == "Result") {
          diags.push_back(make_error("RESULT_IN_PATTERN", r.span, "'Result' cannot be a pattern variable"));
        } else if (!seen.insert(v).second) {
          diags.push_back(make_error("NONLINEAR_PATTERN", r.span, "variable '" + v + "' occurs twice in the call scheme"));
        }
      }
      res.scope = vars;
      r.pre.checked_part = res.expr(r.pre.checked_part);
      r.pre.unchecked_part = res.expr(r.pre.unchecked_part);
      r.post.checked_part = res.expr(r.post.checked_part);
      r.post.unchecked_part = res.expr(r.post.unchecked_part);
      r.sol = res.expr(r.sol, &sig->result);
    }
  }
  if (has_errors(diags)) return out;

  // dispatch / missing
  for (const auto& [name, info] : h->classes) {
    std::set<std::string> visible;
    for (const auto& [fname, sigs] : h->functions) {
      for (const auto& s : sigs) {
        if (h->is_descendant(name, s.cls)) visible.insert(fname);
      }
    }
    for (const auto& fname : visible) {
      auto has_rules = [&](const std::string& cls) {
        const auto& rules = h->classes.at(cls).def.rules;
        return std::any_of(rules.begin(), rules.end(), [&](const FunctionRule& r) { return r.fname == fname; });
      };
      if (has_rules(name)) {
        h->dispatch[{fname, name}] = name;
        continue;
      }
      std::vector<std::string> definers;
      for (const auto& a : info.ancestors) {
        if (has_rules(a)) definers.push_back(a);
      }
      std::vector<std::string> nearest;
      for (const auto& a : definers) {
        bool shadowed = std::any_of(definers.begin(), definers.end(), [&](const std::string& b) {
          return b != a && h->is_descendant(b, a);
        });
        if (!shadowed) nearest.push_back(a);
      }
      if (nearest.empty()) continue;
      if (nearest.size() > 1) {
        diags.push_back(make_error("AMBIGUOUS_INHERITANCE", info.def.span,
                                   name + " inherits '" + fname + "' from both " + nearest[0] + " and " +
                                       nearest[1] + "; add a local rule"));
        continue;
      }
      h->dispatch[{fname, name}] = nearest[0];
      const FunctionSig* sig = visible_signature(*h, fname, name);
      if (sig && sig->decl.has_receiver()) h->missing.insert({fname, name});
    }
  }
  if (has_errors(diags)) return out;
  out.hierarchy = std::move(h);
  return out;
}

Diagnostics check_rules(const ClassHierarchy& h) {
  Diagnostics diags;
  Typer typer(h, &diags);
  for (const auto& [name, info] : h.classes) {
    for (const auto& r : info.def.rules) {
      const FunctionSig* sig = visible_signature(h, r.fname, name);
      if (!sig) continue;
      TypeEnv env;
      for (std::size_t i = 0; i < r.args.size(); ++i) {
        TypeExpr expected = (i == 0 && sig->decl.has_receiver()) ? info.self_type() : sig->params[i];
        typer.bind_pattern(r.args[i], expected, env);
      }
      std::vector<std::string> pattern_vars;
      for (const auto& p : r.args) pattern_variables(p, pattern_vars);
      std::set<std::string> bound(pattern_vars.begin(), pattern_vars.end());

      auto check_bound = [&](const ExprPtr& e, const char* where, bool allow_result) {
        if (!e) return;
        for (const auto& v : free_variables(e, true)) {
          if (v == "Result") {
            if (!allow_result) {
              std::string code = std::string(where) == "pre" ? "RESULT_IN_PRE" : "RESULT_IN_SOL";
              diags.push_back(make_error(code, e->span, std::string("'Result' used in ") + where));
            }
          } else if (!bound.count(v)) {
            diags.push_back(make_error("UNBOUND_VARIABLE", e->span,
                                       "'" + v + "' in " + where + " is not bound by the call scheme"));
          }
        }
      };
      check_bound(r.pre.checked_part, "pre", false);
      check_bound(r.pre.unchecked_part, "pre", false);
      check_bound(r.post.checked_part, "post", true);
      check_bound(r.post.unchecked_part, "post", true);
      check_bound(r.sol, "sol", false);

      if (r.pre.mode != CheckModeKind::Full && !r.pre.unchecked_part) {
        diags.push_back(make_error("CHECK_MODE", r.span, "check annotation without unchecked formula"));
      }
      typer.expect_bool(r.pre.checked_part, env, "precondition");
      if (r.pre.unchecked_part) typer.expect_bool(r.pre.unchecked_part, env, "precondition");
      TypeEnv post_env = env;
      post_env["Result"] = sig->result;
      if (sig->decl.has_receiver() && sig->decl.kind == OpKind::Modifier) post_env["Result"] = info.self_type();
      typer.expect_bool(r.post.checked_part, post_env, "postcondition");
      if (r.post.unchecked_part) typer.expect_bool(r.post.unchecked_part, post_env, "postcondition");
      if (r.sol) {
        auto st = typer.infer(r.sol, env);
        TypeExpr expected = post_env["Result"];
        if (st && !h.conforms(*st, expected)) {
          diags.push_back(make_error("SOL_TYPE", r.sol->span,
                                     "solution has type " + to_string(*st) + ", " + r.fname + " returns " +
                                         to_string(expected)));
        }
      }
      // Result inside a quantifier filter of a postcondition is allowed but unusual.
      for (const ExprPtr& part : {r.post.checked_part, r.post.unchecked_part}) {
        visit_expr(part, [&](const Expr& e) {
          if (auto* q = e.as<Expr::Quantifier>(); q && mentions_result(q->filter)) {
            diags.push_back(make_warning("RESULT_IN_FILTER", e.span, "quantifier filter refers to 'Result'"));
          }
        });
      }
    }
  }
  return diags;
}

Diagnostics check_computability(const ClassHierarchy& h) {
  Diagnostics diags;
  for (const auto& [name, info] : h.classes) {
    for (const auto& r : info.def.rules) {
      if (!executable_solution(r)) {
        diags.push_back(make_warning("NOT_EXECUTABLE", r.span,
                                     "rule for " + r.fname + " has no solution; it can be checked but not run"));
      }
    }
  }
  // Quantifier traversability is reported by the type walk; repeat it here
  // keeping only those diagnostics so this pass stands alone.
  Diagnostics typing = check_rules(h);
  for (auto& d : typing) {
    if (d.code == "NOT_TRAVERSABLE") diags.push_back(std::move(d));
  }
  return diags;
}

HierarchyResult analyze(const std::vector<ClassDef>& defs) {
  HierarchyResult out = build_hierarchy(defs);
  if (!out.hierarchy) return out;
  Diagnostics rules = check_rules(*out.hierarchy);
  Diagnostics comp = check_computability(*out.hierarchy);
  out.diags.insert(out.diags.end(), rules.begin(), rules.end());
  for (auto& d : comp) {
    if (d.code != "NOT_TRAVERSABLE") out.diags.push_back(std::move(d));
  }
  if (has_errors(out.diags)) out.hierarchy.reset();
  return out;
}

ExprPtr resolve_expression(const ExprPtr& e, const ClassHierarchy& h, Diagnostics& diags,
                           const std::vector<std::string>& scope) {
  Resolver res(h, diags, "");
  res.scope = scope;
  return res.expr(e);
}

// ---------------------------------------------------------------------------
// Values against the hierarchy

Value project_to_ancestor(const Value& v, std::string_view target, const ClassHierarchy& h) {
  if (!v.is_con()) throw Error("CAST_ERROR", "cannot cast " + to_text(v) + " to " + std::string(target));
  std::string cls = h.class_of_tag(v.tag());
  if (cls.empty()) throw Error("CAST_ERROR", "unknown constructor " + v.tag());
  if (cls == target) return v;
  if (!h.is_descendant(cls, target)) {
    throw Error("CAST_ERROR", cls + " is not a descendant of " + std::string(target));
  }
  const ResolvedAlt* src = h.alternative(v.tag());
  const ResolvedAlt* dst = h.find(target)->alt(src->tag);
  if (!dst) {
    throw Error("CAST_ERROR", "alternative " + src->tag + " of " + cls + " has no counterpart in " +
                                  std::string(target));
  }
  ValueList args;
  for (std::size_t i = 0; i < dst->components.size(); ++i) {
    args.push_back(project_to_type(v.args().at(i), dst->components[i].type, h));
  }
  return Value::con(dst->qualified, std::move(args));
}

Value project_to_type(const Value& v, const TypeExpr& t, const ClassHierarchy& h) {
  if (t.is_record) {
    if (!v.is_record()) return v;
    FieldList fields;
    for (const auto& [label, fv] : v.fields()) {
      auto it = std::find_if(t.fields.begin(), t.fields.end(), [&](const auto& f) { return f.first == label; });
      fields.emplace_back(label, it == t.fields.end() ? fv : project_to_type(fv, it->second, h));
    }
    return Value::record(std::move(fields));
  }
  if (t.name == "Seq" && !t.args.empty() && v.is_seq()) {
    ValueList items;
    for (const auto& x : v.items()) items.push_back(project_to_type(x, t.args[0], h));
    return Value::seq(std::move(items));
  }
  if (h.find(t.name) && v.is_con()) {
    std::string cls = h.class_of_tag(v.tag());
    if (!cls.empty() && cls != t.name && h.is_descendant(cls, t.name)) return project_to_ancestor(v, t.name, h);
  }
  return v;
}

Value coerce(const Value& v, const TypeExpr& t, const ClassHierarchy& h) {
  if (t.is_record) {
    if (!v.is_record()) return v;
    const FieldList& have = v.fields();
    bool same_labels = have.size() == t.fields.size();
    for (const auto& [label, _] : t.fields) same_labels = same_labels && v.field(label) != nullptr;
    FieldList fields;
    if (same_labels) {
      for (const auto& [label, ft] : t.fields) fields.emplace_back(label, coerce(*v.field(label), ft, h));
    } else {
      for (const auto& [label, fv] : have) {
        auto it = std::find_if(t.fields.begin(), t.fields.end(), [&](const auto& f) { return f.first == label; });
        fields.emplace_back(label, it == t.fields.end() ? fv : coerce(fv, it->second, h));
      }
    }
    return Value::record(std::move(fields));
  }
  if (t.name == "Real" && v.is_int()) return Value::real(static_cast<double>(v.as_int()));
  if (t.name == "Seq" && !t.args.empty() && v.is_seq()) {
    ValueList items;
    for (const auto& x : v.items()) items.push_back(coerce(x, t.args[0], h));
    return Value::seq(std::move(items));
  }
  if (const ClassInfo* c = h.find(t.name)) {
    if (v.is_con()) {
      std::string cls = h.class_of_tag(v.tag());
      if (!cls.empty() && h.is_descendant(cls, t.name)) {
        const ClassInfo* info = h.find(cls);
        const ResolvedAlt* alt = h.alternative(v.tag());
        if (!alt || alt->components.size() != v.args().size()) return v;
        ValueList args;
        for (std::size_t i = 0; i < v.args().size(); ++i) {
          args.push_back(coerce(v.args()[i], subst_params(alt->components[i].type, *info, cls == t.name ? &t : nullptr), h));
        }
        return Value::con(v.tag(), std::move(args));
      }
    }
    if (c->alts.size() == 1 && c->alts[0].components.size() == 1) {
      TypeExpr inner = subst_params(c->alts[0].components[0].type, *c, &t);
      return Value::con(c->alts[0].qualified, {coerce(v, inner, h)});
    }
  }
  return v;
}

bool value_conforms(const Value& v, const TypeExpr& t, const ClassHierarchy& h) {
  if (t.is_record) {
    if (!v.is_record()) return false;
    for (const auto& [label, ft] : t.fields) {
      const Value* f = v.field(label);
      if (!f || !value_conforms(*f, ft, h)) return false;
    }
    return v.fields().size() == t.fields.size();
  }
  if (t.name == "Int") return v.is_int();
  if (t.name == "Nat") return v.is_int() && v.as_int() >= 0;
  if (t.name == "Real") return v.is_number();
  if (t.name == "Bool") return v.is_bool();
  if (t.name == "String") return v.is_string();
  if (t.name == "Range") return v.is_seq();
  if (t.name == "Seq") {
    if (!v.is_seq()) return false;
    if (t.args.empty()) return true;
    return std::all_of(v.items().begin(), v.items().end(),
                       [&](const Value& x) { return value_conforms(x, t.args[0], h); });
  }
  if (h.find(t.name)) {
    if (!v.is_con()) return false;
    std::string cls = h.class_of_tag(v.tag());
    return !cls.empty() && h.is_descendant(cls, t.name);
  }
  return true;
}

Value construct(std::string_view qualified_tag, ValueList args, const ClassHierarchy& h) {
  const ResolvedAlt* alt = h.alternative(qualified_tag);
  if (!alt) throw Error("UNKNOWN_TAG", "unknown constructor " + std::string(qualified_tag));
  if (alt->components.size() != args.size()) {
    throw Error("ARITY_MISMATCH", std::string(qualified_tag) + " expects " +
                                      std::to_string(alt->components.size()) + " component(s), got " +
                                      std::to_string(args.size()));
  }
  for (std::size_t i = 0; i < args.size(); ++i) args[i] = coerce(args[i], alt->components[i].type, h);
  return Value::con(std::string(qualified_tag), std::move(args));
}

}  // namespace slam
