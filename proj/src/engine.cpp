#include "slam/engine.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <unordered_map>
#include <variant>

#include "slam/semantics.hpp"

namespace slam {

namespace {

// ---------------------------------------------------------------------------
// Compiled clauses: variables become frame slots.

struct CTerm {
  enum class Kind { Slot, Const, Con, List, Record };
  Kind kind = Kind::Const;
  int slot = -1;
  Value value;
  std::string tag;
  std::vector<std::string> labels;
  std::vector<CTerm> args;
};

enum class Op {
  Call, Eq, Guard, Build,
  Add, Sub, Mul, Div, EqOp, Ne, Lt, Le, Gt, Ge,
  And, Or, Not, Implies, Iff, Neg,
  Field, Index, Range, Function,
  First, Next, Inside, Cast, WireRead, Quantify
};

struct CompiledPred;

struct CGoal {
  Op op = Op::Call;
  std::string name;
  std::vector<CTerm> args;
  mutable const CompiledPred* pred = nullptr;
  mutable bool resolved = false;
};

struct CClause {
  std::vector<CTerm> head;
  std::vector<CGoal> body;
  int slots = 0;
};

struct CompiledPred {
  std::string name;
  std::size_t arity = 0;
  std::string label;  // name/arity
  std::vector<CClause> clauses;
};

const std::map<std::string, Op, std::less<>>& builtin_ops() {
  static const std::map<std::string, Op, std::less<>> ops = {
      {"add", Op::Add},         {"sub", Op::Sub},       {"mul", Op::Mul},       {"div", Op::Div},
      {"eq", Op::EqOp},         {"ne", Op::Ne},         {"lt", Op::Lt},         {"le", Op::Le},
      {"gt", Op::Gt},           {"ge", Op::Ge},         {"and", Op::And},       {"or", Op::Or},
      {"not", Op::Not},         {"implies", Op::Implies}, {"iff", Op::Iff},     {"neg", Op::Neg},
      {"field", Op::Field},     {"index", Op::Index},   {"range", Op::Range},   {"first", Op::First},
      {"next", Op::Next},       {"inside", Op::Inside}, {"cast", Op::Cast},     {"wire_read", Op::WireRead},
      {"quantify", Op::Quantify}};
  return ops;
}

class ClauseCompiler {
 public:
  CTerm term(const Term& t) {
    CTerm c;
    switch (t.kind) {
      case Term::Kind::Var:
        c.kind = CTerm::Kind::Slot;
        if (t.name == "_") {
          c.slot = next_++;
        } else {
          auto [it, inserted] = slots_.emplace(t.name, next_);
          if (inserted) ++next_;
          c.slot = it->second;
        }
        return c;
      case Term::Kind::Const: c.value = t.value; return c;
      case Term::Kind::Atom: c.value = Value::string(t.name); return c;
      case Term::Kind::Con: c.kind = CTerm::Kind::Con; break;
      case Term::Kind::List: c.kind = CTerm::Kind::List; break;
      case Term::Kind::Record: c.kind = CTerm::Kind::Record; break;
    }
    c.tag = t.name;
    c.labels = t.labels;
    for (const auto& a : t.args) c.args.push_back(term(a));
    return c;
  }

  CGoal goal(const Goal& g) {
    CGoal c;
    c.name = g.name;
    switch (g.kind) {
      case Goal::Kind::Call:
        c.op = Op::Call;
        for (const auto& a : g.args) c.args.push_back(term(a));
        break;
      case Goal::Kind::Builtin: {
        auto it = builtin_ops().find(g.name);
        c.op = it == builtin_ops().end() ? Op::Function : it->second;
        for (const auto& a : g.args) c.args.push_back(term(a));
        break;
      }
      case Goal::Kind::Eq:
        c.op = Op::Eq;
        c.args = {term(g.lhs), term(g.rhs)};
        break;
      case Goal::Kind::Guard:
        c.op = Op::Guard;
        c.args = {term(g.lhs)};
        break;
      case Goal::Kind::Build:
        c.op = Op::Build;
        c.args = {term(g.lhs), term(g.rhs)};
        break;
    }
    return c;
  }

  CClause clause(const std::vector<Term>& head, const std::vector<Goal>& body) {
    CClause c;
    for (const auto& t : head) c.head.push_back(term(t));
    for (const auto& g : body) c.body.push_back(goal(g));
    c.slots = next_;
    return c;
  }

  int slot_of(const std::string& name) const {
    auto it = slots_.find(name);
    return it == slots_.end() ? -1 : it->second;
  }
  int slots() const { return next_; }

 private:
  std::map<std::string, int> slots_;
  int next_ = 0;
};

// ---------------------------------------------------------------------------
// Run-time terms

struct Cell;
struct RStruct;
using CellPtr = std::shared_ptr<Cell>;
using StructPtr = std::shared_ptr<const RStruct>;
using RTerm = std::variant<Value, CellPtr, StructPtr>;

struct Cell {
  std::optional<RTerm> ref;
};

struct RStruct {
  CTerm::Kind kind;
  std::string tag;
  std::vector<std::string> labels;
  std::vector<RTerm> args;
};

using Frame = std::shared_ptr<std::vector<RTerm>>;

struct ContNode;
using ContPtr = std::shared_ptr<const ContNode>;

struct ContNode {
  const std::vector<CGoal>* goals = nullptr;  // null for an exit marker
  std::size_t index = 0;
  Frame frame;
  const CompiledPred* pred = nullptr;  // exit marker
  std::size_t depth = 0;               // exit markers in this chain
  ContPtr next;
};

struct ChoicePoint {
  const CompiledPred* pred;
  std::vector<RTerm> args;
  std::size_t next_clause;
  ContPtr rest;
  std::size_t trail_mark;
  std::size_t depth;
};

const RTerm& deref(const RTerm& t) {
  const RTerm* cur = &t;
  while (auto* c = std::get_if<CellPtr>(cur)) {
    if (!(*c)->ref) return *cur;
    cur = &*(*c)->ref;
  }
  return *cur;
}

}  // namespace

struct Engine::Impl {
  std::shared_ptr<const LogicProgram> program;
  const ClassHierarchy* hierarchy;
  Limits limits;
  std::ostream* trace = nullptr;
  ValueList wire;
  std::map<std::string, TypeExpr> wire_types;

  std::unordered_map<std::string, std::unique_ptr<CompiledPred>> compiled;
  std::vector<CellPtr> trail;
  std::vector<ChoicePoint> choices;
  std::size_t step_count = 0;
  std::chrono::steady_clock::time_point started;
  int solve_nesting = 0;

  Impl(std::shared_ptr<const LogicProgram> p, Limits l)
      : program(std::move(p)), hierarchy(program->hierarchy.get()), limits(l) {
    if (hierarchy) {
      for (const auto& [_, sigs] : hierarchy->functions) {
        for (const auto& s : sigs) {
          for (const auto& t : s.params) wire_types[to_string(t)] = t;
          wire_types[to_string(s.result)] = s.result;
        }
      }
    }
  }

  const CompiledPred* lookup(const std::string& name, std::size_t arity) {
    std::string key = predicate_key(name, arity);
    auto it = compiled.find(key);
    if (it != compiled.end()) return it->second.get();
    const Predicate* p = program->find(name, arity);
    if (!p) {
      compiled.emplace(key, nullptr);
      return nullptr;
    }
    auto cp = std::make_unique<CompiledPred>();
    cp->name = name;
    cp->arity = arity;
    cp->label = key;
    for (const auto& c : p->clauses) cp->clauses.push_back(ClauseCompiler().clause(c.head, c.body));
    const CompiledPred* raw = cp.get();
    compiled.emplace(key, std::move(cp));
    return raw;
  }

  // -- terms ---------------------------------------------------------------

  RTerm build(const CTerm& t, const Frame& frame) {
    switch (t.kind) {
      case CTerm::Kind::Slot: return (*frame)[static_cast<std::size_t>(t.slot)];
      case CTerm::Kind::Const: return t.value;
      default: break;
    }
    auto s = std::make_shared<RStruct>();
    s->kind = t.kind;
    s->tag = t.tag;
    s->labels = t.labels;
    for (const auto& a : t.args) s->args.push_back(build(a, frame));
    return StructPtr(std::move(s));
  }

  Frame new_frame(int slots) {
    auto f = std::make_shared<std::vector<RTerm>>();
    f->reserve(static_cast<std::size_t>(slots));
    for (int i = 0; i < slots; ++i) f->push_back(std::make_shared<Cell>());
    return f;
  }

  void bind(const CellPtr& c, RTerm t) {
    c->ref = std::move(t);
    trail.push_back(c);
  }

  void undo(std::size_t mark) {
    while (trail.size() > mark) {
      trail.back()->ref.reset();
      trail.pop_back();
    }
  }

  bool unify_value(const RStruct& s, const Value& v) {
    switch (s.kind) {
      case CTerm::Kind::Con:
        if (!v.is_con() || v.tag() != s.tag || v.args().size() != s.args.size()) return false;
        for (std::size_t i = 0; i < s.args.size(); ++i) {
          if (!unify(s.args[i], v.args()[i])) return false;
        }
        return true;
      case CTerm::Kind::List:
        if (!v.is_seq() || v.items().size() != s.args.size()) return false;
        for (std::size_t i = 0; i < s.args.size(); ++i) {
          if (!unify(s.args[i], v.items()[i])) return false;
        }
        return true;
      case CTerm::Kind::Record:
        if (!v.is_record()) return false;
        for (std::size_t i = 0; i < s.args.size(); ++i) {
          const Value* f = v.field(s.labels[i]);
          if (!f || !unify(s.args[i], *f)) return false;
        }
        return true;
      default: return false;
    }
  }

  bool unify(const RTerm& a0, const RTerm& b0) {
    const RTerm& a = deref(a0);
    const RTerm& b = deref(b0);
    auto* ca = std::get_if<CellPtr>(&a);
    auto* cb = std::get_if<CellPtr>(&b);
    if (ca && cb) {
      if (*ca != *cb) bind(*ca, b);
      return true;
    }
    if (ca) {
      bind(*ca, b);
      return true;
    }
    if (cb) {
      bind(*cb, a);
      return true;
    }
    auto* va = std::get_if<Value>(&a);
    auto* vb = std::get_if<Value>(&b);
    if (va && vb) return equivalent(*va, *vb);
    if (va) return unify_value(*std::get<StructPtr>(b), *va);
    if (vb) return unify_value(*std::get<StructPtr>(a), *vb);
    const RStruct& sa = *std::get<StructPtr>(a);
    const RStruct& sb = *std::get<StructPtr>(b);
    if (sa.kind != sb.kind || sa.tag != sb.tag) return false;
    if (sa.kind == CTerm::Kind::Record) {
      for (std::size_t i = 0; i < sa.args.size(); ++i) {
        bool found = false;
        for (std::size_t j = 0; j < sb.args.size() && !found; ++j) {
          if (sa.labels[i] == sb.labels[j]) {
            if (!unify(sa.args[i], sb.args[j])) return false;
            found = true;
          }
        }
        if (!found) return false;
      }
      return true;
    }
    if (sa.args.size() != sb.args.size()) return false;
    for (std::size_t i = 0; i < sa.args.size(); ++i) {
      if (!unify(sa.args[i], sb.args[i])) return false;
    }
    return true;
  }

  std::optional<Value> to_value(const RTerm& t0) {
    const RTerm& t = deref(t0);
    if (auto* v = std::get_if<Value>(&t)) return *v;
    if (std::holds_alternative<CellPtr>(t)) return std::nullopt;
    const RStruct& s = *std::get<StructPtr>(t);
    ValueList args;
    for (const auto& a : s.args) {
      auto v = to_value(a);
      if (!v) return std::nullopt;
      args.push_back(std::move(*v));
    }
    switch (s.kind) {
      case CTerm::Kind::Con: return Value::con(s.tag, std::move(args));
      case CTerm::Kind::List: return Value::seq(std::move(args));
      default: {
        FieldList fields;
        for (std::size_t i = 0; i < args.size(); ++i) fields.emplace_back(s.labels[i], std::move(args[i]));
        return Value::record(std::move(fields));
      }
    }
  }

  Value need(const RTerm& t, const std::string& what) {
    auto v = to_value(t);
    if (!v) throw Error("INSTANTIATION", what + " is not sufficiently instantiated");
    return *v;
  }

  // -- builtins ------------------------------------------------------------

  bool run_builtin(const CGoal& g, const Frame& frame, std::size_t depth) {
    std::vector<RTerm> a;
    a.reserve(g.args.size());
    for (const auto& t : g.args) a.push_back(build(t, frame));
    auto out = [&](Value v) { return unify(a.back(), v); };
    auto input = [&](std::size_t i) { return need(a[i], g.name); };
    switch (g.op) {
      case Op::Eq: return unify(a[0], a[1]);
      case Op::Guard: {
        Value v = input(0);
        return v.is_bool() && v.as_bool();
      }
      case Op::Build: {
        const RTerm& s = deref(a[1]);
        if (auto* sp = std::get_if<StructPtr>(&s)) {
          if (auto v = to_value(s)) {
            if ((*sp)->kind == CTerm::Kind::Con) return unify(a[0], construct((*sp)->tag, v->args(), *hierarchy));
            return unify(a[0], *v);
          }
        }
        return unify(a[0], a[1]);
      }
      case Op::Add: return out(apply_binary(BinaryOp::Add, input(0), input(1)));
      case Op::Sub: return out(apply_binary(BinaryOp::Sub, input(0), input(1)));
      case Op::Mul: return out(apply_binary(BinaryOp::Mul, input(0), input(1)));
      case Op::Div: return out(apply_binary(BinaryOp::Div, input(0), input(1)));
      case Op::EqOp: return out(apply_binary(BinaryOp::Eq, input(0), input(1)));
      case Op::Ne: return out(apply_binary(BinaryOp::Ne, input(0), input(1)));
      case Op::Lt: return out(apply_binary(BinaryOp::Lt, input(0), input(1)));
      case Op::Le: return out(apply_binary(BinaryOp::Le, input(0), input(1)));
      case Op::Gt: return out(apply_binary(BinaryOp::Gt, input(0), input(1)));
      case Op::Ge: return out(apply_binary(BinaryOp::Ge, input(0), input(1)));
      case Op::And:
      case Op::Or:
      case Op::Not:
      case Op::Implies:
      case Op::Iff: {
        std::vector<Value> vs;
        for (std::size_t i = 0; i + 1 < a.size(); ++i) vs.push_back(input(i));
        LogicalOp lop = g.op == Op::And ? LogicalOp::And
                        : g.op == Op::Or ? LogicalOp::Or
                        : g.op == Op::Not ? LogicalOp::Not
                        : g.op == Op::Implies ? LogicalOp::Implies
                                              : LogicalOp::Iff;
        return out(apply_logical(lop, vs));
      }
      case Op::Neg: return out(apply_negate(input(0)));
      case Op::Field: return out(record_field(input(0), input(1).as_string()));
      case Op::Index: return out(seq_index(input(0), input(1)));
      case Op::Range: return out(make_range(input(0), input(1), limits));
      case Op::Function: {
        std::vector<Value> vs;
        for (std::size_t i = 0; i + 1 < a.size(); ++i) vs.push_back(input(i));
        return out(apply_function(g.name, vs));
      }
      case Op::First: {
        Value o = input(0);
        auto elems = builtin_elements(o);
        if (!elems || elems->empty()) return false;
        return unify(a[1], elems->front());
      }
      case Op::Next: {
        Value o = input(0);
        if (o.is_seq() && !o.items().empty()) {
          return unify(a[1], Value::seq(ValueList(o.items().begin() + 1, o.items().end())));
        }
        if (o.is_string() && !o.as_string().empty()) return unify(a[1], Value::string(o.as_string().substr(1)));
        return false;
      }
      case Op::Inside: {
        Value o = input(0);
        return (o.is_seq() && !o.items().empty()) || (o.is_string() && !o.as_string().empty());
      }
      case Op::Cast: return unify(a[2], project_to_ancestor(input(0), input(1).as_string(), *hierarchy));
      case Op::WireRead: {
        std::string type = input(0).as_string();
        Value k = input(1);
        if (!k.is_int() || k.as_int() < 1 || static_cast<std::size_t>(k.as_int()) > wire.size()) {
          throw Error("WIRE_MISSING", "no value at wire position " + to_text(k));
        }
        const Value& v = wire[static_cast<std::size_t>(k.as_int() - 1)];
        auto it = wire_types.find(type);
        if (it != wire_types.end() && !value_conforms(v, it->second, *hierarchy)) return false;
        return unify(a[2], v);
      }
      case Op::Quantify: return quantify(a, depth);
      case Op::Call: break;
    }
    return false;
  }

  std::optional<QuantSymbol> symbol_named(const std::string& name) {
    for (QuantSymbol s : kAllQuantifiers) {
      if (quantifier_name(s) == name) return s;
    }
    return std::nullopt;
  }

  // First value of Out in closure(captures..., element, Out).
  std::optional<Value> apply_closure(const RTerm& closure, const Value& element, std::size_t depth) {
    Value c = need(closure, "quantifier closure");
    if (!c.is_con()) throw Error("TYPE_ERROR", "malformed quantifier closure");
    std::vector<RTerm> args(c.args().begin(), c.args().end());
    args.push_back(element);
    auto out = std::make_shared<Cell>();
    args.push_back(out);
    std::optional<Value> result;
    solve_call(c.tag(), std::move(args), depth, [&]() {
      result = to_value(RTerm(out));
      if (!result) throw Error("INSTANTIATION", "quantifier closure left its result unbound");
      return false;
    });
    return result;
  }

  bool quantify(const std::vector<RTerm>& a, std::size_t depth) {
    auto symbol = symbol_named(need(a[0], "quantifier").as_string());
    if (!symbol) throw Error("TYPE_ERROR", "unknown quantifier");
    Value coll = need(a[1], "quantified collection");
    std::vector<Value> elements;
    if (auto builtin = builtin_elements(coll)) {
      elements = std::move(*builtin);
    } else {
      auto x = std::make_shared<Cell>();
      solve_call("in", {RTerm(coll), RTerm(x)}, depth, [&]() {
        auto v = to_value(RTerm(x));
        if (!v) throw Error("INSTANTIATION", "traversal produced an unbound element");
        elements.push_back(std::move(*v));
        if (elements.size() > limits.max_enumeration) {
          throw Error("ENUMERATION_LIMIT", "traversal exceeds the enumeration limit");
        }
        return true;
      });
    }
    if (elements.size() > limits.max_enumeration) {
      throw Error("ENUMERATION_LIMIT", "collection exceeds the enumeration limit");
    }
    std::vector<QuantItem> items;
    for (const auto& e : elements) {
      auto keep = apply_closure(a[2], e, depth);
      if (!keep || !require_bool(*keep, "quantifier filter")) continue;
      auto body = apply_closure(a[3], e, depth);
      if (!body) continue;
      items.push_back({e, *body});
    }
    return unify(a[4], fold_quantifier(*symbol, items, coll.is_string()));
  }

  // -- resolution ----------------------------------------------------------

  void tick() {
    ++step_count;
    if ((step_count & 0xFFF) == 0 && std::chrono::steady_clock::now() - started > limits.timeout) {
      throw Error("TIMEOUT", "evaluation exceeded the time limit");
    }
  }

  void trace_line(const char* port, const CompiledPred& p, std::size_t depth) {
    if (trace) *trace << port << ' ' << p.label << " depth=" << depth << '\n';
  }

  static bool may_match(const CClause& c, const std::vector<RTerm>& args) {
    if (c.head.empty()) return true;
    const CTerm& h = c.head[0];
    if (h.kind != CTerm::Kind::Con) return true;
    const RTerm& a = deref(args[0]);
    if (auto* v = std::get_if<Value>(&a)) return v->is_con() && v->tag() == h.tag;
    if (auto* s = std::get_if<StructPtr>(&a)) return (*s)->kind == CTerm::Kind::Con && (*s)->tag == h.tag;
    return true;
  }

  // Tries the remaining clauses of the top choicepoint; pops it when exhausted.
  bool resume(ContPtr& cont) {
    ChoicePoint& cp = choices.back();
    const auto& clauses = cp.pred->clauses;
    for (std::size_t i = cp.next_clause; i < clauses.size(); ++i) {
      undo(cp.trail_mark);
      const CClause& c = clauses[i];
      if (!may_match(c, cp.args)) continue;
      Frame frame = new_frame(c.slots);
      bool ok = true;
      for (std::size_t k = 0; ok && k < c.head.size(); ++k) ok = unify(build(c.head[k], frame), cp.args[k]);
      if (!ok) continue;
      std::size_t next = i + 1;
      while (next < clauses.size() && !may_match(clauses[next], cp.args)) ++next;
      auto exit = std::make_shared<ContNode>();
      exit->pred = cp.pred;
      exit->depth = cp.depth;
      exit->next = cp.rest;
      auto body = std::make_shared<ContNode>();
      body->goals = &c.body;
      body->frame = std::move(frame);
      body->depth = cp.depth;
      body->next = std::move(exit);
      cont = std::move(body);
      if (next >= clauses.size() && !trace) {
        choices.pop_back();  // determinate: nothing left to retry
      } else {
        cp.next_clause = next;
      }
      return true;
    }
    undo(cp.trail_mark);
    trace_line("FAIL", *cp.pred, cp.depth);
    choices.pop_back();
    return false;
  }

  bool backtrack(ContPtr& cont, std::size_t base) {
    while (choices.size() > base) {
      if (resume(cont)) return true;
    }
    return false;
  }

  void push_call(const CompiledPred* pred, std::vector<RTerm> args, ContPtr rest, std::size_t depth) {
    if (depth > limits.max_depth) {
      throw Error("DEPTH_LIMIT", "call depth exceeds " + std::to_string(limits.max_depth) + " at " + pred->label);
    }
    trace_line("ENTER", *pred, depth);
    choices.push_back(ChoicePoint{pred, std::move(args), 0, std::move(rest), trail.size(), depth});
  }

  // Runs from `cont`; calls on_solution for each solution while it returns
  // true. Choicepoints above `base` are discarded on return.
  void run(ContPtr cont, std::size_t base, const std::function<bool()>& on_solution) {
    struct Guard {
      Impl& self;
      std::size_t base;
      ~Guard() {
        if (self.choices.size() > base) self.choices.resize(base);
      }
    } guard{*this, base};
    while (true) {
      if (!cont) {
        if (!on_solution() || !backtrack(cont, base)) return;
        continue;
      }
      tick();
      if (!cont->goals) {
        trace_line("EXIT", *cont->pred, cont->depth);
        cont = cont->next;
        continue;
      }
      if (cont->index >= cont->goals->size()) {
        cont = cont->next;
        continue;
      }
      const CGoal& g = (*cont->goals)[cont->index];
      ContPtr rest;
      if (cont->index + 1 < cont->goals->size()) {
        auto r = std::make_shared<ContNode>(*cont);
        r->index = cont->index + 1;
        rest = std::move(r);
      } else {
        rest = cont->next;
      }
      if (g.op == Op::Call) {
        if (!g.resolved) {
          g.pred = lookup(g.name, g.args.size());
          g.resolved = true;
        }
        if (!g.pred) {
          if (!backtrack(cont, base)) return;
          continue;
        }
        std::vector<RTerm> args;
        args.reserve(g.args.size());
        for (const auto& t : g.args) args.push_back(build(t, cont->frame));
        push_call(g.pred, std::move(args), std::move(rest), cont->depth + 1);
        if (!resume(cont) && !backtrack(cont, base)) return;
        continue;
      }
      bool ok;
      try {
        ok = run_builtin(g, cont->frame, cont->depth);
      } catch (const Fail&) {
        ok = false;
      }
      if (ok) {
        cont = std::move(rest);
      } else if (!backtrack(cont, base)) {
        return;
      }
    }
  }

  // Solves pred(args) below the current computation; bindings made by the
  // nested solve are undone afterwards.
  void solve_call(const std::string& name, std::vector<RTerm> args, std::size_t depth,
                  const std::function<bool()>& on_solution) {
    const CompiledPred* pred = lookup(name, args.size());
    if (!pred) return;
    std::size_t mark = trail.size();
    std::size_t base = choices.size();
    ContPtr cont;
    push_call(pred, std::move(args), nullptr, depth + 1);
    try {
      if (resume(cont) || backtrack(cont, base)) run(cont, base, on_solution);
    } catch (...) {
      if (choices.size() > base) choices.resize(base);
      undo(mark);
      throw;
    }
    undo(mark);
  }

  void start() {
    if (solve_nesting == 0) started = std::chrono::steady_clock::now();
  }

  void finish() {
    choices.clear();
    undo(0);
  }
};

Engine::Engine(std::shared_ptr<const LogicProgram> program, Limits limits)
    : impl_(std::make_unique<Impl>(std::move(program), limits)) {}

Engine::~Engine() = default;

void Engine::set_trace(std::ostream* os) { impl_->trace = os; }
void Engine::set_wire(ValueList values) { impl_->wire = std::move(values); }
std::size_t Engine::steps() const { return impl_->step_count; }

std::optional<Value> Engine::call_function(const std::string& pred, const ValueList& args) {
  impl_->start();
  std::vector<RTerm> terms(args.begin(), args.end());
  auto out = std::make_shared<Cell>();
  terms.push_back(out);
  std::optional<Value> result;
  try {
    impl_->solve_call(pred, std::move(terms), 0, [&]() {
      result = impl_->to_value(RTerm(out));
      return false;
    });
  } catch (...) {
    impl_->finish();
    throw;
  }
  impl_->finish();
  return result;
}

bool Engine::prove(const std::string& pred, const ValueList& args) {
  impl_->start();
  bool found = false;
  try {
    impl_->solve_call(pred, std::vector<RTerm>(args.begin(), args.end()), 0, [&]() {
      found = true;
      return false;
    });
  } catch (...) {
    impl_->finish();
    throw;
  }
  impl_->finish();
  return found;
}

std::optional<Value> Engine::run_query(const Query& query) {
  impl_->start();
  ClauseCompiler cc;
  CClause clause = cc.clause({query.result}, query.goals);
  Frame frame = impl_->new_frame(clause.slots);
  RTerm result = impl_->build(clause.head[0], frame);
  auto node = std::make_shared<ContNode>();
  node->goals = &clause.body;
  node->frame = frame;
  std::optional<Value> value;
  try {
    impl_->run(node, impl_->choices.size(), [&]() {
      value = impl_->to_value(result);
      return false;
    });
  } catch (...) {
    impl_->finish();
    throw;
  }
  impl_->finish();
  return value;
}

}  // namespace slam
