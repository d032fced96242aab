#include "slam/eval.hpp"

#include <pthread.h>

#include <exception>

namespace slam {

namespace {

struct DepthScope {
  std::size_t& depth;
  explicit DepthScope(std::size_t& d) : depth(d) { ++depth; }
  ~DepthScope() { --depth; }
};

}  // namespace

Evaluator::Evaluator(std::shared_ptr<const ClassHierarchy> hierarchy, Limits limits)
    : hierarchy_(std::move(hierarchy)), limits_(limits), started_(std::chrono::steady_clock::now()) {}

void Evaluator::enter() {
  if (depth_ > limits_.max_depth) {
    throw Error("DEPTH_LIMIT", "call depth exceeds " + std::to_string(limits_.max_depth));
  }
  if ((++steps_ & 0xFFF) == 0 && std::chrono::steady_clock::now() - started_ > limits_.timeout) {
    throw Error("TIMEOUT", "evaluation exceeded the time limit");
  }
}

const std::vector<SolCandidate>& Evaluator::candidates(const std::string& fname) {
  auto it = candidates_.find(fname);
  if (it == candidates_.end()) it = candidates_.emplace(fname, hierarchy_->sol_candidates(fname)).first;
  return it->second;
}

bool Evaluator::item_is_collection(const std::string& cls, const TraversalRule& tr, std::size_t item) {
  auto key = std::make_pair(&tr, item);
  auto it = item_kinds_.find(key);
  if (it == item_kinds_.end()) it = item_kinds_.emplace(key, hierarchy_->item_is_collection(cls, tr, item)).first;
  return it->second;
}

Value Evaluator::call(const std::string& fname, const ValueList& args) {
  DepthScope scope(depth_);
  enter();
  for (const auto& cand : candidates(fname)) {
    if (cand.rule) {
      ExprPtr sol = executable_solution(*cand.rule);
      if (!sol || cand.rule->args.size() != args.size()) continue;
      Bindings env;
      bool ok = true;
      for (std::size_t i = 0; ok && i < args.size(); ++i) ok = match_pattern(cand.rule->args[i], args[i], env);
      if (!ok) continue;
      try {
        return eval(sol, env);
      } catch (const Fail&) {
      }
    } else if (!args.empty() && args[0].is_con() && args[0].tag() == cand.heir_tag) {
      ValueList projected = args;
      projected[0] = project_to_ancestor(args[0], cand.definer, *hierarchy_);
      try {
        return call(fname, projected);
      } catch (const Fail&) {
      }
    }
  }
  throw Fail("no rule of " + fname + " applies");
}

bool Evaluator::condition_holds(Mode mode, const std::string& fname, const ValueList& args,
                                const Value* result) {
  DepthScope scope(depth_);
  enter();
  for (const auto& cand : candidates(fname)) {
    if (cand.rule) {
      if (cand.rule->args.size() != args.size()) continue;
      Bindings env;
      bool ok = true;
      for (std::size_t i = 0; ok && i < args.size(); ++i) ok = match_pattern(cand.rule->args[i], args[i], env);
      if (!ok) continue;
      if (result) env["Result"] = *result;
      const Condition& c = mode == Mode::Pre ? cand.rule->pre : cand.rule->post;
      try {
        Value v = eval(c.checked_part, env);
        if (v.is_bool() && v.as_bool()) return true;
      } catch (const Fail&) {
      }
    } else if (!args.empty() && args[0].is_con() && args[0].tag() == cand.heir_tag) {
      ValueList projected = args;
      projected[0] = project_to_ancestor(args[0], cand.definer, *hierarchy_);
      if (condition_holds(mode, fname, projected, result)) return true;
    }
  }
  return false;
}

bool Evaluator::pre_holds(const std::string& fname, const ValueList& args) {
  return condition_holds(Mode::Pre, fname, args, nullptr);
}

bool Evaluator::post_holds(const std::string& fname, const ValueList& args, const Value& result) {
  return condition_holds(Mode::Post, fname, args, &result);
}

void Evaluator::collect(const Value& v, std::vector<Value>& out) {
  if (auto builtin = builtin_elements(v)) {
    out.insert(out.end(), builtin->begin(), builtin->end());
  } else if (v.is_con()) {
    const ClassInfo* info = hierarchy_->find(hierarchy_->class_of_tag(v.tag()));
    if (!info) return;
    for (const auto& tr : info->def.traversal_rules) {
      Bindings env;
      if (!match_pattern(tr.shape, v, env)) continue;
      for (std::size_t i = 0; i < tr.items.size(); ++i) {
        Value item;
        try {
          item = eval(tr.items[i], env);
        } catch (const Fail&) {
          continue;
        }
        if (item_is_collection(info->def.name, tr, i)) {
          DepthScope scope(depth_);
          enter();
          collect(item, out);
        } else {
          out.push_back(std::move(item));
        }
      }
    }
  }
  if (out.size() > limits_.max_enumeration) {
    throw Error("ENUMERATION_LIMIT", "traversal exceeds the enumeration limit");
  }
}

std::vector<Value> Evaluator::elements(const Value& collection) {
  std::vector<Value> out;
  collect(collection, out);
  return out;
}

Value Evaluator::eval(const ExprPtr& e, const Bindings& env) {
  auto values = [&](const std::vector<ExprPtr>& xs) {
    ValueList out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(eval(x, env));
    return out;
  };
  auto invoke = [&](const std::string& fname, ValueList args) -> Value {
    if (is_builtin_function(fname) && !hierarchy_->is_function(fname)) return apply_function(fname, args);
    return call(fname, args);
  };
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Expr::Var>) {
          auto it = env.find(n.name);
          if (it == env.end()) throw Error("UNBOUND_VARIABLE", "unbound name '" + n.name + "'");
          return it->second;
        } else if constexpr (std::is_same_v<T, Expr::ResultVar>) {
          auto it = env.find("Result");
          if (it == env.end()) throw Error("UNBOUND_VARIABLE", "'Result' is not available here");
          return it->second;
        } else if constexpr (std::is_same_v<T, Expr::Construct>) {
          return construct(n.tag, values(n.args), *hierarchy_);
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          return invoke(n.fname, values(n.args));
        } else if constexpr (std::is_same_v<T, Expr::DottedCall>) {
          ValueList args{eval(n.receiver, env)};
          for (auto& a : values(n.args)) args.push_back(std::move(a));
          return invoke(n.fname, std::move(args));
        } else if constexpr (std::is_same_v<T, Expr::QualifiedCall>) {
          ValueList args{project_to_ancestor(eval(n.receiver, env), n.cls, *hierarchy_)};
          for (auto& a : values(n.args)) args.push_back(std::move(a));
          return invoke(n.fname, std::move(args));
        } else if constexpr (std::is_same_v<T, Expr::Logical>) {
          return apply_logical(n.op, values(n.operands));
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          Value l = eval(n.lhs, env);
          Value r = eval(n.rhs, env);
          return apply_binary(n.op, l, r);
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          return apply_negate(eval(n.operand, env));
        } else if constexpr (std::is_same_v<T, Expr::Quantifier>) {
          Value coll = eval(n.collection, env);
          std::vector<QuantItem> items;
          Bindings inner = env;
          for (const auto& element : elements(coll)) {
            inner[n.var] = element;
            try {
              if (!require_bool(eval(n.filter, inner), "quantifier filter")) continue;
            } catch (const Fail&) {
              continue;
            }
            try {
              items.push_back({element, eval(n.body, inner)});
            } catch (const Fail&) {
            }
          }
          return fold_quantifier(n.symbol, items, coll.is_string());
        } else if constexpr (std::is_same_v<T, Expr::RecordAccess>) {
          return record_field(eval(n.record, env), n.label);
        } else if constexpr (std::is_same_v<T, Expr::SeqIndex>) {
          Value s = eval(n.seq, env);
          Value i = eval(n.index, env);
          return seq_index(s, i);
        } else if constexpr (std::is_same_v<T, Expr::Range>) {
          Value lo = eval(n.lo, env);
          Value hi = eval(n.hi, env);
          return make_range(lo, hi, limits_);
        } else if constexpr (std::is_same_v<T, Expr::SeqLiteral>) {
          return Value::seq(values(n.elems));
        } else {
          FieldList fields;
          for (const auto& [label, x] : n.fields) fields.emplace_back(label, eval(x, env));
          return Value::record(std::move(fields));
        }
      },
      e->node);
}

void run_with_large_stack(const std::function<void()>& fn) {
  struct Task {
    const std::function<void()>* fn;
    std::exception_ptr error;
  } task{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, std::size_t{1} << 30);
  pthread_t thread;
  auto body = [](void* arg) -> void* {
    auto* t = static_cast<Task*>(arg);
    try {
      (*t->fn)();
    } catch (...) {
      t->error = std::current_exception();
    }
    return nullptr;
  };
  if (pthread_create(&thread, &attr, body, &task) != 0) {
    pthread_attr_destroy(&attr);
    fn();
    return;
  }
  pthread_join(thread, nullptr);
  pthread_attr_destroy(&attr);
  if (task.error) std::rethrow_exception(task.error);
}

}  // namespace slam
