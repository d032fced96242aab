#include "slam/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "slam/engine.hpp"
#include "slam/eval.hpp"
#include "slam/parser.hpp"

namespace slam {

namespace {

Spec finish(std::vector<ClassDef> defs, Diagnostics diags) {
  Spec spec;
  spec.diags = std::move(diags);
  if (has_errors(spec.diags)) return spec;
  auto analyzed = analyze(defs);
  spec.defs = std::move(defs);
  spec.diags.insert(spec.diags.end(), analyzed.diags.begin(), analyzed.diags.end());
  if (!analyzed.hierarchy) return spec;
  spec.hierarchy = analyzed.hierarchy;
  auto program = std::make_shared<LogicProgram>(translate(spec.hierarchy));
  spec.fingerprint = fingerprint_hex(fingerprint(*program));
  spec.program = std::move(program);
  return spec;
}

[[noreturn]] void throw_diagnostics(const std::string& code, const Diagnostics& diags) {
  throw Error(code, format_diagnostics(diags));
}

// Top-level call of a spec function, with its signature.
struct TopCall {
  std::string fname;
  std::vector<ExprPtr> args;
};

std::optional<TopCall> top_level_call(const ExprPtr& e, const ClassHierarchy& h) {
  TopCall call;
  if (auto* c = e->as<Expr::Call>()) {
    call.fname = c->fname;
    call.args = c->args;
  } else if (auto* d = e->as<Expr::DottedCall>()) {
    call.fname = d->fname;
    call.args.push_back(d->receiver);
    call.args.insert(call.args.end(), d->args.begin(), d->args.end());
  } else {
    return std::nullopt;
  }
  auto it = h.functions.find(call.fname);
  if (it == h.functions.end()) return std::nullopt;
  for (const auto& sig : it->second) {
    if (sig.params.size() == call.args.size()) return call;
  }
  return std::nullopt;
}

// A name may be declared by unrelated classes; the arguments are coerced
// for the first signature they already conform to, else the first one
// that accepts them.
ValueList coerce_args(const ClassHierarchy& h, const std::string& fname, const ValueList& values) {
  const auto& sigs = h.functions.at(fname);
  auto conforms = [&](const FunctionSig& sig) {
    if (sig.params.size() != values.size()) return false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!value_conforms(values[i], sig.params[i], h)) return false;
    }
    return true;
  };
  auto apply = [&](const FunctionSig& sig) {
    ValueList out;
    for (std::size_t i = 0; i < values.size(); ++i) out.push_back(coerce(values[i], sig.params[i], h));
    return out;
  };
  for (const auto& sig : sigs) {
    if (conforms(sig)) return apply(sig);
  }
  for (const auto& sig : sigs) {
    if (sig.params.size() != values.size()) continue;
    try {
      return apply(sig);
    } catch (const Error&) {
    }
  }
  return values;
}

}  // namespace

std::string format_diagnostics(const Diagnostics& diags) {
  std::string out;
  for (const auto& d : diags) out += d.to_string() + "\n";
  return out;
}

Spec load_spec_source(std::string_view source, const std::string& file) {
  auto parsed = parse_spec(source, file);
  return finish(std::move(parsed.defs), std::move(parsed.diags));
}

Spec load_spec(const std::vector<std::string>& paths) {
  std::vector<ClassDef> defs;
  Diagnostics diags;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      SourceSpan span;
      span.file = path;
      diags.push_back(make_error("IO_ERROR", span, "cannot read '" + path + "'"));
      continue;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    auto parsed = parse_spec(buf.str(), path);
    diags.insert(diags.end(), parsed.diags.begin(), parsed.diags.end());
    for (auto& d : parsed.defs) defs.push_back(std::move(d));
  }
  return finish(std::move(defs), std::move(diags));
}

ExprPtr parse_query(const Spec& spec, std::string_view expr_text) {
  if (!spec.ok()) throw Error("SPEC_ERROR", "specification did not load");
  auto parsed = parse_expr(expr_text, "<expr>");
  if (!parsed.ok()) throw_diagnostics("PARSE", parsed.diags);
  Diagnostics diags;
  ExprPtr resolved = resolve_expression(parsed.expr, *spec.hierarchy, diags);
  if (has_errors(diags)) throw_diagnostics("RESOLVE", diags);
  return resolved;
}

Value evaluate(const Spec& spec, std::string_view expr_text, const Limits& limits, std::ostream* trace) {
  ExprPtr expr = parse_query(spec, expr_text);
  auto program = std::make_shared<LogicProgram>(*spec.program);
  auto no_rule = [&] { return Error("NO_APPLICABLE_RULE", "no solution for " + std::string(expr_text)); };

  if (auto call = top_level_call(expr, *spec.hierarchy)) {
    std::vector<Query> queries;
    for (const auto& a : call->args) queries.push_back(translate_query(a, *program));
    Engine engine(program, limits);
    engine.set_trace(trace);
    ValueList args;
    for (const auto& q : queries) {
      auto v = engine.run_query(q);
      if (!v) throw no_rule();
      args.push_back(*v);
    }
    args = coerce_args(*spec.hierarchy, call->fname, args);
    auto result = engine.call_function(sol_pred(call->fname), args);
    if (!result) throw no_rule();
    return *result;
  }
  Query query = translate_query(expr, *program);
  Engine engine(program, limits);
  engine.set_trace(trace);
  auto result = engine.run_query(query);
  if (!result) throw no_rule();
  return *result;
}

Value evaluate_direct(const Spec& spec, std::string_view expr_text, const Limits& limits) {
  ExprPtr expr = parse_query(spec, expr_text);
  Evaluator evaluator(spec.hierarchy, limits);
  Value out;
  run_with_large_stack([&] {
    try {
      if (auto call = top_level_call(expr, *spec.hierarchy)) {
        ValueList args;
        for (const auto& a : call->args) args.push_back(evaluator.eval(a, {}));
        args = coerce_args(*spec.hierarchy, call->fname, args);
        out = evaluator.call(call->fname, args);
      } else {
        out = evaluator.eval(expr, {});
      }
    } catch (const Fail& f) {
      throw Error("NO_APPLICABLE_RULE", f.what());
    }
  });
  return out;
}

}  // namespace slam
