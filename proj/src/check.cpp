#include "slam/check.hpp"

#include <iomanip>
#include <sstream>

#include "slam/engine.hpp"
#include "slam/eval.hpp"
#include "slam/parser.hpp"

namespace slam {

using nlohmann::json;

std::string_view check_kind_name(CheckKind k) { return k == CheckKind::Pre ? "pre" : "post"; }

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Error: return "error";
  }
  return "?";
}

CheckKind parse_check_kind(std::string_view s) {
  if (s == "pre") return CheckKind::Pre;
  if (s == "post") return CheckKind::Post;
  throw Error("BAD_FLAG", "check kind must be pre or post, got '" + std::string(s) + "'");
}

Policy parse_policy(std::string_view s) {
  if (s == "abort") return Policy::Abort;
  if (s == "report") return Policy::Report;
  throw Error("BAD_FLAG", "policy must be abort or report, got '" + std::string(s) + "'");
}

namespace {

CheckModeKind parse_annotation(const std::string& s) {
  if (s == "conjunct_only") return CheckModeKind::ConjunctOnly;
  if (s == "approximation") return CheckModeKind::Approximation;
  return CheckModeKind::Full;
}

Verdict parse_verdict(const std::string& s) {
  if (s == "pass") return Verdict::Pass;
  if (s == "fail") return Verdict::Fail;
  return Verdict::Error;
}

struct MatchedRule {
  const FunctionRule* rule = nullptr;
  Bindings env;
};

// First rule whose patterns match, looking through inheritance forwarders.
std::optional<MatchedRule> match_rule(const ClassHierarchy& h, const std::string& fname, const ValueList& args) {
  for (const auto& cand : h.sol_candidates(fname)) {
    if (cand.rule) {
      if (cand.rule->args.size() != args.size()) continue;
      MatchedRule m{cand.rule, {}};
      bool ok = true;
      for (std::size_t i = 0; ok && i < args.size(); ++i) ok = match_pattern(cand.rule->args[i], args[i], m.env);
      if (ok) return m;
    } else if (!args.empty() && args[0].is_con() && args[0].tag() == cand.heir_tag) {
      ValueList projected = args;
      projected[0] = project_to_ancestor(args[0], cand.definer, h);
      if (auto m = match_rule(h, fname, projected)) return m;
    }
  }
  return std::nullopt;
}

class Blame {
 public:
  explicit Blame(Evaluator& ev) : ev_(ev) {}

  // `e` is known not to hold under env.
  FailureLocus walk(const ExprPtr& e, const Bindings& env, const std::string& path) {
    if (auto* l = e->as<Expr::Logical>()) {
      if (l->op == LogicalOp::And) {
        for (std::size_t i = 0; i < l->operands.size(); ++i) {
          if (!holds(l->operands[i], env)) {
            return walk(l->operands[i], env, path + " / and[" + std::to_string(i + 1) + "]");
          }
        }
      } else if (l->op == LogicalOp::Implies && !l->operands.empty()) {
        bool antecedents = true;
        for (std::size_t i = 0; antecedents && i + 1 < l->operands.size(); ++i) {
          antecedents = holds(l->operands[i], env);
        }
        const ExprPtr& last = l->operands.back();
        if (antecedents && !holds(last, env)) {
          return walk(last, env, path + " / implies[" + std::to_string(l->operands.size()) + "]");
        }
      }
    } else if (auto* q = e->as<Expr::Quantifier>(); q && q->symbol == QuantSymbol::Forall) {
      try {
        Value coll = ev_.eval(q->collection, env);
        Bindings inner = env;
        for (const auto& element : ev_.elements(coll)) {
          inner[q->var] = element;
          if (!holds(q->filter, inner)) continue;
          if (!holds(q->body, inner)) {
            return walk(q->body, inner, path + " / forall " + q->var + "=" + to_text(element));
          }
        }
      } catch (const Fail&) {
      } catch (const Error&) {
      }
    }
    return FailureLocus{path, print_expr(e), e->span};
  }

 private:
  bool holds(const ExprPtr& e, const Bindings& env) {
    try {
      Value v = ev_.eval(e, env);
      return v.is_bool() && v.as_bool();
    } catch (const Fail&) {
      return false;
    } catch (const Error&) {
      return false;
    }
  }

  Evaluator& ev_;
};

std::string format_ms(double ms) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << ms;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Records and reports

json record_to_json(const CheckRecord& r) {
  json j;
  j["function"] = r.function;
  j["kind"] = check_kind_name(r.kind);
  j["verdict"] = verdict_name(r.verdict);
  j["annotation"] = check_mode_name(r.annotation);
  j["partial"] = r.partial();
  j["elapsed_ms"] = r.elapsed_ms;
  if (r.verdict == Verdict::Fail) {
    json bindings = json::array();
    for (const auto& [name, v] : r.bindings) {
      bindings.push_back({{"name", name}, {"value", to_text(v)}, {"wire", serialize(v)}});
    }
    j["bindings"] = std::move(bindings);
    if (r.locus) {
      j["locus"] = {{"path", r.locus->path},
                    {"formula", r.locus->formula},
                    {"file", r.locus->span.file},
                    {"line", r.locus->span.line},
                    {"column", r.locus->span.column},
                    {"length", r.locus->span.length}};
    }
  }
  if (r.verdict == Verdict::Error) j["error"] = {{"code", r.error_code}, {"message", r.error_message}};
  return j;
}

CheckRecord record_from_json(const json& j) {
  CheckRecord r;
  r.function = j.at("function").get<std::string>();
  r.kind = parse_check_kind(j.at("kind").get<std::string>());
  r.verdict = parse_verdict(j.at("verdict").get<std::string>());
  r.annotation = parse_annotation(j.at("annotation").get<std::string>());
  r.elapsed_ms = j.at("elapsed_ms").get<double>();
  if (j.contains("bindings")) {
    for (const auto& b : j["bindings"]) {
      r.bindings.emplace_back(b.at("name").get<std::string>(), read_value(b.at("wire").get<std::string>()));
    }
  }
  if (j.contains("locus")) {
    const auto& l = j["locus"];
    FailureLocus locus;
    locus.path = l.at("path").get<std::string>();
    locus.formula = l.at("formula").get<std::string>();
    locus.span.file = l.at("file").get<std::string>();
    locus.span.line = l.at("line").get<int>();
    locus.span.column = l.at("column").get<int>();
    locus.span.length = l.value("length", 0);
    r.locus = std::move(locus);
  }
  if (j.contains("error")) {
    r.error_code = j["error"].at("code").get<std::string>();
    r.error_message = j["error"].at("message").get<std::string>();
  }
  return r;
}

void ReportCollector::add(CheckRecord r) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(r));
}

std::vector<CheckRecord> ReportCollector::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::string report_text(const std::vector<CheckRecord>& records) {
  std::size_t pass = 0, fail = 0, error = 0, partial = 0;
  for (const auto& r : records) {
    pass += r.verdict == Verdict::Pass;
    fail += r.verdict == Verdict::Fail;
    error += r.verdict == Verdict::Error;
    partial += r.partial();
  }
  std::ostringstream os;
  os << records.size() << (records.size() == 1 ? " check" : " checks");
  if (records.empty()) {
    os << "\n";
    return os.str();
  }
  os << ": " << pass << " pass, " << fail << " fail, " << error << " error";
  if (partial) os << " (" << partial << " partial)";
  os << "\n";
  for (const auto& r : records) {
    std::string verdict(verdict_name(r.verdict));
    for (auto& c : verdict) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    os << "  " << std::left << std::setw(5) << verdict << " " << r.function << " " << check_kind_name(r.kind)
       << " [" << check_mode_name(r.annotation) << (r.partial() ? ", partial" : "") << "] "
       << format_ms(r.elapsed_ms) << " ms\n";
    if (r.verdict == Verdict::Fail) {
      if (r.locus) {
        os << "        at " << r.locus->span.to_string() << ": " << r.locus->formula << "\n";
        os << "        path: " << r.locus->path << "\n";
      }
      for (const auto& [name, v] : r.bindings) os << "        " << name << " = " << to_text(v) << "\n";
    }
    if (r.verdict == Verdict::Error) os << "        " << r.error_code << ": " << r.error_message << "\n";
  }
  if (partial) {
    os << "partial: " << partial << " verdict(s) cover only the checked part of their condition\n";
  }
  return os.str();
}

json report_json(const std::vector<CheckRecord>& records) {
  json doc;
  std::size_t pass = 0, fail = 0, error = 0, partial = 0;
  json list = json::array();
  for (const auto& r : records) {
    pass += r.verdict == Verdict::Pass;
    fail += r.verdict == Verdict::Fail;
    error += r.verdict == Verdict::Error;
    partial += r.partial();
    list.push_back(record_to_json(r));
  }
  doc["summary"] = {{"checks", records.size()}, {"pass", pass}, {"fail", fail}, {"error", error},
                    {"partial", partial}, {"exit_status", exit_status(records)}};
  doc["records"] = std::move(list);
  return doc;
}

int exit_status(const std::vector<CheckRecord>& records) {
  int status = kExitPass;
  for (const auto& r : records) {
    if (r.verdict == Verdict::Error) return kExitError;
    if (r.verdict == Verdict::Fail) status = kExitFail;
  }
  return status;
}

// ---------------------------------------------------------------------------
// Runtime

CheckRuntime::CheckRuntime(const Spec& spec, Limits limits) : spec_(spec), limits_(limits) {
  if (!spec_.ok()) throw Error("SPEC_ERROR", "specification did not load");
}

CheckRequest CheckRuntime::make_request(std::string_view function, CheckKind kind,
                                        const ValueList& wire_values) const {
  const ClassHierarchy& h = *spec_.hierarchy;
  auto colon = function.find(':');
  if (colon == std::string_view::npos) {
    throw Error("BAD_FLAG", "function must be written Class:name, got '" + std::string(function) + "'");
  }
  CheckRequest req;
  req.cls = std::string(function.substr(0, colon));
  req.fname = std::string(function.substr(colon + 1));
  req.kind = kind;
  if (!h.find(req.cls)) throw Error("UNKNOWN_CLASS", "unknown class '" + req.cls + "'");
  const FunctionSig* sig = nullptr;
  if (auto it = h.functions.find(req.fname); it != h.functions.end()) {
    for (const auto& s : it->second) {
      if (h.is_descendant(req.cls, s.cls)) {
        sig = &s;
        break;
      }
    }
  }
  if (!sig) throw Error("UNKNOWN_FUNCTION", "class " + req.cls + " has no function '" + req.fname + "'");
  // A name shared with unrelated classes: take the declaration the values
  // belong to.
  auto accepts = [&](const FunctionSig& s) {
    std::size_t n = s.params.size() + (kind == CheckKind::Post ? 1 : 0);
    if (wire_values.size() != n) return false;
    for (std::size_t i = 0; i < s.params.size(); ++i) {
      if (!value_conforms(wire_values[i], s.params[i], h)) return false;
    }
    return true;
  };
  if (!accepts(*sig)) {
    for (const auto& s : h.functions.at(req.fname)) {
      if (accepts(s)) {
        sig = &s;
        break;
      }
    }
  }
  std::size_t expected = sig->params.size() + (kind == CheckKind::Post ? 1 : 0);
  if (wire_values.size() != expected) {
    throw Error("ARITY_MISMATCH", std::string(function) + " " + std::string(check_kind_name(kind)) + " expects " +
                                      std::to_string(expected) + " value(s), document has " +
                                      std::to_string(wire_values.size()));
  }
  for (std::size_t i = 0; i < sig->params.size(); ++i) {
    req.args.push_back(check_wire_value(wire_values[i], sig->params[i], h));
  }
  if (kind == CheckKind::Post) req.result = check_wire_value(wire_values.back(), sig->result, h);
  return req;
}

CheckRecord CheckRuntime::run(const CheckRequest& req) {
  auto started = std::chrono::steady_clock::now();
  CheckRecord rec;
  rec.function = req.function();
  rec.kind = req.kind;
  const ClassHierarchy& h = *spec_.hierarchy;
  std::optional<MatchedRule> matched;
  try {
    matched = match_rule(h, req.fname, req.args);
  } catch (const Error&) {
  }
  if (matched) {
    rec.annotation = (req.kind == CheckKind::Pre ? matched->rule->pre : matched->rule->post).mode;
  }
  try {
    if (req.kind == CheckKind::Post && !req.result) throw Error("MISSING_RESULT", "post check without a result");
    ValueList wire = req.args;
    if (req.kind == CheckKind::Post) wire.push_back(*req.result);
    Engine engine(spec_.program, limits_);
    engine.set_wire(std::move(wire));
    std::string pred = req.kind == CheckKind::Pre ? pre_pred(req.fname) : post_pred(req.fname);
    bool holds = false;
    run_with_large_stack([&] { holds = engine.prove(pred, {}); });
    rec.verdict = holds ? Verdict::Pass : Verdict::Fail;
  } catch (const Error& e) {
    rec.verdict = Verdict::Error;
    rec.error_code = e.code();
    rec.error_message = e.what();
  }
  if (rec.verdict == Verdict::Fail) {
    if (matched) {
      for (const auto& [name, v] : matched->env) rec.bindings.emplace_back(name, v);
      Bindings env = matched->env;
      if (req.kind == CheckKind::Post) {
        env["Result"] = *req.result;
        rec.bindings.emplace_back("Result", *req.result);
      }
      const Condition& cond = req.kind == CheckKind::Pre ? matched->rule->pre : matched->rule->post;
      Evaluator ev(spec_.hierarchy, limits_);
      run_with_large_stack([&] {
        rec.locus = Blame(ev).walk(cond.checked_part, env, std::string(check_kind_name(req.kind)));
      });
    } else {
      SourceSpan none;
      rec.locus = FailureLocus{"call", "no rule of " + req.fname + " matches the arguments", none};
      for (std::size_t i = 0; i < req.args.size(); ++i) {
        rec.bindings.emplace_back("arg" + std::to_string(i + 1), req.args[i]);
      }
    }
  }
  rec.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

CheckRecord CheckRuntime::check(const CheckRequest& req) {
  CheckRecord rec = run(req);
  collector_.add(rec);
  return rec;
}

CheckRecord CheckRuntime::pre_check(const CheckRequest& req) {
  CheckRequest r = req;
  r.kind = CheckKind::Pre;
  return check(r);
}

CheckRecord CheckRuntime::post_check(const CheckRequest& req) {
  CheckRequest r = req;
  r.kind = CheckKind::Post;
  return check(r);
}

Value CheckRuntime::post_return_check(const CheckRequest& req, Policy policy) {
  CheckRecord rec = post_check(req);
  if (rec.verdict == Verdict::Fail && policy == Policy::Abort) throw PolicyAbort(rec);
  return *req.result;
}

CheckRecord check_document(CheckRuntime& runtime, const Spec& spec, std::string_view function, CheckKind kind,
                           std::string_view document) {
  WireDoc doc = read_doc(document);
  if (doc.fingerprint != spec.fingerprint) {
    throw Error("FINGERPRINT_MISMATCH",
                "document was written for spec " + doc.fingerprint + ", loaded spec is " + spec.fingerprint);
  }
  return runtime.check(runtime.make_request(function, kind, doc.values));
}

}  // namespace slam
