#include "slam/builtins.hpp"

#include <cmath>
#include <sstream>

#include "slam/diagnostic.hpp"

namespace slam {

namespace {

[[noreturn]] void type_error(const std::string& msg) { throw Error("TYPE_ERROR", msg); }

void require_number(const Value& v, std::string_view what) {
  if (!v.is_number()) type_error(std::string(what) + " expects a number, got " + to_text(v));
}

Value add_numbers(const Value& a, const Value& b) {
  if (a.is_int() && b.is_int()) return Value::integer(a.as_int() + b.as_int());
  return Value::real(a.as_number() + b.as_number());
}

Value mul_numbers(const Value& a, const Value& b) {
  if (a.is_int() && b.is_int()) return Value::integer(a.as_int() * b.as_int());
  return Value::real(a.as_number() * b.as_number());
}

}  // namespace

Limits parse_limits(std::string_view text) {
  Limits limits;
  std::stringstream in{std::string(text)};
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("BAD_LIMITS", "expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    std::string val = item.substr(eq + 1);
    std::size_t n = 0;
    try {
      if (val.empty() || val.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument(val);
      n = std::stoull(val);
    } catch (const std::exception&) {
      n = 0;
    }
    if (n == 0) throw Error("BAD_LIMITS", "'" + val + "' is not a positive integer");
    if (key == "depth") limits.max_depth = n;
    else if (key == "enum") limits.max_enumeration = n;
    else if (key == "timeout") limits.timeout = std::chrono::seconds(n);
    else throw Error("BAD_LIMITS", "unknown limit '" + key + "'");
  }
  return limits;
}

bool require_bool(const Value& v, std::string_view what) {
  if (!v.is_bool()) type_error(std::string(what) + " must be Bool, got " + to_text(v));
  return v.as_bool();
}

Value apply_binary(BinaryOp op, const Value& lhs, const Value& rhs) {
  switch (op) {
    case BinaryOp::Eq: return Value::boolean(equivalent(lhs, rhs));
    case BinaryOp::Ne: return Value::boolean(!equivalent(lhs, rhs));
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: {
      bool ok = false;
      int c = compare_ordered(lhs, rhs, ok);
      if (!ok) type_error("cannot order " + to_text(lhs) + " and " + to_text(rhs));
      switch (op) {
        case BinaryOp::Lt: return Value::boolean(c < 0);
        case BinaryOp::Le: return Value::boolean(c <= 0);
        case BinaryOp::Gt: return Value::boolean(c > 0);
        default: return Value::boolean(c >= 0);
      }
    }
    default: break;
  }
  require_number(lhs, binary_op_symbol(op));
  require_number(rhs, binary_op_symbol(op));
  switch (op) {
    case BinaryOp::Add: return add_numbers(lhs, rhs);
    case BinaryOp::Sub:
      if (lhs.is_int() && rhs.is_int()) return Value::integer(lhs.as_int() - rhs.as_int());
      return Value::real(lhs.as_number() - rhs.as_number());
    case BinaryOp::Mul: return mul_numbers(lhs, rhs);
    case BinaryOp::Div:
      if (rhs.as_number() == 0.0) throw Error("DIV_ZERO", "division of " + to_text(lhs) + " by zero");
      return Value::real(lhs.as_number() / rhs.as_number());
    default: break;
  }
  type_error("unsupported operator");
}

Value apply_logical(LogicalOp op, const std::vector<Value>& operands) {
  std::vector<bool> bs;
  for (const auto& v : operands) bs.push_back(require_bool(v, "logical operand"));
  switch (op) {
    case LogicalOp::And: {
      bool r = true;
      for (bool b : bs) r = r && b;
      return Value::boolean(r);
    }
    case LogicalOp::Or: {
      bool r = false;
      for (bool b : bs) r = r || b;
      return Value::boolean(r);
    }
    case LogicalOp::Not:
      if (bs.size() != 1) type_error("'not' takes one operand");
      return Value::boolean(!bs[0]);
    case LogicalOp::Implies: {
      if (bs.empty()) type_error("'implies' without operands");
      bool r = bs.back();
      for (std::size_t i = bs.size() - 1; i-- > 0;) r = !bs[i] || r;
      return Value::boolean(r);
    }
    case LogicalOp::Iff: {
      if (bs.empty()) type_error("'iff' without operands");
      bool r = bs[0];
      for (std::size_t i = 1; i < bs.size(); ++i) r = (r == bs[i]);
      return Value::boolean(r);
    }
  }
  type_error("unknown connective");
}

Value apply_negate(const Value& v) {
  if (v.is_int()) return Value::integer(-v.as_int());
  if (v.is_real()) return Value::real(-v.as_real());
  type_error("cannot negate " + to_text(v));
}

Value apply_function(std::string_view name, const std::vector<Value>& args) {
  auto arity = [&](std::size_t n) {
    if (args.size() != n) type_error(std::string(name) + " takes " + std::to_string(n) + " argument(s)");
  };
  if (name == "length") {
    arity(1);
    if (args[0].is_seq()) return Value::integer(static_cast<std::int64_t>(args[0].items().size()));
    if (args[0].is_string()) return Value::integer(static_cast<std::int64_t>(args[0].as_string().size()));
    type_error("length of " + to_text(args[0]));
  }
  if (name == "concat") {
    arity(2);
    if (args[0].is_seq() && args[1].is_seq()) {
      ValueList items = args[0].items();
      items.insert(items.end(), args[1].items().begin(), args[1].items().end());
      return Value::seq(std::move(items));
    }
    if (args[0].is_string() && args[1].is_string()) return Value::string(args[0].as_string() + args[1].as_string());
    type_error("concat of " + to_text(args[0]) + " and " + to_text(args[1]));
  }
  if (name == "tail") {
    arity(1);
    if (args[0].is_seq()) {
      const auto& items = args[0].items();
      if (items.empty()) throw Fail("tail of an empty sequence");
      return Value::seq(ValueList(items.begin() + 1, items.end()));
    }
    if (args[0].is_string()) {
      if (args[0].as_string().empty()) throw Fail("tail of an empty string");
      return Value::string(args[0].as_string().substr(1));
    }
    type_error("tail of " + to_text(args[0]));
  }
  if (name == "abs") {
    arity(1);
    require_number(args[0], "abs");
    if (args[0].is_int()) return Value::integer(args[0].as_int() < 0 ? -args[0].as_int() : args[0].as_int());
    return Value::real(std::fabs(args[0].as_real()));
  }
  if (name == "sqrt" || name == "sin" || name == "cos") {
    arity(1);
    require_number(args[0], name);
    double x = args[0].as_number();
    if (name == "sqrt") {
      if (x < 0) throw Error("DOMAIN_ERROR", "sqrt of negative number " + to_text(args[0]));
      return Value::real(std::sqrt(x));
    }
    return Value::real(name == "sin" ? std::sin(x) : std::cos(x));
  }
  throw Error("UNDEFINED_FUNCTION", "no built-in function '" + std::string(name) + "'");
}

Value record_field(const Value& v, std::string_view label) {
  if (!v.is_record() && !v.is_con()) type_error("field '" + std::string(label) + "' of " + to_text(v));
  const Value* f = v.field(label);
  if (!f) throw Fail("no field '" + std::string(label) + "' in " + to_text(v));
  return *f;
}

Value seq_index(const Value& seq, const Value& index) {
  if (!index.is_int()) type_error("index must be an integer, got " + to_text(index));
  std::int64_t i = index.as_int();
  if (seq.is_seq()) {
    const auto& items = seq.items();
    if (i < 1 || i > static_cast<std::int64_t>(items.size())) {
      throw Fail("index " + std::to_string(i) + " out of range 1.." + std::to_string(items.size()));
    }
    return items[static_cast<std::size_t>(i - 1)];
  }
  if (seq.is_string()) {
    const auto& s = seq.as_string();
    if (i < 1 || i > static_cast<std::int64_t>(s.size())) throw Fail("string index out of range");
    return Value::string(s.substr(static_cast<std::size_t>(i - 1), 1));
  }
  type_error("cannot index " + to_text(seq));
}

Value make_range(const Value& lo, const Value& hi, const Limits& limits) {
  if (!lo.is_int() || !hi.is_int()) type_error("range bounds must be integers");
  std::int64_t a = lo.as_int(), b = hi.as_int();
  ValueList items;
  if (b >= a) {
    auto n = static_cast<std::uint64_t>(b - a) + 1;
    if (n > limits.max_enumeration) {
      throw Error("ENUMERATION_LIMIT", "range " + std::to_string(a) + ".." + std::to_string(b) +
                                           " exceeds the enumeration limit");
    }
    items.reserve(n);
    for (std::int64_t i = a; i <= b; ++i) items.push_back(Value::integer(i));
  }
  return Value::seq(std::move(items));
}

std::optional<std::vector<Value>> builtin_elements(const Value& v) {
  if (v.is_seq()) return v.items();
  if (v.is_string()) {
    std::vector<Value> out;
    for (char c : v.as_string()) out.push_back(Value::string(std::string(1, c)));
    return out;
  }
  return std::nullopt;
}

Value fold_quantifier(QuantSymbol symbol, const std::vector<QuantItem>& items, bool string_source) {
  auto body_true = [](const QuantItem& it) { return require_bool(it.body, "quantifier body"); };
  switch (symbol) {
    case QuantSymbol::Exists: {
      bool r = false;
      for (auto it = items.rbegin(); it != items.rend(); ++it) r = body_true(*it) || r;
      return Value::boolean(r);
    }
    case QuantSymbol::Forall: {
      bool r = true;
      for (auto it = items.rbegin(); it != items.rend(); ++it) r = body_true(*it) && r;
      return Value::boolean(r);
    }
    case QuantSymbol::Count: {
      std::int64_t n = 0;
      for (const auto& it : items) n += body_true(it) ? 1 : 0;
      return Value::integer(n);
    }
    case QuantSymbol::Sum:
    case QuantSymbol::Product: {
      bool sum = symbol == QuantSymbol::Sum;
      Value acc = Value::integer(sum ? 0 : 1);
      for (auto it = items.rbegin(); it != items.rend(); ++it) {
        require_number(it->body, sum ? "sum" : "product");
        acc = sum ? add_numbers(it->body, acc) : mul_numbers(it->body, acc);
      }
      return acc;
    }
    case QuantSymbol::Max:
    case QuantSymbol::Min:
    case QuantSymbol::Maximizer:
    case QuantSymbol::Minimizer: {
      if (items.empty()) {
        throw Error("EMPTY_EXTREMUM",
                    std::string(quantifier_keyword(symbol)) + " over an empty collection");
      }
      bool want_max = symbol == QuantSymbol::Max || symbol == QuantSymbol::Maximizer;
      std::size_t best = items.size() - 1;
      for (std::size_t i = items.size() - 1; i-- > 0;) {
        bool ok = false;
        int c = compare_ordered(items[i].body, items[best].body, ok);
        if (!ok) type_error("cannot order " + to_text(items[i].body) + " and " + to_text(items[best].body));
        if (want_max ? c >= 0 : c <= 0) best = i;
      }
      bool value = symbol == QuantSymbol::Max || symbol == QuantSymbol::Min;
      return value ? items[best].body : items[best].element;
    }
    case QuantSymbol::Select:
      for (const auto& it : items) {
        if (body_true(it)) return it.element;
      }
      throw Error("NO_SELECTION", "select found no element satisfying the condition");
    case QuantSymbol::Filter: {
      if (string_source) {
        std::string s;
        for (const auto& it : items) {
          if (!body_true(it)) s += it.element.as_string();
        }
        return Value::string(std::move(s));
      }
      ValueList out;
      for (const auto& it : items) {
        if (!body_true(it)) out.push_back(it.element);
      }
      return Value::seq(std::move(out));
    }
    case QuantSymbol::Map:
    case QuantSymbol::SeqCons: {
      ValueList out;
      for (const auto& it : items) out.push_back(it.body);
      return Value::seq(std::move(out));
    }
  }
  type_error("unknown quantifier");
}

}  // namespace slam
