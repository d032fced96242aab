#include "slam/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "slam/diagnostic.hpp"

namespace slam {

std::string_view kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::Int: return "int";
    case ValueKind::Real: return "real";
    case ValueKind::Bool: return "bool";
    case ValueKind::String: return "str";
    case ValueKind::Seq: return "seq";
    case ValueKind::Record: return "rec";
    case ValueKind::Con: return "con";
  }
  return "?";
}

Value Value::integer(std::int64_t v) { return Value(Data(std::in_place_index<0>, v)); }
Value Value::real(double v) { return Value(Data(std::in_place_index<1>, v)); }
Value Value::boolean(bool v) { return Value(Data(std::in_place_index<2>, v)); }
Value Value::string(std::string v) { return Value(Data(std::in_place_index<3>, std::move(v))); }

Value Value::seq(ValueList items) {
  return Value(Data(std::make_shared<const SeqData>(SeqData{std::move(items)})));
}

Value Value::record(FieldList fields) {
  return Value(Data(std::make_shared<const RecordData>(RecordData{std::move(fields)})));
}

Value Value::con(std::string tag, ValueList args) {
  return Value(Data(std::make_shared<const ConData>(ConData{std::move(tag), std::move(args)})));
}

namespace {

[[noreturn]] void kind_error(ValueKind want, ValueKind got) {
  throw Error("TYPE_ERROR", "expected " + std::string(kind_name(want)) + " value, got " +
                                std::string(kind_name(got)));
}

}  // namespace

std::int64_t Value::as_int() const {
  if (!is_int()) kind_error(ValueKind::Int, kind());
  return std::get<std::int64_t>(data_);
}

double Value::as_real() const {
  if (!is_real()) kind_error(ValueKind::Real, kind());
  return std::get<double>(data_);
}

double Value::as_number() const {
  if (is_int()) return static_cast<double>(std::get<std::int64_t>(data_));
  if (is_real()) return std::get<double>(data_);
  kind_error(ValueKind::Real, kind());
}

bool Value::as_bool() const {
  if (!is_bool()) kind_error(ValueKind::Bool, kind());
  return std::get<bool>(data_);
}

const std::string& Value::as_string() const {
  if (!is_string()) kind_error(ValueKind::String, kind());
  return std::get<std::string>(data_);
}

const ValueList& Value::items() const {
  if (!is_seq()) kind_error(ValueKind::Seq, kind());
  return std::get<std::shared_ptr<const SeqData>>(data_)->items;
}

const FieldList& Value::fields() const {
  if (!is_record()) kind_error(ValueKind::Record, kind());
  return std::get<std::shared_ptr<const RecordData>>(data_)->fields;
}

const std::string& Value::tag() const {
  if (!is_con()) kind_error(ValueKind::Con, kind());
  return std::get<std::shared_ptr<const ConData>>(data_)->tag;
}

const ValueList& Value::args() const {
  if (!is_con()) kind_error(ValueKind::Con, kind());
  return std::get<std::shared_ptr<const ConData>>(data_)->args;
}

const Value* Value::field(std::string_view label) const {
  if (is_con() && args().size() == 1 && args()[0].is_record()) return args()[0].field(label);
  if (!is_record()) return nullptr;
  for (const auto& [name, v] : fields()) {
    if (name == label) return &v;
  }
  return nullptr;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueKind::Int: return a.as_int() == b.as_int();
    case ValueKind::Real: {
      double x = a.as_real(), y = b.as_real();
      return x == y || (std::isnan(x) && std::isnan(y));
    }
    case ValueKind::Bool: return a.as_bool() == b.as_bool();
    case ValueKind::String: return a.as_string() == b.as_string();
    case ValueKind::Seq: return a.items() == b.items();
    case ValueKind::Record: return a.fields() == b.fields();
    case ValueKind::Con: return a.tag() == b.tag() && a.args() == b.args();
  }
  return false;
}

bool reals_close(double a, double b) {
  if (a == b) return true;
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= kRealTolerance * scale;
}

bool equivalent(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) {
    if (a.is_int() && b.is_int()) return a.as_int() == b.as_int();
    return reals_close(a.as_number(), b.as_number());
  }
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueKind::Bool: return a.as_bool() == b.as_bool();
    case ValueKind::String: return a.as_string() == b.as_string();
    case ValueKind::Seq: {
      const auto& x = a.items();
      const auto& y = b.items();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!equivalent(x[i], y[i])) return false;
      }
      return true;
    }
    case ValueKind::Record: {
      if (a.fields().size() != b.fields().size()) return false;
      for (const auto& [name, v] : a.fields()) {
        const Value* other = b.field(name);
        if (other == nullptr || !equivalent(v, *other)) return false;
      }
      return true;
    }
    case ValueKind::Con: {
      if (a.tag() != b.tag() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (!equivalent(a.args()[i], b.args()[i])) return false;
      }
      return true;
    }
    default: return false;
  }
}

int compare_ordered(const Value& a, const Value& b, bool& ok) {
  ok = true;
  if (a.is_int() && b.is_int()) {
    return a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
  }
  if (a.is_number() && b.is_number()) {
    double x = a.as_number(), y = b.as_number();
    if (reals_close(x, y)) return 0;
    return x < y ? -1 : 1;
  }
  if (a.is_string() && b.is_string()) {
    int c = a.as_string().compare(b.as_string());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  ok = false;
  return 0;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void quote_into(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
}

void text_into(std::string& out, const Value& v) {
  switch (v.kind()) {
    case ValueKind::Int: out += std::to_string(v.as_int()); break;
    case ValueKind::Real: {
      std::string s = format_real(v.as_real());
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      break;
    }
    case ValueKind::Bool: out += v.as_bool() ? "true" : "false"; break;
    case ValueKind::String: quote_into(out, v.as_string()); break;
    case ValueKind::Seq: {
      out += '[';
      bool first = true;
      for (const auto& item : v.items()) {
        if (!first) out += ", ";
        first = false;
        text_into(out, item);
      }
      out += ']';
      break;
    }
    case ValueKind::Record: {
      out += '{';
      bool first = true;
      for (const auto& [name, item] : v.fields()) {
        if (!first) out += ", ";
        first = false;
        out += name + ": ";
        text_into(out, item);
      }
      out += '}';
      break;
    }
    case ValueKind::Con: {
      out += v.tag() + '(';
      bool first = true;
      for (const auto& item : v.args()) {
        if (!first) out += ", ";
        first = false;
        text_into(out, item);
      }
      out += ')';
      break;
    }
  }
}

}  // namespace

std::string to_text(const Value& v) {
  std::string out;
  text_into(out, v);
  return out;
}

}  // namespace slam
