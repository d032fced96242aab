#include "slam/serializer.hpp"

#include <charconv>
#include <sstream>

#include "slam/diagnostic.hpp"

namespace slam {

namespace {

void escape_into(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
}

void write_into(std::string& out, const Value& v) {
  auto open = [&](std::string_view kind) {
    out += "<v k=\"";
    out += kind;
    out += '"';
  };
  auto children = [&](bool any) {
    if (!any) {
      out += "/>";
      return false;
    }
    out += '>';
    return true;
  };
  switch (v.kind()) {
    case ValueKind::Int:
      open("int");
      out += '>';
      out += std::to_string(v.as_int());
      out += "</v>";
      return;
    case ValueKind::Real:
      open("real");
      out += '>';
      out += format_real(v.as_real());
      out += "</v>";
      return;
    case ValueKind::Bool:
      open("bool");
      out += v.as_bool() ? ">true</v>" : ">false</v>";
      return;
    case ValueKind::String:
      open("str");
      out += '>';
      escape_into(out, v.as_string());
      out += "</v>";
      return;
    case ValueKind::Seq:
      open("seq");
      if (children(!v.items().empty())) {
        for (const auto& item : v.items()) write_into(out, item);
        out += "</v>";
      }
      return;
    case ValueKind::Record:
      open("rec");
      if (children(!v.fields().empty())) {
        for (const auto& [label, item] : v.fields()) {
          out += "<f n=\"";
          escape_into(out, label);
          out += "\">";
          write_into(out, item);
          out += "</f>";
        }
        out += "</v>";
      }
      return;
    case ValueKind::Con:
      open("con");
      out += " t=\"";
      escape_into(out, v.tag());
      out += '"';
      if (children(!v.args().empty())) {
        for (const auto& item : v.args()) write_into(out, item);
        out += "</v>";
      }
      return;
  }
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void malformed(const std::string& what) const {
    throw Error("MALFORMED_WIRE", what + " at byte " + std::to_string(pos_));
  }

  bool at_end() const { return pos_ >= text_.size(); }

  bool lookahead(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void expect(std::string_view s) {
    if (!lookahead(s)) malformed("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  // Attribute value up to the closing quote, entities decoded.
  std::string attribute() {
    expect("\"");
    std::string out = text_until('"');
    expect("\"");
    return out;
  }

  // Character data up to the next '<' (or the given terminator), entities decoded.
  std::string text_until(char stop) {
    std::string out;
    while (true) {
      if (at_end()) malformed("unterminated text");
      char c = text_[pos_];
      if (c == stop) return out;
      if (c == '<' || c == '>' || c == '"' || c == '\'') malformed("unescaped '" + std::string(1, c) + "'");
      if (c == '&') {
        static constexpr std::pair<std::string_view, char> entities[] = {
            {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
        bool known = false;
        for (const auto& [name, ch] : entities) {
          if (lookahead(name)) {
            out += ch;
            pos_ += name.size();
            known = true;
            break;
          }
        }
        if (!known) malformed("unknown entity");
        continue;
      }
      out += c;
      ++pos_;
    }
  }

  Value value(int depth = 0) {
    if (depth > 10000) malformed("nesting too deep");
    expect("<v k=");
    std::string kind = attribute();
    if (kind == "int" || kind == "real" || kind == "bool" || kind == "str") {
      expect(">");
      std::string body = text_until('<');
      expect("</v>");
      return scalar(kind, body);
    }
    std::string tag;
    if (kind == "con") {
      expect(" t=");
      tag = attribute();
      if (tag.empty()) malformed("empty constructor tag");
    } else if (kind != "seq" && kind != "rec") {
      malformed("unknown kind '" + kind + "'");
    }
    bool empty = false;
    if (lookahead("/>")) {
      pos_ += 2;
      empty = true;
    } else {
      expect(">");
      if (lookahead("</v>")) malformed("aggregate without children must self-close");
    }
    if (kind == "rec") {
      FieldList fields;
      while (!empty && !lookahead("</v>")) {
        expect("<f n=");
        std::string label = attribute();
        expect(">");
        Value item = value(depth + 1);
        expect("</f>");
        fields.emplace_back(std::move(label), std::move(item));
      }
      if (!empty) expect("</v>");
      return Value::record(std::move(fields));
    }
    ValueList items;
    while (!empty && !lookahead("</v>")) items.push_back(value(depth + 1));
    if (!empty) expect("</v>");
    return kind == "seq" ? Value::seq(std::move(items)) : Value::con(std::move(tag), std::move(items));
  }

  Value scalar(const std::string& kind, const std::string& body) {
    const char* first = body.data();
    const char* last = body.data() + body.size();
    if (kind == "str") return Value::string(body);
    if (kind == "bool") {
      if (body == "true") return Value::boolean(true);
      if (body == "false") return Value::boolean(false);
      malformed("bad boolean '" + body + "'");
    }
    if (kind == "int") {
      std::int64_t n = 0;
      auto res = std::from_chars(first, last, n);
      if (body.empty() || res.ec != std::errc() || res.ptr != last || std::to_string(n) != body) {
        malformed("bad integer '" + body + "'");
      }
      return Value::integer(n);
    }
    double d = 0;
    auto res = std::from_chars(first, last, d);
    if (body.empty() || res.ec != std::errc() || res.ptr != last || format_real(d) != body) {
      malformed("bad real '" + body + "'");
    }
    return Value::real(d);
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

bool is_hex64(std::string_view s) {
  if (s.size() != 16) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

void serialize(const Value& v, std::ostream& out) { out << serialize(v); }

std::string serialize(const Value& v) {
  std::string out;
  write_into(out, v);
  return out;
}

std::string write_doc(const WireDoc& doc) {
  std::string out = "<slamx version=\"" + std::to_string(kWireVersion) + "\" spec=\"" + doc.fingerprint + "\">";
  for (const auto& v : doc.values) write_into(out, v);
  out += "</slamx>";
  return out;
}

WireDoc read_doc(std::string_view text) {
  Reader in(text);
  in.expect("<slamx version=");
  std::string version = in.attribute();
  if (version != std::to_string(kWireVersion)) {
    bool numeric = !version.empty() && version.find_first_not_of("0123456789") == std::string::npos;
    if (!numeric) in.malformed("bad version '" + version + "'");
    throw Error("WIRE_VERSION", "unsupported wire version " + version);
  }
  in.expect(" spec=");
  WireDoc doc;
  doc.fingerprint = in.attribute();
  if (!is_hex64(doc.fingerprint)) in.malformed("bad spec fingerprint");
  in.expect(">");
  while (!in.lookahead("</slamx>")) {
    if (in.at_end()) in.malformed("missing '</slamx>'");
    doc.values.push_back(in.value());
  }
  in.expect("</slamx>");
  if (!in.at_end()) in.malformed("trailing garbage");
  return doc;
}

Value read_value(std::string_view text) {
  Reader in(text);
  Value v = in.value();
  if (!in.at_end()) in.malformed("trailing garbage");
  return v;
}

namespace {

void check_tags(const Value& v, const ClassHierarchy& h) {
  switch (v.kind()) {
    case ValueKind::Seq:
      for (const auto& item : v.items()) check_tags(item, h);
      return;
    case ValueKind::Record:
      for (const auto& [label, item] : v.fields()) check_tags(item, h);
      return;
    case ValueKind::Con: {
      const ResolvedAlt* alt = h.alternative(v.tag());
      if (!alt) throw Error("UNKNOWN_TAG", "unknown constructor tag '" + v.tag() + "'");
      if (alt->components.size() != v.args().size()) {
        throw Error("ARITY_MISMATCH", v.tag() + " has " + std::to_string(alt->components.size()) +
                                          " component(s), wire value has " + std::to_string(v.args().size()));
      }
      for (const auto& item : v.args()) check_tags(item, h);
      return;
    }
    default: return;
  }
}

}  // namespace

Value check_wire_value(const Value& v, const TypeExpr& t, const ClassHierarchy& h) {
  check_tags(v, h);
  if (!value_conforms(v, t, h)) {
    throw Error("WRONG_CLASS", to_text(v) + " is not a value of " + to_string(t));
  }
  return coerce(v, t, h);
}

Value read_value(std::string_view cls, std::string_view text, const ClassHierarchy& h) {
  return check_wire_value(read_value(text), TypeExpr::named(std::string(cls)), h);
}

}  // namespace slam
