#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include "slam/ast.hpp"
#include "slam/semantics.hpp"
#include "slam/value.hpp"

namespace slam {

/// Wire format (`.slamx`). A value is one of
///
///     <v k="int">-3</v>      <v k="real">2.5</v>     <v k="bool">true</v>
///     <v k="str">a &amp; b</v>
///     <v k="seq">...</v>     <v k="rec"><f n="label">...</f>...</v>
///     <v k="con" t="PointCartesian">...</v>
///
/// with `<v k=".."/>` for an aggregate without children and `<v k="str"></v>`
/// for the empty string. No whitespace anywhere; reals use the shortest
/// decimal that reads back exactly. Documents wrap their values:
///
///     <slamx version="1" spec="0123456789abcdef">...</slamx>
///
/// Reading accepts exactly what writing produces. Syntax errors throw
/// Error("MALFORMED_WIRE"); a header version other than 1 throws
/// Error("WIRE_VERSION") before the payload is looked at.

inline constexpr int kWireVersion = 1;

void serialize(const Value& v, std::ostream& out);
std::string serialize(const Value& v);

struct WireDoc {
  std::string fingerprint;  // 16 hex digits
  ValueList values;         // arguments, then the result for postconditions
};

std::string write_doc(const WireDoc& doc);
WireDoc read_doc(std::string_view text);

/// One serialized value, no header.
Value read_value(std::string_view text);

/// Checks a value read from the wire against the hierarchy: every tag must
/// exist (UNKNOWN_TAG) with the declared number of components
/// (ARITY_MISMATCH), and the whole value must have type `t`, a constructor
/// of class C being accepted for C and its ancestors (WRONG_CLASS).
/// Returns the value coerced to `t`.
Value check_wire_value(const Value& v, const TypeExpr& t, const ClassHierarchy& h);

/// read_value + check_wire_value for class `cls`.
Value read_value(std::string_view cls, std::string_view text, const ClassHierarchy& h);

}  // namespace slam
