#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace slam {

enum class ValueKind { Int, Real, Bool, String, Seq, Record, Con };

std::string_view kind_name(ValueKind kind);

class Value;
using ValueList = std::vector<Value>;
using Field = std::pair<std::string, Value>;
using FieldList = std::vector<Field>;

/// Immutable runtime datum. Aggregates share their storage, so copies are
/// cheap and values may be passed between threads freely.
///
/// Constructor values carry the class-qualified tag (e.g. `PointCartesian`).
class Value {
 public:
  Value() : data_(std::int64_t{0}) {}

  static Value integer(std::int64_t v);
  static Value real(double v);
  static Value boolean(bool v);
  static Value string(std::string v);
  static Value seq(ValueList items);
  static Value record(FieldList fields);
  static Value con(std::string tag, ValueList args);

  ValueKind kind() const noexcept { return static_cast<ValueKind>(data_.index()); }

  bool is_int() const noexcept { return kind() == ValueKind::Int; }
  bool is_real() const noexcept { return kind() == ValueKind::Real; }
  bool is_bool() const noexcept { return kind() == ValueKind::Bool; }
  bool is_string() const noexcept { return kind() == ValueKind::String; }
  bool is_seq() const noexcept { return kind() == ValueKind::Seq; }
  bool is_record() const noexcept { return kind() == ValueKind::Record; }
  bool is_con() const noexcept { return kind() == ValueKind::Con; }
  bool is_number() const noexcept { return is_int() || is_real(); }

  std::int64_t as_int() const;
  double as_real() const;
  /// Int or Real widened to double.
  double as_number() const;
  bool as_bool() const;
  const std::string& as_string() const;
  const ValueList& items() const;
  const FieldList& fields() const;
  const std::string& tag() const;
  const ValueList& args() const;

  /// Record field lookup. Looks through a constructor whose single
  /// component is a record, so `t.amount` works on `Transactiontran({...})`.
  const Value* field(std::string_view label) const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  struct SeqData {
    ValueList items;
  };
  struct RecordData {
    FieldList fields;
  };
  struct ConData {
    std::string tag;
    ValueList args;
  };

  using Data = std::variant<std::int64_t, double, bool, std::string,
                            std::shared_ptr<const SeqData>, std::shared_ptr<const RecordData>,
                            std::shared_ptr<const ConData>>;

  explicit Value(Data d) : data_(std::move(d)) {}

  Data data_;
};

/// Relative tolerance used when comparing reals in formulas.
inline constexpr double kRealTolerance = 1e-9;

bool reals_close(double a, double b);

/// Formula-level equality: numbers compare by value with the real tolerance
/// (so 10 equals 10.0), aggregates compare element-wise, records ignore field
/// order. Structural `==` stays exact.
bool equivalent(const Value& a, const Value& b);

/// Three-way ordering for max/min and the relational operators. Defined for
/// numbers and strings only; returns nullopt-like false through `ok`.
int compare_ordered(const Value& a, const Value& b, bool& ok);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

/// Human-readable rendering, e.g. `PointCartesian(1, 2.5)` or `{name: "A"}`.
std::string to_text(const Value& v);

}  // namespace slam
