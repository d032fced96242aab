#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slam/ast.hpp"
#include "slam/value.hpp"

namespace slam {

/// Recoverable failure: the current rule does not apply (index out of range,
/// missing field, no matching rule). The engine backtracks; the evaluator
/// moves on to the next candidate rule.
class Fail : public std::exception {
 public:
  explicit Fail(std::string reason) : reason_(std::move(reason)) {}
  const char* what() const noexcept override { return reason_.c_str(); }

 private:
  std::string reason_;
};

struct Limits {
  std::size_t max_depth = 10000;
  std::size_t max_enumeration = 1000000;
  std::chrono::milliseconds timeout{30000};
};

/// Parses `depth=N,enum=N,timeout=SECONDS` (any subset). Throws Error("BAD_LIMITS").
Limits parse_limits(std::string_view text);

// Operations shared by the direct evaluator and the logic engine, so both
// compute identical values.

Value apply_binary(BinaryOp op, const Value& lhs, const Value& rhs);
Value apply_logical(LogicalOp op, const std::vector<Value>& operands);
Value apply_negate(const Value& v);
/// `length`, `concat`, `tail`, `sqrt`, `abs`, `sin`, `cos`.
Value apply_function(std::string_view name, const std::vector<Value>& args);
Value record_field(const Value& v, std::string_view label);
/// 1-based. Out of range fails.
Value seq_index(const Value& seq, const Value& index);
Value make_range(const Value& lo, const Value& hi, const Limits& limits);

/// Elements of a sequence or string (single-character strings); nullopt for
/// other values, whose elements come from traversal rules.
std::optional<std::vector<Value>> builtin_elements(const Value& v);

/// Element that survived the filter, paired with its body value.
struct QuantItem {
  Value element;
  Value body;
};

/// Combines the surviving elements of a quantifier. `filter` drops the
/// elements whose body holds; `string_source` makes it return a string.
Value fold_quantifier(QuantSymbol symbol, const std::vector<QuantItem>& items, bool string_source);

bool require_bool(const Value& v, std::string_view what);

}  // namespace slam
