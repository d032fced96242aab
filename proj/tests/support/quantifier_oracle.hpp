#pragma once

// Random quantifier expressions paired with a brute-force expected outcome.
// The expected value is computed here with plain loops over the element
// list; nothing from the engine or the evaluator is used.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slam/value.hpp"

namespace slam::testing {

inline const std::vector<std::string>& quantifier_keywords() {
  static const std::vector<std::string> words{"exists", "forall", "sum",    "product", "count",  "select", "max",
                                              "argmax", "min",    "argmin", "filter",  "map", "seqof"};
  return words;
}

/// Number with its kind, so integer arithmetic stays exact.
struct Num {
  bool real = false;
  std::int64_t i = 0;
  double d = 0;

  double as_double() const { return real ? d : static_cast<double>(i); }
  Value value() const { return real ? Value::real(d) : Value::integer(i); }
};

inline Num num_int(std::int64_t v) { return {false, v, 0}; }
inline Num num_real(double v) { return {true, 0, v}; }

inline Num num_add(Num a, Num b) {
  if (!a.real && !b.real) return num_int(a.i + b.i);
  return num_real(a.as_double() + b.as_double());
}
inline Num num_mul(Num a, Num b) {
  if (!a.real && !b.real) return num_int(a.i * b.i);
  return num_real(a.as_double() * b.as_double());
}
inline Num num_sub(Num a, Num b) {
  if (!a.real && !b.real) return num_int(a.i - b.i);
  return num_real(a.as_double() - b.as_double());
}

/// Expected outcome: a value or an error code.
struct Outcome {
  std::optional<Value> value;
  std::string error;
};

struct QuantifierCase {
  std::string keyword;
  std::string collection_kind;  // seq, range or tree
  std::string expression;
  Outcome expected;
};

/// Numbers compare by value within `tolerance` (relative, floor 1), aggregates
/// and constructors element-wise, everything else exactly.
inline bool outcome_matches(const Value& expected, const Value& actual, double tolerance) {
  if (expected.is_number() && actual.is_number()) {
    double a = expected.is_int() ? static_cast<double>(expected.as_int()) : expected.as_real();
    double b = actual.is_int() ? static_cast<double>(actual.as_int()) : actual.as_real();
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tolerance * scale;
  }
  if (expected.is_seq() && actual.is_seq()) {
    const auto& xs = expected.items();
    const auto& ys = actual.items();
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!outcome_matches(xs[i], ys[i], tolerance)) return false;
    }
    return true;
  }
  if (expected.is_con() && actual.is_con()) {
    if (expected.tag() != actual.tag() || expected.args().size() != actual.args().size()) return false;
    for (std::size_t i = 0; i < expected.args().size(); ++i) {
      if (!outcome_matches(expected.args()[i], actual.args()[i], tolerance)) return false;
    }
    return true;
  }
  if (expected.is_record() && actual.is_record()) {
    if (expected.fields().size() != actual.fields().size()) return false;
    for (const auto& [label, v] : expected.fields()) {
      const Value* other = actual.field(label);
      if (!other || !outcome_matches(v, *other, tolerance)) return false;
    }
    return true;
  }
  return expected == actual;
}

class QuantifierCaseGen {
 public:
  explicit QuantifierCaseGen(unsigned seed) : rng_(seed) {}

  QuantifierCase make(const std::string& keyword) {
    QuantifierCase c;
    c.keyword = keyword;
    bool reals = pick(3) == 0;
    std::vector<Num> elements;
    std::string collection;
    switch (pick(3)) {
      case 0: {
        c.collection_kind = "seq";
        std::size_t n = pick(21);
        collection = "[";
        for (std::size_t i = 0; i < n; ++i) {
          Num x = reals ? num_real(random_real()) : num_int(range(-4, 4));
          elements.push_back(x);
          collection += (i ? ", " : "") + literal(x);
        }
        collection += "]";
        break;
      }
      case 1: {
        c.collection_kind = "range";
        reals = false;
        std::int64_t lo = range(-5, 5);
        std::int64_t hi = lo - 1 + range(0, 20);
        for (std::int64_t x = lo; x <= hi; ++x) elements.push_back(num_int(x));
        collection = "(" + std::to_string(lo) + ")..(" + std::to_string(hi) + ")";
        break;
      }
      default: {
        c.collection_kind = "tree";
        std::size_t n = pick(21);
        std::vector<Num> values;
        for (std::size_t i = 0; i < n; ++i) values.push_back(reals ? num_real(random_real()) : num_int(range(-4, 4)));
        collection = tree(values, 0, n, elements);
        break;
      }
    }

    // filter: none or x >= k
    bool filtered = pick(2) == 0;
    std::int64_t k = range(-3, 3);
    std::vector<Num> kept;
    for (const auto& x : elements) {
      if (!filtered || x.as_double() >= static_cast<double>(k)) kept.push_back(x);
    }
    std::string head = keyword + " x in " + collection + (filtered ? " | x >= " + paren(k) : "") + " . ";

    std::int64_t m = range(-3, 3);
    std::int64_t a = range(-2, 2);
    std::int64_t b = range(-3, 3);
    auto test = [&](const Num& x) { return x.as_double() > static_cast<double>(m); };
    auto linear = [&](const Num& x) { return num_add(num_mul(x, num_int(a)), num_int(b)); };
    auto square = [&](const Num& x) {
      Num d = num_sub(x, num_int(m));
      return num_mul(d, d);
    };
    std::string test_text = "x > " + paren(m);
    std::string linear_text = "x * " + paren(a) + " + " + paren(b);
    std::string square_text = "(x - " + paren(m) + ") * (x - " + paren(m) + ")";

    Outcome& out = c.expected;
    if (keyword == "exists" || keyword == "forall" || keyword == "count" || keyword == "select" ||
        keyword == "filter") {
      c.expression = head + test_text;
      bool any = false;
      bool all = true;
      std::int64_t count = 0;
      std::optional<Num> first;
      ValueList rest;
      for (const auto& x : kept) {
        bool t = test(x);
        any = any || t;
        all = all && t;
        count += t;
        if (t && !first) first = x;
        if (!t) rest.push_back(x.value());
      }
      if (keyword == "exists") out.value = Value::boolean(any);
      if (keyword == "forall") out.value = Value::boolean(all);
      if (keyword == "count") out.value = Value::integer(count);
      if (keyword == "select") {
        if (first) out.value = first->value();
        else out.error = "NO_SELECTION";
      }
      if (keyword == "filter") out.value = Value::seq(rest);
    } else if (keyword == "sum" || keyword == "product") {
      c.expression = head + linear_text;
      bool sum = keyword == "sum";
      Num acc = num_int(sum ? 0 : 1);
      // right fold
      for (auto it = kept.rbegin(); it != kept.rend(); ++it) acc = sum ? num_add(linear(*it), acc) : num_mul(linear(*it), acc);
      out.value = acc.value();
    } else if (keyword == "max" || keyword == "min") {
      c.expression = head + linear_text;
      if (kept.empty()) {
        out.error = "EMPTY_EXTREMUM";
      } else {
        Num best = linear(kept[0]);
        for (const auto& x : kept) {
          Num y = linear(x);
          if (keyword == "max" ? y.as_double() > best.as_double() : y.as_double() < best.as_double()) best = y;
        }
        out.value = best.value();
      }
    } else if (keyword == "argmax" || keyword == "argmin") {
      c.expression = head + square_text;
      if (kept.empty()) {
        out.error = "EMPTY_EXTREMUM";
      } else {
        std::size_t best = 0;
        for (std::size_t i = 1; i < kept.size(); ++i) {
          double y = square(kept[i]).as_double();
          double z = square(kept[best]).as_double();
          if (keyword == "argmax" ? y > z : y < z) best = i;
        }
        out.value = kept[best].value();
      }
    } else {
      c.expression = head + linear_text;
      ValueList ys;
      for (const auto& x : kept) ys.push_back(linear(x).value());
      out.value = Value::seq(ys);
    }
    return c;
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::int64_t range(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }
  // quarter steps plus an occasional irrational-looking value
  double random_real() {
    if (pick(4) == 0) return std::uniform_real_distribution<double>(-3.0, 3.0)(rng_);
    return static_cast<double>(range(-12, 12)) / 4.0;
  }

  static std::string paren(std::int64_t v) { return v < 0 ? "(" + std::to_string(v) + ")" : std::to_string(v); }

  static std::string literal(const Num& x) {
    std::string text = x.real ? format_real(x.d) : std::to_string(x.i);
    if (x.real && text.find_first_of(".eE") == std::string::npos) text += ".0";
    return text[0] == '-' ? "(" + text + ")" : text;
  }

  // Balanced-ish random tree over values[lo, hi); collects the in-order elements.
  std::string tree(const std::vector<Num>& values, std::size_t lo, std::size_t hi, std::vector<Num>& inorder) {
    if (lo == hi) return "Empty()";
    std::size_t mid = lo + pick(hi - lo);
    std::string left = tree(values, lo, mid, inorder);
    inorder.push_back(values[mid]);
    std::string right = tree(values, mid + 1, hi, inorder);
    return "Node(" + left + ", " + literal(values[mid]) + ", " + right + ")";
  }

  std::mt19937 rng_;
};

}  // namespace slam::testing
