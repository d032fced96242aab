#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "slam/builtins.hpp"
#include "slam/semantics.hpp"
#include "slam/value.hpp"

namespace slam {

/// Direct interpreter over the resolved rules. Tries rules in the same order
/// as the logic program and uses the same builtins, so both produce the same
/// values; it just cannot revisit a call that already succeeded.
class Evaluator {
 public:
  explicit Evaluator(std::shared_ptr<const ClassHierarchy> hierarchy, Limits limits = {});

  /// Throws `Fail` when no rule applies, `Error` for hard errors.
  Value eval(const ExprPtr& e, const Bindings& env);
  Value call(const std::string& fname, const ValueList& args);

  /// Some applicable rule has a true precondition (checked part).
  bool pre_holds(const std::string& fname, const ValueList& args);
  /// Some applicable rule has a true postcondition (checked part).
  bool post_holds(const std::string& fname, const ValueList& args, const Value& result);

  /// Elements produced by traversing a collection value, in traversal order.
  std::vector<Value> elements(const Value& collection);

  const ClassHierarchy& hierarchy() const { return *hierarchy_; }

 private:
  enum class Mode { Pre, Post };
  bool condition_holds(Mode mode, const std::string& fname, const ValueList& args, const Value* result);
  void collect(const Value& v, std::vector<Value>& out);
  void enter();
  const std::vector<SolCandidate>& candidates(const std::string& fname);
  bool item_is_collection(const std::string& cls, const TraversalRule& tr, std::size_t item);

  std::shared_ptr<const ClassHierarchy> hierarchy_;
  Limits limits_;
  std::map<std::string, std::vector<SolCandidate>> candidates_;
  std::map<std::pair<const TraversalRule*, std::size_t>, bool> item_kinds_;
  std::size_t depth_ = 0;
  std::size_t steps_ = 0;
  std::chrono::steady_clock::time_point started_;
};

/// Runs `fn` on a thread with a large stack; rethrows its exception.
void run_with_large_stack(const std::function<void()>& fn);

}  // namespace slam
