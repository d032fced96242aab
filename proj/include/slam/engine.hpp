#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "slam/builtins.hpp"
#include "slam/logic_ir.hpp"
#include "slam/value.hpp"

namespace slam {

/// Depth-first solver for a translated program.
///
/// Runs iteratively: the continuation is a linked list of pending goal
/// sequences and exit markers, alternatives live on an explicit choicepoint
/// stack, and bindings are undone through a trail. Builtins that throw
/// `Fail` make the current branch fail; any other `Error` aborts the solve.
///
/// With a trace stream set, every call writes `ENTER name/arity depth=N`,
/// `EXIT ...` and `FAIL ...` lines, N counting the calls in progress.
class Engine {
 public:
  explicit Engine(std::shared_ptr<const LogicProgram> program, Limits limits = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  void set_trace(std::ostream* os);
  /// Values read by `wire_read`, position 1 first.
  void set_wire(ValueList values);

  /// First solution of `pred(args..., R)`; the value of R.
  std::optional<Value> call_function(const std::string& pred, const ValueList& args);
  /// Whether `pred(args...)` has a solution.
  bool prove(const std::string& pred, const ValueList& args);
  /// First solution of a translated query; the value of its result term.
  std::optional<Value> run_query(const Query& query);

  /// Resolution steps taken so far.
  std::size_t steps() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace slam
