#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "slam/ast.hpp"
#include "slam/semantics.hpp"
#include "slam/value.hpp"

namespace slam {

/// Term of the logic program. Variables are named per clause; `_` is an
/// anonymous variable, distinct at each occurrence.
struct Term {
  enum class Kind { Var, Const, Atom, Con, List, Record };

  Kind kind = Kind::Const;
  std::string name;  // variable name, atom text or constructor tag
  Value value;       // Const
  std::vector<Term> args;
  std::vector<std::string> labels;  // Record, parallel to args

  static Term var(std::string name);
  static Term constant(Value v);
  static Term atom(std::string text);
  static Term con(std::string tag, std::vector<Term> args);
  static Term list(std::vector<Term> items);
  static Term record(std::vector<std::string> labels, std::vector<Term> args);

  bool operator==(const Term&) const = default;
};

struct Goal {
  enum class Kind {
    Call,     // pred(args)
    Builtin,  // op(args..., out)
    Eq,       // lhs = rhs
    Guard,    // lhs == true
    Build     // lhs is rhs
  };

  Kind kind = Kind::Call;
  std::string name;  // predicate or builtin operation
  std::vector<Term> args;
  Term lhs;
  Term rhs;

  static Goal call(std::string pred, std::vector<Term> args);
  static Goal builtin(std::string op, std::vector<Term> args);
  static Goal eq(Term lhs, Term rhs);
  static Goal guard(Term t);
  static Goal build(Term out, Term structure);
};

struct Clause {
  std::vector<Term> head;
  std::vector<Goal> body;
};

struct Predicate {
  std::string name;
  std::size_t arity = 0;
  std::vector<Clause> clauses;
};

/// Key used in the predicate table: `name/arity`.
std::string predicate_key(const std::string& name, std::size_t arity);

struct LogicProgram {
  std::shared_ptr<const ClassHierarchy> hierarchy;
  std::map<std::string, Predicate> predicates;
  int closure_counter = 0;

  const Predicate* find(const std::string& name, std::size_t arity) const;
  void add_clause(const std::string& name, Clause clause);
};

/// Predicate names for rule modes and helpers.
std::string sol_pred(const std::string& fname);
std::string pre_pred(const std::string& fname);
std::string post_pred(const std::string& fname);
std::string cast_pred(const std::string& cls);
std::string read_pred(const TypeExpr& t);
std::string quantifier_pred(QuantSymbol s);

/// Translates every rule, traversal and inheritance forwarder of the
/// hierarchy into clauses.
LogicProgram translate(std::shared_ptr<const ClassHierarchy> hierarchy);

struct Query {
  std::vector<Goal> goals;
  Term result;
};

/// Translates a resolved free-standing expression into goals computing it.
/// Closures needed by its quantifiers are added to `program`.
Query translate_query(const ExprPtr& expr, LogicProgram& program);

/// Canonical text, predicates sorted by key, one clause per line.
std::string dump(const LogicProgram& program);
std::string print_term(const Term& t);
std::string print_goal(const Goal& g);

/// FNV-1a 64 of the dump.
std::uint64_t fingerprint(const LogicProgram& program);
std::string fingerprint_hex(std::uint64_t fp);

}  // namespace slam
