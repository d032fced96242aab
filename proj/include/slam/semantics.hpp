#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slam/ast.hpp"
#include "slam/diagnostic.hpp"
#include "slam/value.hpp"

namespace slam {

/// One alternative of a class after inheritance has been applied. Subclasses
/// receive copies of their parents' alternatives requalified with their own
/// name (`ColouredPointPolar`), refined in place by local redefinitions.
struct ResolvedAlt {
  std::string cls;
  std::string tag;        // as written
  std::string qualified;  // cls + tag
  std::vector<AttrComponent> components;
  bool labeled = false;
  bool local = true;  // declared (or redeclared) in this class
  SourceSpan span;
};

struct ClassInfo {
  ClassDef def;  // tags, calls and patterns resolved
  std::vector<ResolvedAlt> alts;
  std::vector<std::string> ancestors;  // linearized, nearest first, excluding the class

  const ResolvedAlt* alt(std::string_view tag) const;
  bool traversable() const { return !def.traversal_rules.empty(); }
  TypeExpr self_type() const;
};

struct FunctionSig {
  std::string cls;  // declaring class
  OpDecl decl;
  std::vector<TypeExpr> params;  // receiver first for observers/modifiers
  TypeExpr result;
};

/// One candidate in the ordered list tried when evaluating `f(args)`:
/// either a rule, or the inheritance forwarder for one alternative of a
/// class that inherits `f` without defining it.
struct SolCandidate {
  const FunctionRule* rule = nullptr;
  std::string heir;          // class inheriting f (wrapper only)
  std::string heir_tag;      // qualified tag of the heir's alternative
  std::string definer;       // ancestor whose rules are used
  std::string definer_tag;   // matching alternative of the definer
  /// Projection only drops trailing components; the wrapper can be written
  /// with patterns alone.
  bool truncation_only = true;

  bool is_wrapper() const { return rule == nullptr; }
};

class ClassHierarchy {
 public:
  std::map<std::string, ClassInfo> classes;
  /// Qualified tag -> (class, index into alts).
  std::map<std::string, std::pair<std::string, std::size_t>> tags;
  /// (fname, class) -> class whose rules compute f for that class.
  std::map<std::pair<std::string, std::string>, std::string> dispatch;
  /// (fname, class) inherited without local rules; receiver kinds only.
  std::set<std::pair<std::string, std::string>> missing;
  std::map<std::string, std::vector<FunctionSig>> functions;

  const ClassInfo* find(std::string_view name) const;
  /// Reflexive.
  bool is_descendant(std::string_view cls, std::string_view ancestor) const;
  const ResolvedAlt* alternative(std::string_view qualified) const;
  /// Class owning a qualified tag, empty when unknown.
  std::string class_of_tag(std::string_view qualified) const;

  /// Signature of `fname`; when several classes declare it, the one whose
  /// class is related to `receiver_class` wins, else the first.
  const FunctionSig* signature(std::string_view fname, std::string_view receiver_class = "") const;
  bool is_function(std::string_view fname) const { return functions.count(std::string(fname)) > 0; }

  /// Every rule for fname, classes in name order, rules in source order.
  std::vector<const FunctionRule*> rules_for(std::string_view fname) const;
  /// Rules followed by inheritance forwarders, in evaluation order.
  std::vector<SolCandidate> sol_candidates(std::string_view fname) const;

  /// Element type produced by traversing a value of type t, if known.
  std::optional<TypeExpr> element_type(const TypeExpr& t) const;
  bool is_traversable(const TypeExpr& t) const;
  /// Named type that is neither primitive nor a declared class.
  bool is_type_variable(const TypeExpr& t) const;
  /// a may be used where b is expected. Unknowns and type variables are compatible.
  bool conforms(const TypeExpr& a, const TypeExpr& b) const;

  /// Whether traversal item `item` of `tr` (a rule of class `cls`) is itself
  /// traversed, as opposed to yielding a single element.
  bool item_is_collection(std::string_view cls, const TraversalRule& tr, std::size_t item) const;

  /// Mode of the first rule of fname whose argument patterns match.
  const FunctionRule* first_matching_rule(std::string_view fname, const ValueList& args) const;
};

/// Functions available without declaration (`length`, `sqrt`, ...).
bool is_builtin_function(std::string_view name);

using Bindings = std::map<std::string, Value>;

/// Matches a ground value against a resolved pattern, extending `env`.
/// Constants compare with `equivalent`; record patterns may name a subset of
/// the fields. `env` is left unspecified on failure.
bool match_pattern(const Pattern& p, const Value& v, Bindings& env);

struct HierarchyResult {
  std::shared_ptr<const ClassHierarchy> hierarchy;  // null on error
  Diagnostics diags;
};

/// Builds the class hierarchy: ancestor linearization, alternative
/// expansion with qualified tags, name resolution inside rules and
/// traversals, and the dispatch/missing tables.
HierarchyResult build_hierarchy(const std::vector<ClassDef>& defs);

/// Signature, binding, and type checks on every rule.
Diagnostics check_rules(const ClassHierarchy& h);

/// Every quantifier ranges over something traversable; non-executable rules
/// are reported as warnings.
Diagnostics check_computability(const ClassHierarchy& h);

/// Parse + build + checks. Returns null hierarchy when any error occurred.
HierarchyResult analyze(const std::vector<ClassDef>& defs);

/// Resolves names in a free-standing expression (no enclosing rule):
/// tags, function calls and sequence indexing by bound variables.
ExprPtr resolve_expression(const ExprPtr& e, const ClassHierarchy& h, Diagnostics& diags,
                           const std::vector<std::string>& scope = {});

/// Casts a value to an ancestor class: extension components are dropped,
/// overridden components projected recursively, the tag requalified.
/// Throws Error("CAST_ERROR") for unrelated classes.
Value project_to_ancestor(const Value& v, std::string_view target, const ClassHierarchy& h);

/// Projection directed by a type: classes are cast, sequences and records
/// projected element-wise, anything else kept.
Value project_to_type(const Value& v, const TypeExpr& t, const ClassHierarchy& h);

/// Normalizes a value against a declared type: Int widened to Real,
/// record fields put in declared order, constructor components coerced by
/// their alternative, and a bare value wrapped into a class whose only
/// alternative has a single component.
Value coerce(const Value& v, const TypeExpr& t, const ClassHierarchy& h);

/// Run-time membership of a ground value in a declared type. Type variables
/// accept anything; Int values are accepted where Real is declared.
bool value_conforms(const Value& v, const TypeExpr& t, const ClassHierarchy& h);

/// Builds a constructor value with components coerced to the alternative's
/// declared types. Throws Error("UNKNOWN_TAG"/"ARITY_MISMATCH").
Value construct(std::string_view qualified_tag, ValueList args, const ClassHierarchy& h);

}  // namespace slam
