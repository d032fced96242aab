#pragma once

#include <map>
#include <string>

#include "slam/pipeline.hpp"

namespace slam {

/// File name -> contents.
using EmittedFiles = std::map<std::string, std::string>;

/// Emits one `<Class>.slimp` per class and a `main.slimp` harness.
///
/// Every spec function becomes a `func` whose rules are tried in the order
/// of the logic program: a `when` block per executable rule, a forwarding
/// block per inherited alternative, then `fail "NO_APPLICABLE_RULE"`.
/// Quantifiers become loops: `for x in D` over sequences and ranges, and
/// over the recursive `elements_<Class>` procedure generated from each
/// class's traversal rules. A function without any executable rule is a
/// stub failing with NOT_EXECUTABLE after its pre hook.
EmittedFiles emit_program(const Spec& spec);

}  // namespace slam
