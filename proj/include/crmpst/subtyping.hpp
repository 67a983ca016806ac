#pragma once

#include "crmpst/types.hpp"

namespace crmpst {

/// Decides s <= t coinductively on closed contractive local types.
///
/// Select: s may offer a subset of t's selection branches. Branch: s must
/// cover at least t's reception branches, t's label set must not consist of
/// the crash label alone, and a crash branch in s forces one in t. Sorts
/// compare by equality.
bool subtype(const LocalPtr& s, const LocalPtr& t);

/// Syntactic equality modulo unfolding of recursive types.
bool equal_up_to_unfolding(const LocalPtr& a, const LocalPtr& b);

}  // namespace crmpst
