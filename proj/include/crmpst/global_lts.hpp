#pragma once

#include <optional>
#include <vector>

#include "crmpst/core_ops.hpp"
#include "crmpst/labels.hpp"
#include "crmpst/types.hpp"

namespace crmpst {

/// A global type paired with the set of roles known to have crashed. The
/// crashed set is explicit bookkeeping: annotations inside g may disappear as
/// prefixes resolve, but a crash is forever.
struct AnnotatedGlobal {
  RoleSet crashed;
  GlobalPtr g;
};

struct GlobalStep {
  TransitionLabel label;
  AnnotatedGlobal next;
};

/// All transitions of (crashed, g) under the reliability assumptions:
/// sends commit a pending branch, receipts resolve an en-route transmission,
/// unreliable active roles may crash, crash pseudo-messages are detected at
/// reception, sends towards crashed receivers orphan the message, and
/// non-interfering actions propagate under a prefix when every continuation
/// admits them. Crash labels arise only at top level.
std::vector<GlobalStep> global_transitions(const AnnotatedGlobal& st, const RoleSet& reliable);

/// Unique successor of st under lbl, or nullopt.
/// Throws std::logic_error if one label has two distinct successors.
std::optional<AnnotatedGlobal> global_step(const AnnotatedGlobal& st, const RoleSet& reliable,
                                           const TransitionLabel& lbl);

}  // namespace crmpst
