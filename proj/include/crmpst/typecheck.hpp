#pragma once

#include "crmpst/calculus.hpp"
#include "crmpst/verifier.hpp"

namespace crmpst {

/// Checks that every process in m plays the role its projection prescribes
/// and that the queues spell out the global type's transmissions en route.
/// Crashed entries must be exactly the annotated crashed roles.
TypecheckResult typecheck_session(const Session& m, const AnnotatedGlobal& ann,
                                  const RoleSet& reliable, bool strict = true);

/// Diagnostics for receive sums whose pending queue head matches no branch.
std::vector<Diagnostic> stuck_receives(const Session& m);

}  // namespace crmpst
