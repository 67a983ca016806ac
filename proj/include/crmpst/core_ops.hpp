#pragma once

#include <set>
#include <stdexcept>

#include "crmpst/diagnostics.hpp"
#include "crmpst/types.hpp"

namespace crmpst {

using RoleSet = std::set<Role>;

/// Roles that still act in g. A pending Comm contributes its live endpoints;
/// an en-route Comm only its receiver (the sender already acted).
RoleSet active_roles(const GlobalPtr& g);

/// Roles carrying a crash annotation in a continuation position. A crashed
/// sender of an en-route transmission does not count by itself.
RoleSet crashed_roles(const GlobalPtr& g);

struct RoleNotActiveError : std::runtime_error {
  explicit RoleNotActiveError(const Role& r)
      : std::runtime_error("role is not active in the global type: " + r.name) {}
};

struct NoCrashBranchError : std::runtime_error {
  explicit NoCrashBranchError(const std::string& where)
      : std::runtime_error("no crash handling branch available at " + where) {}
};

/// Removes a live role r from g after its crash: every interaction of r is
/// annotated or discharged. A pending transmission from r turns into an
/// en-route pseudo-transmission committed to the crash branch; an en-route
/// transmission from r keeps its selected index; a transmission towards a
/// crashed r is received by nobody, so an en-route one is resolved to its
/// committed continuation and a doubly-crashed pending one to its crash
/// branch.
///
/// Throws RoleNotActiveError if r is not active, NoCrashBranchError when a
/// crash branch is required but absent.
GlobalPtr remove_role(const GlobalPtr& g, const Role& r);

/// WA1: no reliable role is crash-annotated; WA2: every crash-annotated role
/// is in the crashed set; WA3: no role is both active and crashed.
bool well_annotated(const RoleSet& crashed, const GlobalPtr& g, const RoleSet& reliable);

/// Design-time checks on parser output; an empty result means well-formed.
std::vector<Diagnostic> well_formed(const GlobalPtr& g, const RoleSet& reliable);

}  // namespace crmpst
