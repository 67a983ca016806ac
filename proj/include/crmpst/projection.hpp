#pragma once

#include <map>
#include <stdexcept>

#include "crmpst/core_ops.hpp"
#include "crmpst/frontend.hpp"
#include "crmpst/types.hpp"

namespace crmpst {

struct MergeError : std::runtime_error {
  LocalPtr lhs, rhs;
  std::string path;
  MergeError(LocalPtr a, LocalPtr b, std::string where)
      : std::runtime_error("types do not merge at " + (where.empty() ? "top" : where)),
        lhs(std::move(a)),
        rhs(std::move(b)),
        path(std::move(where)) {}
};

struct ProjectionError : std::runtime_error {
  Role role;
  std::string path;
  ProjectionError(Role r, std::string where, const std::string& why)
      : std::runtime_error("projection onto " + r.name + " undefined at " +
                           (where.empty() ? "top" : where) + ": " + why),
        role(std::move(r)),
        path(std::move(where)) {}
};

/// Full merge of two views of a protocol continuation. Selections must agree
/// on peer, labels and sorts, merging their continuations; branchings union
/// disjoint labels and merge shared ones. Throws MergeError when undefined.
LocalPtr merge(const LocalPtr& a, const LocalPtr& b);

/// Projection of a (possibly runtime) global type onto role p under the given
/// reliability assumptions. Throws ProjectionError when undefined.
LocalPtr project(const GlobalPtr& g, const Role& p, const RoleSet& reliable);

/// Projections of every declared role; first failure propagates.
std::map<Role, LocalPtr> project_all(const ProtocolDecl& decl);

}  // namespace crmpst
