#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "crmpst/calculus.hpp"
#include "crmpst/core_ops.hpp"
#include "crmpst/diagnostics.hpp"
#include "crmpst/types.hpp"

namespace crmpst {

struct ProtocolDecl {
  std::string name;
  std::vector<std::pair<Role, bool>> roles;  // (role, reliable)
  GlobalPtr body;

  RoleSet reliable_set() const {
    RoleSet out;
    for (const auto& [r, rel] : roles)
      if (rel) out.insert(r);
    return out;
  }
  RoleSet role_set() const {
    RoleSet out;
    for (const auto& [r, rel] : roles) out.insert(r);
    return out;
  }
};

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value() && !has_errors(diagnostics); }
};

/// Parses a `.crmpst` protocol source. On success the declaration body is a
/// design-time global type that passed well_formed; otherwise diagnostics
/// carry every violation found.
ParseResult<ProtocolDecl> parse_protocol(const std::string& source);

struct ProcessScript {
  std::map<Role, ProcessPtr> processes;
  std::map<Role, std::vector<SessionMsg>> queues;

  Session to_session() const;
};

/// Parses a `.crproc` process script: `role R = <proc>` definitions plus
/// optional `queue R = [A.l(v), ...]` literals.
ParseResult<ProcessScript> parse_process_script(const std::string& source);

// ---------------------------------------------------------------------------
// Rendering

/// Compact arrow-form display of a global type, covering runtime constructs.
/// En-route transmissions display their committed branch only.
std::string render_global(const GlobalPtr& g);

std::string render_local(const LocalPtr& t);

/// Statement-form body of a design-time global type; parse_protocol applied
/// to render_protocol_source(decl) reproduces decl exactly.
std::string render_global_source(const GlobalPtr& g, int indent = 0);
std::string render_protocol_source(const ProtocolDecl& decl);

}  // namespace crmpst
