#include "crmpst/core_ops.hpp"

#include <optional>
#include <sstream>

namespace crmpst {

std::string to_string(const Diagnostic& d) {
  std::ostringstream os;
  os << (d.severity == Diagnostic::Severity::Error ? "error" : "warning");
  if (d.span.line > 0) os << " at " << d.span.line << ":" << d.span.column;
  os << " [" << d.rule << "] " << d.message;
  return os.str();
}

// ---------------------------------------------------------------------------
// Active and crashed roles
//
// Both sets satisfy roles(Rec(x,B)) = roles(unfold) with the least-fixpoint
// reading, which collapses to plain structural recursion where RecVar
// contributes nothing.

static void roles_into(const GlobalPtr& g, RoleSet& active, RoleSet& crashed) {
  switch (g->kind) {
    case GlobalType::Kind::End:
    case GlobalType::Kind::RecVar:
      return;
    case GlobalType::Kind::Rec:
      roles_into(g->body, active, crashed);
      return;
    case GlobalType::Kind::Comm: {
      if (g->committed) {
        active.insert(g->receiver);  // a crashed sender in transit is not counted
      } else {
        active.insert(g->sender);
        if (g->receiver_crashed)
          crashed.insert(g->receiver);
        else
          active.insert(g->receiver);
      }
      for (const auto& b : g->branches) roles_into(b.cont, active, crashed);
      return;
    }
  }
}

RoleSet active_roles(const GlobalPtr& g) {
  RoleSet active, crashed;
  roles_into(g, active, crashed);
  return active;
}

RoleSet crashed_roles(const GlobalPtr& g) {
  RoleSet active, crashed;
  roles_into(g, active, crashed);
  return crashed;
}

// ---------------------------------------------------------------------------
// Role removal

static std::optional<std::size_t> crash_branch_index(const std::vector<GlobalBranch>& branches) {
  for (std::size_t i = 0; i < branches.size(); ++i)
    if (branches[i].label.is_crash()) return i;
  return std::nullopt;
}

static std::string comm_desc(const GlobalType& g) {
  return g.sender.name + (g.committed ? "~>" : "->") + g.receiver.name;
}

static GlobalPtr remove_role_rec(const GlobalPtr& g, const Role& r) {
  switch (g->kind) {
    case GlobalType::Kind::End:
    case GlobalType::Kind::RecVar:
      return g;
    case GlobalType::Kind::Rec: {
      GlobalPtr body = remove_role_rec(g->body, r);
      if (body.get() == g->body.get()) return g;
      return g_rec(g->var, std::move(body), g->span);
    }
    case GlobalType::Kind::Comm:
      break;
  }

  auto cleansed_branches = [&] {
    std::vector<GlobalBranch> bs;
    bs.reserve(g->branches.size());
    for (const auto& b : g->branches) bs.push_back({b.label, b.sort, remove_role_rec(b.cont, r)});
    return bs;
  };

  if (!g->committed) {
    // Pending transmission.
    if (g->sender == r) {
      auto crash = crash_branch_index(g->branches);
      if (!crash) throw NoCrashBranchError(comm_desc(*g));
      if (g->receiver_crashed) {
        // Nobody is left to observe this prefix; resolve it to the branch the
        // dead receiver would have taken.
        return remove_role_rec(g->branches[*crash].cont, r);
      }
      return g_comm_runtime(g->sender, true, g->receiver, false, cleansed_branches(), crash);
    }
    if (g->receiver == r) {
      return g_comm_runtime(g->sender, false, g->receiver, true, cleansed_branches(),
                            std::nullopt);
    }
    return g_comm_runtime(g->sender, false, g->receiver, g->receiver_crashed, cleansed_branches(),
                          std::nullopt);
  }

  // Transmission en route.
  if (g->sender == r) {
    return g_comm_runtime(g->sender, true, g->receiver, false, cleansed_branches(), g->committed);
  }
  if (g->receiver == r) {
    return remove_role_rec(g->branches[*g->committed].cont, r);
  }
  return g_comm_runtime(g->sender, g->sender_crashed, g->receiver, false, cleansed_branches(),
                        g->committed);
}

GlobalPtr remove_role(const GlobalPtr& g, const Role& r) {
  if (!active_roles(g).count(r)) throw RoleNotActiveError(r);
  return remove_role_rec(g, r);
}

// ---------------------------------------------------------------------------
// Well-annotatedness

bool well_annotated(const RoleSet& crashed, const GlobalPtr& g, const RoleSet& reliable) {
  RoleSet active, annotated;
  roles_into(g, active, annotated);
  for (const auto& p : annotated) {
    if (reliable.count(p)) return false;  // WA1
    if (!crashed.count(p)) return false;  // WA2
    if (active.count(p)) return false;    // WA3
  }
  return true;
}

// ---------------------------------------------------------------------------
// Well-formedness of design-time types

namespace {

struct WellFormedCheck {
  const RoleSet& reliable;
  std::vector<Diagnostic> out;
  std::set<std::string> bound;

  void error(const std::string& rule, const std::string& message, Span span) {
    out.push_back({Diagnostic::Severity::Error, rule, message, span});
  }

  void visit(const GlobalPtr& g) {
    switch (g->kind) {
      case GlobalType::Kind::End:
        return;
      case GlobalType::Kind::RecVar:
        if (!bound.count(g->var))
          error("FreeRecVar", "recursion variable '" + g->var + "' is not bound", g->span);
        return;
      case GlobalType::Kind::Rec: {
        if (bound.count(g->var)) {
          error("ShadowedBinder", "recursion binder '" + g->var + "' shadows an enclosing binder",
                g->span);
          return;
        }
        if (!contractive_body(g))
          error("NonContractiveRec",
                "recursion variable '" + g->var + "' is not guarded by a communication", g->span);
        bound.insert(g->var);
        visit(g->body);
        bound.erase(g->var);
        return;
      }
      case GlobalType::Kind::Comm:
        visit_comm(g);
        return;
    }
  }

  static bool contractive_body(const GlobalPtr& rec) { return contractive(rec); }

  void visit_comm(const GlobalPtr& g) {
    const std::string where = g->sender.name + "->" + g->receiver.name;
    if (g->committed || g->sender_crashed || g->receiver_crashed)
      error("RuntimeConstruct", "runtime construct in a design-time type at " + where, g->span);
    if (g->branches.empty()) error("NonEmptyBranches", "no branches at " + where, g->span);
    if (g->sender == g->receiver)
      error("SelfCommunication", "role " + g->sender.name + " sends to itself", g->span);

    std::set<std::string> labels;
    bool has_crash = false;
    for (const auto& b : g->branches) {
      if (!labels.insert(b.label.name).second)
        error("DuplicateLabel", "duplicate label '" + b.label.name + "' at " + where, g->span);
      if (b.label.is_crash()) {
        has_crash = true;
        if (b.sort != Sort::Unit)
          error("CrashPayloadNotUnit", "crash branch carries a payload at " + where, g->span);
      }
    }
    if (g->branches.size() == 1 && has_crash)
      error("SingletonCrashBranch", "crash cannot be the only branch at " + where, g->span);

    bool sender_reliable = reliable.count(g->sender) > 0;
    if (!sender_reliable && !has_crash)
      error("MissingCrashBranch",
            "unreliable sender " + g->sender.name + " needs a crash branch at " + where, g->span);
    if (sender_reliable && has_crash)
      error("CrashBranchForReliableSender",
            "reliable sender " + g->sender.name + " cannot have a crash branch at " + where,
            g->span);

    for (const auto& b : g->branches) visit(b.cont);
  }
};

}  // namespace

std::vector<Diagnostic> well_formed(const GlobalPtr& g, const RoleSet& reliable) {
  WellFormedCheck check{reliable, {}, {}};
  check.visit(g);
  return std::move(check.out);
}

}  // namespace crmpst
