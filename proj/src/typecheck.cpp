#include "crmpst/typecheck.hpp"

#include <set>

#include "crmpst/projection.hpp"
#include "crmpst/subtyping.hpp"

namespace crmpst {

namespace {

struct ProcessChecker {
  bool strict;
  std::vector<Diagnostic> diagnostics;
  std::set<std::pair<const Process*, std::string>> visited;

  bool fail(const std::string& rule, const std::string& message) {
    diagnostics.push_back({Diagnostic::Severity::Error, rule, message, {}});
    return false;
  }

  bool check(TypeEnv env, const ProcessPtr& p, const LocalPtr& type) {
    LocalPtr t = unfold_head(type);
    switch (p->kind) {
      case Process::Kind::Inact:
        return t->kind == LocalType::Kind::End ||
               fail("InactNeedsEnd", "terminated process against type " + canonical_label(t));
      case Process::Kind::Crashed:
        return t->kind == LocalType::Kind::Stop ||
               fail("CrashedNeedsStop", "crashed process against type " + canonical_label(t));
      case Process::Kind::Send: {
        if (t->kind != LocalType::Kind::Select || t->peer != p->peer)
          return fail("SendNeedsSelect", "send to " + p->peer.name + " against type " +
                                             canonical_label(t));
        const LocalBranch* branch = nullptr;
        for (const auto& b : t->branches)
          if (b.label == p->label) branch = &b;
        if (!branch)
          return fail("UnknownSelectLabel",
                      "label '" + p->label.name + "' is not offered towards " + p->peer.name);
        Sort s;
        try {
          s = sort_of_expr(p->payload, env.vars);
        } catch (const SortError& e) {
          return fail("PayloadSort", e.what());
        }
        if (s != branch->sort)
          return fail("PayloadSort", "payload of '" + p->label.name + "' has sort " +
                                         to_string(s) + ", expected " + to_string(branch->sort));
        return check(env, p->cont, branch->cont);
      }
      case Process::Kind::Recv: {
        if (t->kind != LocalType::Kind::Branch || t->peer != p->peer)
          return fail("RecvNeedsBranch", "receive from " + p->peer.name + " against type " +
                                             canonical_label(t));
        bool ok = true;
        std::set<std::string> type_labels;
        for (const auto& tb : t->branches) {
          type_labels.insert(tb.label.name);
          const ProcBranch* pb = nullptr;
          for (const auto& b : p->branches)
            if (b.label == tb.label) pb = &b;
          if (!pb) {
            ok = fail("MissingRecvBranch", "receive from " + p->peer.name +
                                               " does not handle label '" + tb.label.name + "'");
            continue;
          }
          TypeEnv inner = env;
          if (pb->binder) inner.vars[*pb->binder] = tb.sort;
          ok = check(inner, pb->cont, tb.cont) && ok;
        }
        for (const auto& b : p->branches) {
          if (type_labels.count(b.label.name)) continue;
          if (strict) {
            ok = fail("ExtraRecvBranch", "receive branch '" + b.label.name +
                                             "' has no counterpart in the type");
          } else {
            diagnostics.push_back({Diagnostic::Severity::Warning, "ExtraRecvBranch",
                                   "receive branch '" + b.label.name + "' is unreachable",
                                   {}});
          }
        }
        return ok;
      }
      case Process::Kind::If: {
        try {
          if (sort_of_expr(p->cond, env.vars) != Sort::Bool)
            return fail("CondSort", "condition is not a boolean");
        } catch (const SortError& e) {
          return fail("CondSort", e.what());
        }
        bool ok = check(env, p->then_branch, type);
        return check(env, p->else_branch, type) && ok;
      }
      case Process::Kind::Rec: {
        auto key = std::make_pair(p.get(), canonical_key(t));
        if (!visited.insert(key).second) return true;
        env.proc_vars[p->var] = type;
        return check(env, p->body, type);
      }
      case Process::Kind::Var: {
        auto it = env.proc_vars.find(p->var);
        if (it == env.proc_vars.end())
          return fail("FreeProcVar", "process variable '" + p->var + "' is not bound");
        return equal_up_to_unfolding(it->second, type) ||
               fail("ProcVarType", "process variable '" + p->var +
                                       "' recurs at a different type than its binding");
      }
    }
    return fail("Malformed", "malformed process");
  }

  static std::string canonical_label(const LocalPtr& t) {
    switch (t->kind) {
      case LocalType::Kind::End: return "end";
      case LocalType::Kind::Stop: return "stop";
      case LocalType::Kind::RecVar: return t->var;
      case LocalType::Kind::Rec: return "mu " + t->var;
      case LocalType::Kind::Select: return "select towards " + t->peer.name;
      case LocalType::Kind::Branch: return "branch from " + t->peer.name;
    }
    return "?";
  }
};

}  // namespace

TypecheckResult typecheck_process(const TypeEnv& env, const ProcessPtr& p, const LocalPtr& t,
                                  bool strict) {
  ProcessChecker checker{strict, {}, {}};
  bool ok = checker.check(env, p, t);
  return {ok, std::move(checker.diagnostics)};
}

TypecheckResult typecheck_queue(const SessionEntry& entry, const QueueType& expected) {
  TypecheckResult result;
  auto fail = [&](const std::string& rule, const std::string& message) {
    result.ok = false;
    result.diagnostics.push_back({Diagnostic::Severity::Error, rule, message, {}});
  };

  if (!expected.has_value()) {
    if (!entry.queue_unavailable) fail("QueueAvailability", "queue should be unavailable");
    return result;
  }
  if (entry.queue_unavailable) {
    fail("QueueAvailability", "queue should be available");
    return result;
  }

  std::map<Role, std::vector<std::pair<Label, Sort>>> actual;
  for (const auto& msg : entry.queue)
    actual[msg.origin].emplace_back(msg.label, msg.value.sort);

  for (const auto& [origin, msgs] : actual) {
    auto it = expected->find(origin);
    const auto empty = std::vector<std::pair<Label, Sort>>{};
    const auto& want = it == expected->end() ? empty : it->second;
    if (msgs != want)
      fail("QueueContents", "messages from " + origin.name + " do not match their type");
  }
  for (const auto& [origin, want] : *expected) {
    if (!want.empty() && !actual.count(origin))
      fail("QueueContents", "missing messages from " + origin.name);
  }
  return result;
}

TypecheckResult typecheck_session(const Session& m, const AnnotatedGlobal& ann,
                                  const RoleSet& reliable, bool strict) {
  TypecheckResult result;
  auto fail = [&](const std::string& rule, const std::string& message) {
    result.ok = false;
    result.diagnostics.push_back({Diagnostic::Severity::Error, rule, message, {}});
  };

  RoleSet active = active_roles(ann.g);
  std::map<Role, LocalPtr> gamma;
  for (const Role& p : active) {
    try {
      gamma[p] = project(ann.g, p, reliable);
    } catch (const ProjectionError& e) {
      fail("Projection", e.what());
      return result;
    }
  }
  for (const Role& p : ann.crashed) gamma[p] = l_stop();
  for (const auto& [role, entry] : m.entries)
    if (!gamma.count(role)) gamma[role] = l_end();

  for (const auto& [role, type] : gamma)
    if (!m.entries.count(role)) fail("MissingRole", "session has no entry for role " + role.name);
  if (!result.ok) return result;

  for (const auto& [role, entry] : m.entries) {
    if (entry.queue_unavailable != (entry.process->kind == Process::Kind::Crashed))
      fail("SessionInvariant",
           "role " + role.name + " must have a crashed process iff its queue is unavailable");
    auto sub = typecheck_process({}, entry.process, gamma.at(role), strict);
    for (auto& d : sub.diagnostics) {
      d.message = role.name + ": " + d.message;
      result.diagnostics.push_back(std::move(d));
    }
    result.ok = result.ok && sub.ok;
  }

  Configuration c = Configuration::make(gamma);
  for (const auto& [role, entry] : m.entries) {
    if (entry.queue_unavailable) c.delta.make_unavailable_towards(role);
    for (const auto& msg : entry.queue)
      c.delta.append(msg.origin, role, {msg.label, msg.value.sort});
  }
  if (auto why = association_failure(ann, c, reliable)) fail("Association", *why);
  return result;
}

std::vector<Diagnostic> stuck_receives(const Session& m) {
  std::vector<Diagnostic> out;
  for (const auto& [role, entry] : m.entries) {
    ProcessPtr p = entry.process;
    if (p->kind != Process::Kind::Recv) continue;
    for (const auto& msg : entry.queue) {
      if (msg.origin != p->peer) continue;
      bool handled = false;
      for (const auto& b : p->branches) handled = handled || b.label == msg.label;
      if (!handled)
        out.push_back({Diagnostic::Severity::Error, "StuckBranch",
                       "role " + role.name + " cannot receive '" + msg.label.name + "' from " +
                           msg.origin.name,
                       {}});
      break;  // only the first message from the awaited origin matters
    }
  }
  return out;
}

}  // namespace crmpst
