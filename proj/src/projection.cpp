#include "crmpst/projection.hpp"

#include <unordered_map>

namespace crmpst {

namespace {

const LocalBranch* find_branch(const std::vector<LocalBranch>& branches, const Label& l) {
  for (const auto& b : branches)
    if (b.label == l) return &b;
  return nullptr;
}

LocalPtr merge_rec(const LocalPtr& a, const LocalPtr& b, const std::string& path) {
  if (a.get() == b.get()) return a;
  if (a->kind != b->kind) throw MergeError(a, b, path);
  switch (a->kind) {
    case LocalType::Kind::End:
    case LocalType::Kind::Stop:
      return a;
    case LocalType::Kind::RecVar:
      if (a->var != b->var) throw MergeError(a, b, path);
      return a;
    case LocalType::Kind::Rec: {
      if (a->var != b->var) throw MergeError(a, b, path);
      LocalPtr body = merge_rec(a->body, b->body, path + "mu " + a->var + ".");
      return body.get() == a->body.get() ? a : l_rec(a->var, std::move(body));
    }
    case LocalType::Kind::Select: {
      if (a->peer != b->peer || a->branches.size() != b->branches.size())
        throw MergeError(a, b, path);
      std::vector<LocalBranch> branches;
      branches.reserve(a->branches.size());
      for (const auto& ba : a->branches) {
        const LocalBranch* bb = find_branch(b->branches, ba.label);
        if (!bb || bb->sort != ba.sort) throw MergeError(a, b, path);
        branches.push_back(
            {ba.label, ba.sort, merge_rec(ba.cont, bb->cont, path + "(+)" + ba.label.name + ".")});
      }
      return l_select(a->peer, std::move(branches));
    }
    case LocalType::Kind::Branch: {
      if (a->peer != b->peer) throw MergeError(a, b, path);
      std::vector<LocalBranch> branches;
      branches.reserve(a->branches.size() + b->branches.size());
      for (const auto& ba : a->branches) {
        const LocalBranch* bb = find_branch(b->branches, ba.label);
        if (!bb) {
          branches.push_back(ba);
          continue;
        }
        if (bb->sort != ba.sort) throw MergeError(a, b, path);
        branches.push_back(
            {ba.label, ba.sort, merge_rec(ba.cont, bb->cont, path + "&" + ba.label.name + ".")});
      }
      for (const auto& bb : b->branches)
        if (!find_branch(a->branches, bb.label)) branches.push_back(bb);
      return l_branch(a->peer, std::move(branches));
    }
  }
  throw MergeError(a, b, path);
}

struct Projector {
  Role p;
  const RoleSet& reliable;
  // Keyed on node identity; sound because terms are immutable and the role
  // and reliability set are fixed for the call.
  std::unordered_map<const GlobalType*, LocalPtr> memo;

  LocalPtr project(const GlobalPtr& g, const std::string& path) {
    auto it = memo.find(g.get());
    if (it != memo.end()) return it->second;
    LocalPtr out = project_uncached(g, path);
    memo.emplace(g.get(), out);
    return out;
  }

  LocalPtr project_uncached(const GlobalPtr& g, const std::string& path) {
    switch (g->kind) {
      case GlobalType::Kind::End:
        return l_end();
      case GlobalType::Kind::RecVar:
        return l_recvar(g->var);
      case GlobalType::Kind::Rec: {
        RoleSet active = active_roles(g->body);
        RoleSet crashed = crashed_roles(g->body);
        bool involved = active.count(p) || crashed.count(p);
        if (!involved && free_rec_vars(g).empty()) return l_end();
        LocalPtr body = project(g->body, path + "mu " + g->var + ".");
        // mu t.t collapses to end, a vacuous binder drops away.
        if (body->kind == LocalType::Kind::RecVar && body->var == g->var) return l_end();
        if (body->kind == LocalType::Kind::End) return l_end();
        if (!free_rec_vars(body).count(g->var)) return body;
        return l_rec(g->var, body);
      }
      case GlobalType::Kind::Comm:
        break;
    }

    const std::string here = path + g->sender.name + (g->committed ? "~>" : "->") +
                             g->receiver.name + ".";

    auto project_branches = [&](bool include_crash) {
      std::vector<LocalBranch> out;
      out.reserve(g->branches.size());
      for (const auto& b : g->branches) {
        if (!include_crash && b.label.is_crash()) continue;
        out.push_back({b.label, b.sort, project(b.cont, here + b.label.name + ".")});
      }
      return out;
    };
    auto merge_branches = [&]() {
      LocalPtr acc;
      for (const auto& b : g->branches) {
        LocalPtr t = project(b.cont, here + b.label.name + ".");
        try {
          acc = acc ? merge_rec(acc, t, here) : t;
        } catch (const MergeError& e) {
          throw ProjectionError(p, e.path, e.what());
        }
      }
      return acc;
    };

    if (!g->committed) {
      // Pending transmission.
      if (g->sender == p) {
        auto branches = project_branches(/*include_crash=*/false);
        if (branches.empty()) throw ProjectionError(p, here, "only a crash branch to select");
        return l_select(g->receiver, std::move(branches));
      }
      if (g->receiver == p) {
        if (g->receiver_crashed)
          throw ProjectionError(p, here, "cannot project onto a crashed role");
        bool has_crash = false;
        for (const auto& b : g->branches) has_crash = has_crash || b.label.is_crash();
        if (!reliable.count(g->sender) && !has_crash)
          throw ProjectionError(p, here,
                                "unreliable sender " + g->sender.name + " has no crash branch");
        return l_branch(g->sender, project_branches(/*include_crash=*/true));
      }
      return merge_branches();
    }

    // Transmission en route.
    if (g->receiver == p)
      return l_branch(g->sender, project_branches(/*include_crash=*/true));
    if (g->sender == p && !g->sender_crashed) {
      const auto& b = g->branches[*g->committed];
      return project(b.cont, here + b.label.name + ".");
    }
    if (g->sender == p)
      throw ProjectionError(p, here, "cannot project onto a crashed role");
    return merge_branches();
  }
};

}  // namespace

LocalPtr merge(const LocalPtr& a, const LocalPtr& b) { return merge_rec(a, b, ""); }

LocalPtr project(const GlobalPtr& g, const Role& p, const RoleSet& reliable) {
  Projector projector{p, reliable, {}};
  return projector.project(g, "");
}

std::map<Role, LocalPtr> project_all(const ProtocolDecl& decl) {
  std::map<Role, LocalPtr> out;
  RoleSet reliable = decl.reliable_set();
  for (const auto& [role, rel] : decl.roles) out[role] = project(decl.body, role, reliable);
  return out;
}

}  // namespace crmpst
