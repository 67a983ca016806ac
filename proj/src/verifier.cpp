#include "crmpst/verifier.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "crmpst/projection.hpp"
#include "crmpst/subtyping.hpp"

namespace crmpst {

std::string to_string(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Holds: return "holds";
    case Verdict::Status::Violated: return "violated";
    case Verdict::Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Association

namespace {

// Queue clause of association, by structural descent; recursion stops at Rec
// binders, which demand all-empty queues like End.
std::optional<std::string> queue_assoc(const QueueEnv& delta, const GlobalPtr& g,
                                       const std::vector<Role>& roles, const RoleSet& crashed) {
  switch (g->kind) {
    case GlobalType::Kind::End:
    case GlobalType::Kind::RecVar:
    case GlobalType::Kind::Rec: {
      for (const Role& from : roles)
        for (const Role& to : roles) {
          if (from == to || crashed.count(to)) continue;
          if (!delta.at(from, to).msgs.empty())
            return "queue " + from.name + ">" + to.name + " must be empty at end/rec";
        }
      return std::nullopt;
    }
    case GlobalType::Kind::Comm:
      break;
  }

  const bool pseudo = g->committed && g->branches[*g->committed].label.is_crash();
  if (!g->committed || pseudo) {
    bool receiver_live = !g->receiver_crashed;
    if (receiver_live && !delta.at(g->sender, g->receiver).msgs.empty())
      return "queue " + g->sender.name + ">" + g->receiver.name +
             " must be empty under a pending prefix";
    for (const auto& b : g->branches)
      if (auto why = queue_assoc(delta, b.cont, roles, crashed)) return why;
    return std::nullopt;
  }

  const auto& committed = g->branches[*g->committed];
  const ChannelQueue& q = delta.at(g->sender, g->receiver);
  if (q.unavailable || q.msgs.empty() || q.msgs.front().label != committed.label ||
      q.msgs.front().sort != committed.sort)
    return "queue " + g->sender.name + ">" + g->receiver.name + " must start with " +
           committed.label.name;
  QueueEnv popped = delta;
  popped.pop_head(g->sender, g->receiver);
  for (const auto& b : g->branches)
    if (auto why = queue_assoc(popped, b.cont, roles, crashed)) return why;
  return std::nullopt;
}

}  // namespace

std::optional<std::string> association_failure(const AnnotatedGlobal& ann, const Configuration& c,
                                               const RoleSet& reliable) {
  RoleSet active = active_roles(ann.g);

  for (const Role& p : active) {
    auto it = c.gamma.find(p);
    if (it == c.gamma.end()) return "A1: no entry for active role " + p.name;
    LocalPtr proj;
    try {
      proj = project(ann.g, p, reliable);
    } catch (const ProjectionError& e) {
      return std::string("A1: ") + e.what();
    }
    if (!subtype(it->second, proj))
      return "A1: entry for " + p.name + " is not a subtype of its projection";
  }
  for (const Role& p : ann.crashed) {
    auto it = c.gamma.find(p);
    if (it == c.gamma.end() || it->second->kind != LocalType::Kind::Stop)
      return "A2: crashed role " + p.name + " is not stop";
  }
  for (const auto& [p, t] : c.gamma) {
    if (active.count(p) || ann.crashed.count(p)) continue;
    if (t->kind != LocalType::Kind::End) return "A3: spare role " + p.name + " is not end";
  }

  std::vector<Role> roles;
  for (const auto& [p, t] : c.gamma) roles.push_back(p);
  for (const Role& to : roles) {
    bool want_unavailable = ann.crashed.count(to) > 0;
    for (const Role& from : roles) {
      if (from == to) continue;
      if (c.delta.at(from, to).unavailable != want_unavailable)
        return "A4: queue " + from.name + ">" + to.name +
               (want_unavailable ? " must be unavailable" : " must be available");
    }
  }
  if (auto why = queue_assoc(c.delta, ann.g, roles, ann.crashed))
    return "A4: " + *why;
  return std::nullopt;
}

bool associated(const AnnotatedGlobal& ann, const Configuration& c, const RoleSet& reliable) {
  return !association_failure(ann, c, reliable).has_value();
}

// ---------------------------------------------------------------------------
// Canonical configuration

namespace {

using QueueDemand = std::map<std::pair<Role, Role>, std::vector<QueueMsg>>;

QueueDemand derive_queues(const GlobalPtr& g) {
  switch (g->kind) {
    case GlobalType::Kind::End:
    case GlobalType::Kind::RecVar:
    case GlobalType::Kind::Rec:
      return {};
    case GlobalType::Kind::Comm:
      break;
  }
  std::optional<QueueDemand> common;
  for (const auto& b : g->branches) {
    QueueDemand d = derive_queues(b.cont);
    if (!common) {
      common = std::move(d);
    } else if (*common != d) {
      throw InconsistentQueuesError("branches of " + g->sender.name + "->" + g->receiver.name +
                                    " demand different queue contents");
    }
  }
  const bool pseudo = g->committed && g->branches[*g->committed].label.is_crash();
  if (g->committed && !pseudo) {
    const auto& committed = g->branches[*g->committed];
    auto& channel = (*common)[{g->sender, g->receiver}];
    channel.insert(channel.begin(), QueueMsg{committed.label, committed.sort});
  }
  return std::move(*common);
}

}  // namespace

Configuration derive_canonical_config(const AnnotatedGlobal& ann, const RoleSet& reliable,
                                      const RoleSet& extra_roles) {
  std::map<Role, LocalPtr> gamma;
  for (const Role& p : active_roles(ann.g)) gamma[p] = project(ann.g, p, reliable);
  for (const Role& p : ann.crashed) gamma[p] = l_stop();
  for (const Role& p : extra_roles)
    if (!gamma.count(p)) gamma[p] = l_end();

  Configuration c = Configuration::make(std::move(gamma));
  for (const Role& p : ann.crashed) c.delta.make_unavailable_towards(p);
  for (auto& [pair, msgs] : derive_queues(ann.g)) {
    for (auto& m : msgs) c.delta.append(pair.first, pair.second, m);
  }
  if (auto why = association_failure(ann, c, reliable))
    throw InconsistentQueuesError(*why);
  return c;
}

// ---------------------------------------------------------------------------
// Exploration

std::vector<TransitionLabel> TransitionGraph::path_to(std::size_t state) const {
  std::vector<std::optional<std::size_t>> parent_edge(states.size());
  std::vector<bool> seen(states.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop_front();
    if (s == state) break;
    for (std::size_t e : out_edges[s]) {
      std::size_t t = edges[e].to;
      if (seen[t]) continue;
      seen[t] = true;
      parent_edge[t] = e;
      queue.push_back(t);
    }
  }
  std::vector<TransitionLabel> path;
  for (std::size_t s = state; parent_edge[s];) {
    const Edge& e = edges[*parent_edge[s]];
    path.push_back(e.label);
    s = e.from;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

bool within_queue_bound(const Configuration& c, std::size_t bound) {
  for (const auto& [pair, q] : c.delta.channels)
    if (q.msgs.size() > bound) return false;
  return true;
}

}  // namespace

TransitionGraph explore(const Configuration& c0, const RoleSet& reliable,
                        const ExplorationBounds& bounds) {
  TransitionGraph g;
  auto keep = filter_arrow(ArrowKind::ReliabilityAware, reliable);

  auto intern = [&](const Configuration& c) {
    std::string key = config_key(c);
    auto it = g.index.find(key);
    if (it != g.index.end()) return std::make_pair(it->second, false);
    std::size_t id = g.states.size();
    g.states.push_back(c);
    g.out_edges.emplace_back();
    g.state_truncated.push_back(0);
    g.index.emplace(std::move(key), id);
    return std::make_pair(id, true);
  };

  std::deque<std::size_t> frontier;
  frontier.push_back(intern(c0).first);
  while (!frontier.empty()) {
    std::size_t s = frontier.front();
    frontier.pop_front();
    Configuration state = g.states[s];  // copy: states may reallocate below
    for (auto& step : config_transitions(state, reliable)) {
      if (!keep(step.label)) continue;
      if (!within_queue_bound(step.next, bounds.queue_bound)) {
        g.truncated = true;
        g.state_truncated[s] = 1;
        continue;
      }
      auto [to, fresh] = intern(step.next);
      if (g.states.size() > bounds.state_bound) throw StateBoundExceededError(bounds.state_bound);
      g.edges.push_back({s, step.label, to});
      g.out_edges[s].push_back(g.edges.size() - 1);
      if (fresh) frontier.push_back(to);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Safety

namespace {

struct BranchView {
  Role at;
  Role from;
};

std::vector<BranchView> waiting_branches(const Configuration& c) {
  std::vector<BranchView> out;
  for (const auto& [role, type] : c.gamma) {
    LocalPtr t = unfold_head(type);
    if (t->kind == LocalType::Kind::Branch) out.push_back({role, t->peer});
  }
  return out;
}

bool has_edge(const TransitionGraph& g, std::size_t s,
              const std::function<bool(const TransitionLabel&)>& pred) {
  for (std::size_t e : g.out_edges[s])
    if (pred(g.edges[e].label)) return true;
  return false;
}

}  // namespace

Verdict check_safety(const Configuration& c0, const RoleSet& reliable,
                     const ExplorationBounds& bounds) {
  TransitionGraph g;
  try {
    g = explore(c0, reliable, bounds);
  } catch (const StateBoundExceededError& e) {
    return Verdict::inconclusive(e.what());
  }

  for (std::size_t s = 0; s < g.states.size(); ++s) {
    const Configuration& c = g.states[s];
    for (const auto& [at, from] : waiting_branches(c)) {
      const ChannelQueue& q = c.delta.at(from, at);
      if (!q.unavailable && !q.msgs.empty()) {
        const Role& at_ = at;
        const Role& from_ = from;
        bool ok = has_edge(g, s, [&](const TransitionLabel& l) {
          return l.kind == TransitionLabel::Kind::Recv && l.a == at_ && l.b == from_;
        });
        if (!ok)
          return Verdict::violated(g.path_to(s), "role " + at.name + " cannot receive the message '" +
                                                     q.msgs.front().label.name + "' queued from " +
                                                     from.name);
      }
      auto from_type = c.gamma.find(from);
      bool from_stopped =
          from_type != c.gamma.end() && from_type->second->kind == LocalType::Kind::Stop;
      if (from_stopped && !q.unavailable && q.msgs.empty()) {
        const Role& at_ = at;
        const Role& from_ = from;
        bool ok = has_edge(g, s, [&](const TransitionLabel& l) {
          return l.kind == TransitionLabel::Kind::CrashDetect && l.a == at_ && l.b == from_;
        });
        if (!ok)
          return Verdict::violated(g.path_to(s), "role " + at.name + " cannot detect the crash of " +
                                                     from.name);
      }
    }
  }
  if (g.truncated) return Verdict::inconclusive("queue bound reached; graph truncated");
  return Verdict::ok();
}

// ---------------------------------------------------------------------------
// Deadlock freedom

Verdict check_deadlock_freedom(const Configuration& c0, const RoleSet& reliable,
                               const ExplorationBounds& bounds) {
  Verdict safety = check_safety(c0, reliable, bounds);
  if (safety.status == Verdict::Status::Violated) {
    safety.reason = "safety violated: " + safety.reason;
    return safety;
  }

  TransitionGraph g;
  try {
    g = explore(c0, reliable, bounds);
  } catch (const StateBoundExceededError& e) {
    return Verdict::inconclusive(e.what());
  }

  for (std::size_t s = 0; s < g.states.size(); ++s) {
    if (!g.out_edges[s].empty() || g.state_truncated[s]) continue;
    const Configuration& c = g.states[s];
    for (const auto& [role, type] : c.gamma) {
      if (type->kind != LocalType::Kind::End && type->kind != LocalType::Kind::Stop)
        return Verdict::violated(g.path_to(s),
                                 "terminal state leaves role " + role.name + " mid-protocol");
    }
    for (const auto& [pair, q] : c.delta.channels) {
      bool to_stopped = c.gamma.count(pair.second) &&
                        c.gamma.at(pair.second)->kind == LocalType::Kind::Stop;
      if (to_stopped ? !q.unavailable : (q.unavailable || !q.msgs.empty()))
        return Verdict::violated(g.path_to(s), "terminal state leaves queue " + pair.first.name +
                                                   ">" + pair.second.name + " in a bad shape");
    }
  }
  if (safety.status == Verdict::Status::Inconclusive) return safety;
  if (g.truncated) return Verdict::inconclusive("queue bound reached; graph truncated");
  return Verdict::ok();
}

// ---------------------------------------------------------------------------
// Liveness

namespace {

struct CycleAnalyzer {
  const TransitionGraph& g;
  std::size_t max_len;
  std::size_t budget = 200000;
  bool budget_exhausted = false;

  std::vector<std::size_t> path_states;
  std::vector<std::size_t> path_edges;
  std::vector<bool> on_path;

  std::optional<std::pair<std::size_t, std::vector<std::size_t>>> violation;  // root, edges

  explicit CycleAnalyzer(const TransitionGraph& graph, std::size_t len)
      : g(graph), max_len(len), on_path(graph.states.size(), false) {}

  static bool plain(const TransitionLabel& l) { return l.kind != TransitionLabel::Kind::Crash; }

  void run() {
    for (std::size_t root = 0; root < g.states.size() && !violation; ++root) {
      path_states = {root};
      path_edges.clear();
      on_path.assign(g.states.size(), false);
      on_path[root] = true;
      dfs(root, root);
      if (budget_exhausted) return;
    }
  }

  void dfs(std::size_t root, std::size_t s) {
    if (violation || budget_exhausted) return;
    if (budget-- == 0) {
      budget_exhausted = true;
      return;
    }
    for (std::size_t e : g.out_edges[s]) {
      const auto& edge = g.edges[e];
      if (!plain(edge.label)) continue;
      if (edge.to == root) {
        path_edges.push_back(e);
        examine_cycle();
        path_edges.pop_back();
        if (violation) return;
        continue;
      }
      // Roots enumerate in increasing order, so cycles touch only states
      // at or above the current root.
      if (edge.to < root || on_path[edge.to] || path_edges.size() + 1 >= max_len) continue;
      path_edges.push_back(e);
      path_states.push_back(edge.to);
      on_path[edge.to] = true;
      dfs(root, edge.to);
      on_path[edge.to] = false;
      path_states.pop_back();
      path_edges.pop_back();
      if (violation) return;
    }
  }

  void examine_cycle() {
    // Fairness: every plain action enabled anywhere on the cycle is matched
    // inside the cycle (sends by channel, receipts and detections exactly).
    for (std::size_t s : path_states) {
      if (g.state_truncated[s]) return;  // suppressed sends: fairness unknown
      for (std::size_t e : g.out_edges[s]) {
        const TransitionLabel& enabled = g.edges[e].label;
        if (!plain(enabled)) continue;
        if (!matched_in_cycle(enabled)) return;  // unfair cycle, not a counterexample
      }
    }
    if (persistent_undischarged_obligation()) {
      violation = {path_states.front(), path_edges};
    }
  }

  bool matched_in_cycle(const TransitionLabel& enabled) const {
    for (std::size_t e : path_edges) {
      const TransitionLabel& l = g.edges[e].label;
      if (enabled.kind == TransitionLabel::Kind::Send) {
        if (l.kind == TransitionLabel::Kind::Send && l.a == enabled.a && l.b == enabled.b)
          return true;
      } else if (l == enabled) {
        return true;
      }
    }
    return false;
  }

  bool persistent_undischarged_obligation() const {
    const Configuration& first = g.states[path_states.front()];

    // L1: a queued head message present throughout and never consumed.
    for (const auto& [pair, q0] : first.delta.channels) {
      if (q0.unavailable || q0.msgs.empty()) continue;
      bool persists = true;
      for (std::size_t s : path_states) {
        const ChannelQueue& q = g.states[s].delta.at(pair.first, pair.second);
        if (q.unavailable || q.msgs.empty() || !(q.msgs.front() == q0.msgs.front())) {
          persists = false;
          break;
        }
      }
      if (!persists) continue;
      bool discharged = false;
      for (std::size_t e : path_edges) {
        const TransitionLabel& l = g.edges[e].label;
        if (l.kind == TransitionLabel::Kind::Recv && l.a == pair.second && l.b == pair.first) {
          discharged = true;
          break;
        }
      }
      if (!discharged) return true;
    }

    // L2: an external choice pending throughout, never fired.
    for (const auto& [role, type] : first.gamma) {
      LocalPtr t0 = unfold_head(type);
      if (t0->kind != LocalType::Kind::Branch) continue;
      bool persists = true;
      for (std::size_t s : path_states) {
        LocalPtr t = unfold_head(g.states[s].gamma.at(role));
        if (t->kind != LocalType::Kind::Branch || t->peer != t0->peer) {
          persists = false;
          break;
        }
      }
      if (!persists) continue;
      bool discharged = false;
      for (std::size_t e : path_edges) {
        const TransitionLabel& l = g.edges[e].label;
        bool fired = (l.kind == TransitionLabel::Kind::Recv ||
                      l.kind == TransitionLabel::Kind::CrashDetect) &&
                     l.a == role && l.b == t0->peer;
        if (fired) {
          discharged = true;
          break;
        }
      }
      if (!discharged) return true;
    }
    return false;
  }
};

}  // namespace

Verdict check_liveness(const Configuration& c0, const RoleSet& reliable,
                       const ExplorationBounds& bounds) {
  Verdict safety = check_safety(c0, reliable, bounds);
  if (safety.status == Verdict::Status::Violated) {
    safety.reason = "safety violated: " + safety.reason;
    return safety;
  }

  TransitionGraph g;
  try {
    g = explore(c0, reliable, bounds);
  } catch (const StateBoundExceededError& e) {
    return Verdict::inconclusive(e.what());
  }

  // Terminal states of the non-crashing fragment with pending obligations.
  for (std::size_t s = 0; s < g.states.size(); ++s) {
    if (g.state_truncated[s]) continue;
    bool plain_terminal = true;
    for (std::size_t e : g.out_edges[s])
      if (g.edges[e].label.kind != TransitionLabel::Kind::Crash) plain_terminal = false;
    if (!plain_terminal) continue;

    const Configuration& c = g.states[s];
    for (const auto& [pair, q] : c.delta.channels) {
      if (!q.unavailable && !q.msgs.empty())
        return Verdict::violated(g.path_to(s), "message '" + q.msgs.front().label.name +
                                                   "' from " + pair.first.name + " to " +
                                                   pair.second.name + " is never consumed");
    }
    for (const auto& [role, type] : c.gamma) {
      LocalPtr t = unfold_head(type);
      if (t->kind == LocalType::Kind::Branch)
        return Verdict::violated(g.path_to(s), "role " + role.name +
                                                   " waits forever on " + t->peer.name);
    }
  }

  CycleAnalyzer cycles(g, bounds.cycle_len_bound);
  cycles.run();
  if (cycles.violation) {
    auto [root, cycle_edges] = *cycles.violation;
    std::vector<TransitionLabel> witness = g.path_to(root);
    for (std::size_t e : cycle_edges) witness.push_back(g.edges[e].label);
    return Verdict::violated(std::move(witness),
                             "fair cycle leaves an obligation undischarged");
  }
  if (cycles.budget_exhausted) return Verdict::inconclusive("cycle enumeration budget exhausted");
  if (safety.status == Verdict::Status::Inconclusive) return safety;
  if (g.truncated) return Verdict::inconclusive("queue bound reached; graph truncated");
  return Verdict::ok();
}

// ---------------------------------------------------------------------------
// Correspondence

Verdict check_correspondence(const AnnotatedGlobal& ann0, const Configuration& c0,
                             const RoleSet& reliable, const ExplorationBounds& bounds) {
  struct Pair {
    AnnotatedGlobal ann;
    Configuration config;
    std::vector<TransitionLabel> path;
  };
  auto pair_key = [](const AnnotatedGlobal& a, const Configuration& c) {
    std::string key = canonical_key(a.g) + "/";
    for (const Role& r : a.crashed) key += r.name + ",";
    return key + "/" + config_key(c);
  };
  auto keep = filter_arrow(ArrowKind::ReliabilityAware, reliable);

  std::unordered_map<std::string, bool> visited;
  std::deque<Pair> frontier;
  frontier.push_back({ann0, c0, {}});
  visited[pair_key(ann0, c0)] = true;
  bool truncated = false;

  while (!frontier.empty()) {
    Pair current = std::move(frontier.front());
    frontier.pop_front();
    if (visited.size() > bounds.state_bound)
      return Verdict::inconclusive("state bound exceeded in the pair graph");

    auto global_steps = global_transitions(current.ann, reliable);
    std::size_t config_moves = 0;

    for (auto& step : config_transitions(current.config, reliable)) {
      if (!keep(step.label)) continue;
      if (!within_queue_bound(step.next, bounds.queue_bound)) {
        truncated = true;
        continue;
      }
      ++config_moves;

      const AnnotatedGlobal* match = nullptr;
      for (const auto& gs : global_steps)
        if (gs.label == step.label) {
          match = &gs.next;
          break;
        }
      std::vector<TransitionLabel> path = current.path;
      path.push_back(step.label);
      if (!match)
        return Verdict::violated(std::move(path), "configuration action " + to_string(step.label) +
                                                      " has no global counterpart");
      if (auto why = association_failure(*match, step.next, reliable))
        return Verdict::violated(std::move(path), "successors no longer associated: " + *why);

      std::string key = pair_key(*match, step.next);
      if (!visited[key]) {
        visited[key] = true;
        frontier.push_back({*match, step.next, std::move(path)});
      }
    }

    if (!global_steps.empty() && config_moves == 0) {
      bool only_reliable_crashes = true;
      for (const auto& gs : global_steps)
        if (keep(gs.label)) only_reliable_crashes = false;
      if (!only_reliable_crashes)
        return Verdict::violated(current.path,
                                 "global type can act but the configuration cannot");
    }
  }
  if (truncated) return Verdict::inconclusive("queue bound reached; pair graph truncated");
  return Verdict::ok();
}

}  // namespace crmpst
