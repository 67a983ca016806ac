#include "crmpst/global_lts.hpp"

#include <cassert>
#include <map>
#include <stdexcept>
#include <string>

namespace crmpst {

namespace {

using Steps = std::vector<std::pair<TransitionLabel, GlobalPtr>>;

// Enumerates the non-crash transitions of a term. Re-entering a term already
// on the recursion stack contributes nothing: a transition needs a finite
// derivation, so the least fixpoint is the right reading.
struct Enumerator {
  std::map<std::string, std::optional<Steps>> memo;

  const Steps& run(const GlobalPtr& g0) {
    std::string key = canonical_key(g0);
    auto it = memo.find(key);
    if (it != memo.end()) {
      static const Steps empty;
      return it->second ? *it->second : empty;
    }
    memo.emplace(key, std::nullopt);  // in progress
    Steps steps = compute(g0);
    auto& slot = memo[key];
    slot = std::move(steps);
    return *slot;
  }

  Steps compute(const GlobalPtr& g0) {
    GlobalPtr g = unfold_head(g0);
    Steps out;
    if (g->kind != GlobalType::Kind::Comm) return out;

    if (!g->committed) {
      if (!g->receiver_crashed) {
        // Send commits the chosen branch; the message goes en route.
        for (std::size_t i = 0; i < g->branches.size(); ++i) {
          const auto& b = g->branches[i];
          if (b.label.is_crash()) continue;
          out.emplace_back(
              TransitionLabel::send(g->sender, g->receiver, b.label, b.sort),
              g_comm_runtime(g->sender, false, g->receiver, false, g->branches, i));
        }
      } else {
        // The receiver has crashed: the message is orphaned and the protocol
        // proceeds directly with the chosen continuation.
        for (const auto& b : g->branches) {
          if (b.label.is_crash()) continue;
          out.emplace_back(TransitionLabel::send(g->sender, g->receiver, b.label, b.sort),
                           b.cont);
        }
      }
      propagate(g, out, /*exclude_sender=*/true);
      return out;
    }

    const auto& committed = g->branches[*g->committed];
    if (!committed.label.is_crash()) {
      out.emplace_back(TransitionLabel::recv(g->receiver, g->sender, committed.label,
                                             committed.sort),
                       committed.cont);
    } else {
      assert(g->sender_crashed && "a crash pseudo-message needs a crashed sender");
      out.emplace_back(TransitionLabel::crash_detect(g->receiver, g->sender), committed.cont);
    }
    propagate(g, out, /*exclude_sender=*/!g->sender_crashed);
    return out;
  }

  // A label is propagated under the prefix iff every branch admits it; the
  // successor steps all continuations at once.
  void propagate(const GlobalPtr& g, Steps& out, bool exclude_sender) {
    const Steps& first = run(g->branches.front().cont);
    for (const auto& [label, succ0] : first) {
      if (label.subject() == g->receiver) continue;
      if (exclude_sender && label.subject() == g->sender) continue;

      std::vector<GlobalBranch> stepped;
      stepped.reserve(g->branches.size());
      bool all = true;
      for (const auto& b : g->branches) {
        const GlobalPtr* next = lookup(run(b.cont), label);
        if (!next) {
          all = false;
          break;
        }
        stepped.push_back({b.label, b.sort, *next});
      }
      if (!all) continue;
      out.emplace_back(label,
                       g_comm_runtime(g->sender, g->sender_crashed, g->receiver,
                                      g->receiver_crashed, std::move(stepped), g->committed));
    }
  }

  static const GlobalPtr* lookup(const Steps& steps, const TransitionLabel& label) {
    const GlobalPtr* found = nullptr;
    for (const auto& [l, next] : steps) {
      if (l != label) continue;
      if (found && canonical_key(*found) != canonical_key(next))
        throw std::logic_error("ambiguous successor for label " + to_string(label));
      found = &next;
    }
    return found;
  }
};

}  // namespace

std::vector<GlobalStep> global_transitions(const AnnotatedGlobal& st, const RoleSet& reliable) {
  std::vector<GlobalStep> out;

  for (const Role& p : active_roles(st.g)) {
    if (reliable.count(p) || st.crashed.count(p)) continue;
    RoleSet crashed = st.crashed;
    crashed.insert(p);
    out.push_back({TransitionLabel::crash(p), {std::move(crashed), remove_role(st.g, p)}});
  }

  Enumerator enumerator;
  for (const auto& [label, next] : enumerator.run(st.g))
    out.push_back({label, {st.crashed, next}});
  return out;
}

std::optional<AnnotatedGlobal> global_step(const AnnotatedGlobal& st, const RoleSet& reliable,
                                           const TransitionLabel& lbl) {
  std::optional<AnnotatedGlobal> found;
  for (auto& step : global_transitions(st, reliable)) {
    if (step.label != lbl) continue;
    if (found) {
      bool same = found->crashed == step.next.crashed &&
                  canonical_key(found->g) == canonical_key(step.next.g);
      if (!same) throw std::logic_error("ambiguous successor for label " + to_string(lbl));
      continue;
    }
    found = std::move(step.next);
  }
  return found;
}

}  // namespace crmpst
