#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "crmpst/config_lts.hpp"
#include "crmpst/global_lts.hpp"

namespace crmpst {

struct ExplorationBounds {
  std::size_t queue_bound = 8;       // max messages per channel
  std::size_t state_bound = 100000;  // max explored states
  std::size_t cycle_len_bound = 12;  // max lasso length for liveness
};

struct Verdict {
  enum class Status { Holds, Violated, Inconclusive };

  Status status = Status::Holds;
  std::vector<TransitionLabel> witness;  // present iff violated
  std::string reason;

  bool holds() const { return status == Status::Holds; }
  static Verdict ok() { return {Status::Holds, {}, {}}; }
  static Verdict violated(std::vector<TransitionLabel> w, std::string why) {
    return {Status::Violated, std::move(w), std::move(why)};
  }
  static Verdict inconclusive(std::string why) { return {Status::Inconclusive, {}, std::move(why)}; }
};

std::string to_string(Verdict::Status s);

/// Association of an annotated global type with a configuration: active roles
/// are subtype-governed by their projections, crashed roles are stopped, the
/// rest have ended, and the queues spell out exactly the transmissions en
/// route (unavailable precisely towards crashed roles).
bool associated(const AnnotatedGlobal& ann, const Configuration& c, const RoleSet& reliable);

/// Like associated, but names the first failing clause.
std::optional<std::string> association_failure(const AnnotatedGlobal& ann, const Configuration& c,
                                               const RoleSet& reliable);

struct InconsistentQueuesError : std::runtime_error {
  explicit InconsistentQueuesError(const std::string& why)
      : std::runtime_error("queue contents are not derivable: " + why) {}
};

/// The configuration associated with ann by construction: projections for
/// active roles, Stop for crashed ones, queues rebuilt from the en-route
/// transmissions. extra_roles join with type End. Throws ProjectionError or
/// InconsistentQueuesError.
Configuration derive_canonical_config(const AnnotatedGlobal& ann, const RoleSet& reliable,
                                      const RoleSet& extra_roles = {});

struct TransitionGraph {
  std::vector<Configuration> states;
  struct Edge {
    std::size_t from;
    TransitionLabel label;
    std::size_t to;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> out_edges;  // state -> edge indices
  std::vector<std::uint8_t> state_truncated;        // some edge was dropped here
  std::unordered_map<std::string, std::size_t> index;
  bool truncated = false;

  /// Shortest path of labels from state 0 to the given state.
  std::vector<TransitionLabel> path_to(std::size_t state) const;
};

struct StateBoundExceededError : std::runtime_error {
  explicit StateBoundExceededError(std::size_t bound)
      : std::runtime_error("state bound exceeded: " + std::to_string(bound)) {}
};

/// Breadth-first exploration under the reliability-aware arrow. Edges that
/// would grow a channel beyond queue_bound are dropped and mark the graph
/// truncated. Throws StateBoundExceededError.
TransitionGraph explore(const Configuration& c0, const RoleSet& reliable,
                        const ExplorationBounds& bounds);

/// No reachable state has a receivable message its addressee cannot take, and
/// every wait on a crashed peer with a drained queue can detect the crash.
Verdict check_safety(const Configuration& c0, const RoleSet& reliable,
                     const ExplorationBounds& bounds);

/// Safety plus: every terminal reachable state has only ended or stopped
/// entries and empty available queues.
Verdict check_deadlock_freedom(const Configuration& c0, const RoleSet& reliable,
                               const ExplorationBounds& bounds);

/// Safety plus: on the non-crashing fragment reachable from any state, no
/// terminal state and no fair cycle (up to cycle_len_bound) leaves a queued
/// message unconsumed or an external choice never triggered.
Verdict check_liveness(const Configuration& c0, const RoleSet& reliable,
                       const ExplorationBounds& bounds);

/// Joint exploration of (annotated global, configuration): every
/// configuration action must be mirrored by the global type with the same
/// label into an associated pair, and whenever the global type can move the
/// configuration can follow suit.
Verdict check_correspondence(const AnnotatedGlobal& ann0, const Configuration& c0,
                             const RoleSet& reliable, const ExplorationBounds& bounds);

}  // namespace crmpst
