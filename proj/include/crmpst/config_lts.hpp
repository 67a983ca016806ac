#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "crmpst/core_ops.hpp"
#include "crmpst/labels.hpp"
#include "crmpst/types.hpp"

namespace crmpst {

struct QueueMsg {
  Label label;
  Sort sort = Sort::Unit;
  bool operator==(const QueueMsg&) const = default;
};

/// One direction of a peer-to-peer channel: a message sequence, or
/// unavailable once the receiver crashed. Appending to an unavailable queue
/// discards the message.
struct ChannelQueue {
  bool unavailable = false;
  std::vector<QueueMsg> msgs;
  bool operator==(const ChannelQueue&) const = default;
};

struct QueueEnv {
  std::map<std::pair<Role, Role>, ChannelQueue> channels;  // (from, to)

  const ChannelQueue& at(const Role& from, const Role& to) const;
  void append(const Role& from, const Role& to, QueueMsg msg);
  void pop_head(const Role& from, const Role& to);
  void make_unavailable_towards(const Role& to);
  bool operator==(const QueueEnv&) const = default;
};

/// A typing context paired with its queue environment. The domain of gamma is
/// fixed for a run; delta holds one queue per ordered pair of distinct roles.
struct Configuration {
  std::map<Role, LocalPtr> gamma;
  QueueEnv delta;

  static Configuration make(std::map<Role, LocalPtr> gamma);
};

std::string config_key(const Configuration& c);

struct ConfigStep {
  TransitionLabel label;
  Configuration next;
};

/// Every transition of c: selections append to the addressee's queue (lost if
/// unavailable), branchings consume a matching queue head, any non-terminated
/// role may crash, and a branching on a stopped peer with an empty available
/// queue detects the crash. Reliability filtering is left to filter_arrow.
std::vector<ConfigStep> config_transitions(const Configuration& c, const RoleSet& reliable);

enum class ArrowKind { Plain, ReliabilityAware };

/// Plain keeps only send/receive/crash-detection; the reliability-aware
/// arrow additionally keeps crashes of unreliable roles.
std::function<bool(const TransitionLabel&)> filter_arrow(ArrowKind kind, const RoleSet& reliable);

std::optional<Configuration> config_step(const Configuration& c, const RoleSet& reliable,
                                         const TransitionLabel& lbl);

}  // namespace crmpst
