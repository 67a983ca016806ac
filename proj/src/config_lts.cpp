#include "crmpst/config_lts.hpp"

#include <stdexcept>

namespace crmpst {

const ChannelQueue& QueueEnv::at(const Role& from, const Role& to) const {
  static const ChannelQueue empty;
  auto it = channels.find({from, to});
  return it == channels.end() ? empty : it->second;
}

void QueueEnv::append(const Role& from, const Role& to, QueueMsg msg) {
  ChannelQueue& q = channels[{from, to}];
  if (q.unavailable) return;
  q.msgs.push_back(std::move(msg));
}

void QueueEnv::pop_head(const Role& from, const Role& to) {
  ChannelQueue& q = channels[{from, to}];
  if (q.unavailable || q.msgs.empty()) throw std::logic_error("pop from empty queue");
  q.msgs.erase(q.msgs.begin());
}

void QueueEnv::make_unavailable_towards(const Role& to) {
  for (auto& [pair, q] : channels) {
    if (pair.second == to) {
      q.unavailable = true;
      q.msgs.clear();
    }
  }
}

Configuration Configuration::make(std::map<Role, LocalPtr> gamma) {
  Configuration c;
  for (const auto& [from, t1] : gamma)
    for (const auto& [to, t2] : gamma)
      if (from != to) c.delta.channels[{from, to}] = {};
  c.gamma = std::move(gamma);
  return c;
}

std::string config_key(const Configuration& c) {
  std::string out;
  for (const auto& [role, t] : c.gamma) {
    out += role.name;
    out += '=';
    out += canonical_key(t);
    out += '|';
  }
  for (const auto& [pair, q] : c.delta.channels) {
    out += pair.first.name;
    out += '>';
    out += pair.second.name;
    out += q.unavailable ? "!" : ":";
    for (const auto& m : q.msgs) {
      out += m.label.name;
      out += ',';
      out += std::to_string(static_cast<int>(m.sort));
      out += ';';
    }
    out += '|';
  }
  return out;
}

std::vector<ConfigStep> config_transitions(const Configuration& c, const RoleSet& reliable) {
  (void)reliable;  // reliability only filters arrows, it does not change the raw relation
  std::vector<ConfigStep> out;

  for (const auto& [role, type] : c.gamma) {
    LocalPtr t = unfold_head(type);

    if (t->kind == LocalType::Kind::Select) {
      for (const auto& b : t->branches) {
        Configuration next = c;
        next.gamma[role] = b.cont;
        next.delta.append(role, t->peer, {b.label, b.sort});
        out.push_back({TransitionLabel::send(role, t->peer, b.label, b.sort), std::move(next)});
      }
      continue;
    }

    if (t->kind == LocalType::Kind::Branch) {
      const ChannelQueue& q = c.delta.at(t->peer, role);
      if (!q.unavailable && !q.msgs.empty()) {
        const QueueMsg& head = q.msgs.front();
        for (const auto& b : t->branches) {
          if (b.label != head.label || b.label.is_crash() || b.sort != head.sort) continue;
          Configuration next = c;
          next.gamma[role] = b.cont;
          next.delta.pop_head(t->peer, role);
          out.push_back(
              {TransitionLabel::recv(role, t->peer, head.label, head.sort), std::move(next)});
          break;
        }
      }
      if (!q.unavailable && q.msgs.empty()) {
        auto peer_type = c.gamma.find(t->peer);
        bool peer_stopped =
            peer_type != c.gamma.end() && peer_type->second->kind == LocalType::Kind::Stop;
        if (peer_stopped) {
          for (const auto& b : t->branches) {
            if (!b.label.is_crash()) continue;
            Configuration next = c;
            next.gamma[role] = b.cont;
            out.push_back({TransitionLabel::crash_detect(role, t->peer), std::move(next)});
            break;
          }
        }
      }
      continue;
    }
  }

  // Any role that has neither terminated nor crashed may crash.
  for (const auto& [role, type] : c.gamma) {
    if (type->kind == LocalType::Kind::End || type->kind == LocalType::Kind::Stop) continue;
    Configuration next = c;
    next.gamma[role] = l_stop();
    next.delta.make_unavailable_towards(role);
    out.push_back({TransitionLabel::crash(role), std::move(next)});
  }
  return out;
}

std::function<bool(const TransitionLabel&)> filter_arrow(ArrowKind kind, const RoleSet& reliable) {
  if (kind == ArrowKind::Plain) {
    return [](const TransitionLabel& l) { return l.kind != TransitionLabel::Kind::Crash; };
  }
  return [reliable](const TransitionLabel& l) {
    return l.kind != TransitionLabel::Kind::Crash || !reliable.count(l.a);
  };
}

std::optional<Configuration> config_step(const Configuration& c, const RoleSet& reliable,
                                         const TransitionLabel& lbl) {
  std::optional<Configuration> found;
  for (auto& step : config_transitions(c, reliable)) {
    if (step.label != lbl) continue;
    if (found && config_key(*found) != config_key(step.next))
      throw std::logic_error("configuration reduction is not deterministic");
    if (!found) found = std::move(step.next);
  }
  return found;
}

}  // namespace crmpst
