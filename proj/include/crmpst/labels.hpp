#pragma once

#include <compare>
#include <string>

#include "crmpst/types.hpp"

namespace crmpst {

/// Actions shared by the global-type, configuration and session semantics.
struct TransitionLabel {
  enum class Kind { Send, Recv, Crash, CrashDetect };

  Kind kind = Kind::Send;
  Role a;  // Send: sender; Recv: receiver; Crash: crashed; CrashDetect: detector
  Role b;  // Send: receiver; Recv: sender; CrashDetect: crashed
  Label label;
  Sort sort = Sort::Unit;

  const Role& subject() const { return a; }

  auto operator<=>(const TransitionLabel&) const = default;

  static TransitionLabel send(Role from, Role to, Label l, Sort s) {
    return {Kind::Send, std::move(from), std::move(to), std::move(l), s};
  }
  static TransitionLabel recv(Role at, Role from, Label l, Sort s) {
    return {Kind::Recv, std::move(at), std::move(from), std::move(l), s};
  }
  static TransitionLabel crash(Role r) { return {Kind::Crash, std::move(r), {}, {}, Sort::Unit}; }
  static TransitionLabel crash_detect(Role detector, Role crashed) {
    return {Kind::CrashDetect, std::move(detector), std::move(crashed), {}, Sort::Unit};
  }
};

std::string to_string(const TransitionLabel& l);

}  // namespace crmpst
