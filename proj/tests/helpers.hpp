#pragma once

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "crmpst/frontend.hpp"
#include "crmpst/projection.hpp"

namespace crmpst::testing {

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(CRMPST_FIXTURE_DIR) + "/" + name, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "fixture not found: " << name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ProtocolDecl load_protocol_fixture(const std::string& name) {
  auto parsed = parse_protocol(read_fixture(name));
  for (const auto& d : parsed.diagnostics) {
    INFO(to_string(d));
    CHECK(d.severity != Diagnostic::Severity::Error);
  }
  REQUIRE(parsed.value.has_value());
  return *parsed.value;
}

inline ProcessScript load_script_fixture(const std::string& name) {
  auto parsed = parse_process_script(read_fixture(name));
  for (const auto& d : parsed.diagnostics) {
    INFO(to_string(d));
    CHECK(d.severity != Diagnostic::Severity::Error);
  }
  REQUIRE(parsed.value.has_value());
  return *parsed.value;
}

// Term-building shorthand for tests.
inline Role role(const std::string& name) { return Role{name}; }
inline Label label(const std::string& name) { return Label{name}; }

inline GlobalBranch gb(const std::string& l, GlobalPtr cont, Sort s = Sort::Unit) {
  return {Label{l}, s, std::move(cont)};
}
inline LocalBranch lb(const std::string& l, LocalPtr cont, Sort s = Sort::Unit) {
  return {Label{l}, s, std::move(cont)};
}

}  // namespace crmpst::testing
