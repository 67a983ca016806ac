#pragma once

#include <string>
#include <vector>

#include "crmpst/types.hpp"

namespace crmpst {

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string rule;
  std::string message;
  Span span;
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Diagnostic::Severity::Error) return true;
  return false;
}

std::string to_string(const Diagnostic& d);

}  // namespace crmpst
