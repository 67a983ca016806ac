#pragma once

#include <map>
#include <string>

#include "crmpst/frontend.hpp"
#include "crmpst/verifier.hpp"

namespace crmpst {

/// JSON verification report; output is byte-stable for fixed inputs.
std::string verify_report_json(const ProtocolDecl& decl,
                               const std::map<Role, LocalPtr>& projections,
                               const std::map<std::string, Verdict>& checks,
                               const ExplorationBounds& bounds);

std::string trace_json(const std::vector<TraceEntry>& trace, bool quiescent,
                       bool max_steps_exceeded);

}  // namespace crmpst
