#include "crmpst/report.hpp"

#include <json.hpp>

#include "crmpst/calculus.hpp"

namespace crmpst {

using nlohmann::json;

std::string verify_report_json(const ProtocolDecl& decl,
                               const std::map<Role, LocalPtr>& projections,
                               const std::map<std::string, Verdict>& checks,
                               const ExplorationBounds& bounds) {
  json report;
  report["protocol"] = decl.name;
  json reliable = json::array();
  for (const auto& [role, rel] : decl.roles)
    if (rel) reliable.push_back(role.name);
  report["reliable"] = std::move(reliable);

  json projs = json::object();
  for (const auto& [role, type] : projections) projs[role.name] = render_local(type);
  report["projections"] = std::move(projs);

  json checks_obj = json::object();
  for (const auto& [name, verdict] : checks) {
    json entry;
    entry["status"] = to_string(verdict.status);
    if (verdict.status == Verdict::Status::Violated) {
      json witness = json::array();
      for (const auto& label : verdict.witness) witness.push_back({{"label", to_string(label)}});
      entry["witness"] = std::move(witness);
    } else {
      entry["witness"] = nullptr;
    }
    entry["reason"] = verdict.reason;
    checks_obj[name] = std::move(entry);
  }
  report["checks"] = std::move(checks_obj);

  report["bounds"] = {{"queue_bound", bounds.queue_bound},
                      {"state_bound", bounds.state_bound},
                      {"cycle_len_bound", bounds.cycle_len_bound}};
  return report.dump(2) + "\n";
}

std::string trace_json(const std::vector<TraceEntry>& trace, bool quiescent,
                       bool max_steps_exceeded) {
  json out;
  json steps = json::array();
  for (const auto& entry : trace)
    steps.push_back(
        {{"step", entry.step}, {"label", to_string(entry.label)}, {"digest", entry.digest}});
  out["trace"] = std::move(steps);
  out["quiescent"] = quiescent;
  out["max_steps_exceeded"] = max_steps_exceeded;
  return out.dump(2) + "\n";
}

}  // namespace crmpst
