#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "crmpst/projection.hpp"
#include "crmpst/report.hpp"
#include "crmpst/typecheck.hpp"

namespace py = pybind11;
using namespace crmpst;

namespace {

ProtocolDecl parse_or_raise(const std::string& source) {
  auto parsed = parse_protocol(source);
  if (!parsed.ok()) {
    std::string message = "protocol does not parse";
    if (!parsed.diagnostics.empty()) message = to_string(parsed.diagnostics.front());
    throw py::value_error(message);
  }
  return *parsed.value;
}

Session session_or_raise(const ProtocolDecl& decl, const std::string& source) {
  auto parsed = parse_process_script(source);
  if (!parsed.ok()) {
    std::string message = "process script does not parse";
    if (!parsed.diagnostics.empty()) message = to_string(parsed.diagnostics.front());
    throw py::value_error(message);
  }
  Session m = parsed.value->to_session();
  for (const auto& [role, rel] : decl.roles)
    if (!m.entries.count(role)) m.entries[role] = {p_inact(), false, {}};
  return m;
}

py::dict verdict_dict(const Verdict& v) {
  py::dict out;
  out["status"] = to_string(v.status);
  py::list witness;
  for (const auto& label : v.witness) witness.append(to_string(label));
  out["witness"] = v.status == Verdict::Status::Violated ? py::object(witness) : py::none();
  out["reason"] = v.reason;
  return out;
}

}  // namespace

PYBIND11_MODULE(_crmpst, m) {
  m.doc() = "multiparty session types with crash-stop failures";

  m.def("check", [](const std::string& source) {
    py::dict out;
    auto parsed = parse_protocol(source);
    py::list diags;
    for (const auto& d : parsed.diagnostics) diags.append(to_string(d));
    out["diagnostics"] = diags;
    out["ok"] = parsed.ok();
    if (parsed.ok()) {
      py::dict projections;
      for (const auto& [role, type] : project_all(*parsed.value))
        projections[py::str(role.name)] = render_local(type);
      out["protocol"] = parsed.value->name;
      out["projections"] = projections;
    }
    return out;
  }, py::arg("source"), "Parse a protocol and project every role.");

  m.def("project", [](const std::string& source, const std::string& role) {
    ProtocolDecl decl = parse_or_raise(source);
    return render_local(project(decl.body, Role{role}, decl.reliable_set()));
  }, py::arg("source"), py::arg("role"), "Projection of one role, rendered.");

  m.def("render_removed", [](const std::string& source, const std::string& role) {
    ProtocolDecl decl = parse_or_raise(source);
    return render_global(remove_role(decl.body, Role{role}));
  }, py::arg("source"), py::arg("role"), "Global type after removing a crashed role.");

  m.def("verify", [](const std::string& source, std::size_t queue_bound,
                     std::size_t state_bound) {
    ProtocolDecl decl = parse_or_raise(source);
    RoleSet reliable = decl.reliable_set();
    AnnotatedGlobal ann{{}, decl.body};
    Configuration c0 = derive_canonical_config(ann, reliable, decl.role_set());
    ExplorationBounds bounds;
    bounds.queue_bound = queue_bound;
    bounds.state_bound = state_bound;
    py::dict out;
    out["safety"] = verdict_dict(check_safety(c0, reliable, bounds));
    out["deadlock_freedom"] = verdict_dict(check_deadlock_freedom(c0, reliable, bounds));
    out["liveness"] = verdict_dict(check_liveness(c0, reliable, bounds));
    out["correspondence"] = verdict_dict(check_correspondence(ann, c0, reliable, bounds));
    return out;
  }, py::arg("source"), py::arg("queue_bound") = 8, py::arg("state_bound") = 100000,
     "Safety, deadlock-freedom, liveness and correspondence verdicts.");

  m.def("typecheck", [](const std::string& protocol, const std::string& script) {
    ProtocolDecl decl = parse_or_raise(protocol);
    Session session = session_or_raise(decl, script);
    auto result = typecheck_session(session, {{}, decl.body}, decl.reliable_set());
    py::dict out;
    out["ok"] = result.ok;
    py::list diags;
    for (const auto& d : result.diagnostics) diags.append(to_string(d));
    out["diagnostics"] = diags;
    return out;
  }, py::arg("protocol"), py::arg("script"), "Type-check processes against a protocol.");

  m.def("run", [](const std::string& protocol, const std::string& script,
                  std::optional<std::uint64_t> seed,
                  std::vector<std::pair<int, std::string>> crashes, double crash_prob,
                  int max_crashes, int max_steps) {
    ProtocolDecl decl = parse_or_raise(protocol);
    Session session = session_or_raise(decl, script);
    CrashSchedule schedule = CrashSchedule::none();
    if (!crashes.empty()) {
      std::vector<std::pair<int, Role>> exact;
      for (auto& [step, role] : crashes) exact.emplace_back(step, Role{role});
      schedule = CrashSchedule::exact(std::move(exact));
    } else if (seed) {
      schedule = CrashSchedule::seeded(*seed, crash_prob, max_crashes);
    }
    RunResult result = run_session(session, decl.reliable_set(), schedule, max_steps);
    py::dict out;
    py::list trace;
    for (const auto& entry : result.trace) trace.append(to_string(entry.label));
    out["trace"] = trace;
    out["quiescent"] = result.quiescent;
    out["max_steps_exceeded"] = result.max_steps_exceeded;
    return out;
  }, py::arg("protocol"), py::arg("script"), py::arg("seed") = py::none(),
     py::arg("crashes") = std::vector<std::pair<int, std::string>>{},
     py::arg("crash_prob") = 0.05, py::arg("max_crashes") = 1, py::arg("max_steps") = 10000,
     "Interpret processes under a crash schedule; returns the label trace.");
}
