#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "crmpst/projection.hpp"
#include "crmpst/report.hpp"
#include "crmpst/typecheck.hpp"

using namespace crmpst;

namespace {

bool color_enabled() {
  const char* v = std::getenv("CRMPST_COLOR");
  return !(v && std::string(v) == "0");
}

std::string paint(const std::string& text, const char* code) {
  if (!color_enabled()) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string colored_status(Verdict::Status s) {
  std::string text = to_string(s);
  switch (s) {
    case Verdict::Status::Holds: return paint(text, "32");
    case Verdict::Status::Violated: return paint(text, "31");
    case Verdict::Status::Inconclusive: return paint(text, "33");
  }
  return text;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << to_string(d) << "\n";
}

std::optional<ProtocolDecl> load_protocol(const std::string& path, int& exit_code) {
  auto source = read_file(path);
  if (!source) {
    std::cerr << "cannot read " << path << "\n";
    exit_code = 2;
    return std::nullopt;
  }
  auto parsed = parse_protocol(*source);
  print_diagnostics(parsed.diagnostics);
  if (!parsed.ok()) {
    exit_code = 1;
    return std::nullopt;
  }
  return std::move(*parsed.value);
}

int cmd_check(const std::string& path) {
  int exit_code = 0;
  auto decl = load_protocol(path, exit_code);
  if (!decl) return exit_code;
  try {
    for (const auto& [role, type] : project_all(*decl))
      std::cout << role.name << " : " << render_local(type) << "\n";
  } catch (const ProjectionError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_verify(const std::string& path, ExplorationBounds bounds, bool json, unsigned threads) {
  int exit_code = 0;
  auto decl = load_protocol(path, exit_code);
  if (!decl) return exit_code;

  std::map<Role, LocalPtr> projections;
  try {
    projections = project_all(*decl);
  } catch (const ProjectionError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  RoleSet reliable = decl->reliable_set();
  AnnotatedGlobal ann{{}, decl->body};
  Configuration c0 = derive_canonical_config(ann, reliable, decl->role_set());

  std::map<std::string, Verdict> checks;
  if (threads > 1) {
    auto safety = std::async(std::launch::async, check_safety, c0, reliable, bounds);
    auto df = std::async(std::launch::async, check_deadlock_freedom, c0, reliable, bounds);
    auto live = std::async(std::launch::async, check_liveness, c0, reliable, bounds);
    auto corr = std::async(std::launch::async, check_correspondence, ann, c0, reliable, bounds);
    checks["safety"] = safety.get();
    checks["deadlock_freedom"] = df.get();
    checks["liveness"] = live.get();
    checks["correspondence"] = corr.get();
  } else {
    checks["safety"] = check_safety(c0, reliable, bounds);
    checks["deadlock_freedom"] = check_deadlock_freedom(c0, reliable, bounds);
    checks["liveness"] = check_liveness(c0, reliable, bounds);
    checks["correspondence"] = check_correspondence(ann, c0, reliable, bounds);
  }

  if (json) {
    std::cout << verify_report_json(*decl, projections, checks, bounds);
  } else {
    for (const auto& [name, verdict] : checks) {
      std::cout << name << ": " << colored_status(verdict.status);
      if (!verdict.reason.empty()) std::cout << " (" << verdict.reason << ")";
      std::cout << "\n";
      if (verdict.status == Verdict::Status::Violated) {
        for (const auto& label : verdict.witness) std::cout << "  " << to_string(label) << "\n";
      }
    }
  }

  bool violated = false, inconclusive = false;
  for (const auto& [name, verdict] : checks) {
    violated = violated || verdict.status == Verdict::Status::Violated;
    inconclusive = inconclusive || verdict.status == Verdict::Status::Inconclusive;
  }
  return violated ? 1 : inconclusive ? 3 : 0;
}

int cmd_simulate(const std::string& path, bool global_mode, std::size_t depth) {
  int exit_code = 0;
  auto decl = load_protocol(path, exit_code);
  if (!decl) return exit_code;
  RoleSet reliable = decl->reliable_set();

  if (global_mode) {
    std::vector<AnnotatedGlobal> states{{{}, decl->body}};
    std::map<std::string, std::size_t> index{{canonical_key(decl->body), 0}};
    std::vector<std::pair<std::size_t, std::size_t>> frontier{{0, 0}};  // (state, depth)
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      auto [s, d] = frontier[i];
      if (d >= depth) continue;
      AnnotatedGlobal st = states[s];
      for (const auto& step : global_transitions(st, reliable)) {
        std::string key = canonical_key(step.next.g);
        for (const auto& r : step.next.crashed) key += "/" + r.name;
        auto [it, fresh] = index.emplace(key, states.size());
        if (fresh) {
          states.push_back(step.next);
          frontier.emplace_back(it->second, d + 1);
        }
        std::cout << "#" << s << " --" << to_string(step.label) << "--> #" << it->second << "\n";
      }
    }
    std::cout << states.size() << " states\n";
    return 0;
  }

  AnnotatedGlobal ann{{}, decl->body};
  Configuration c0 = derive_canonical_config(ann, reliable, decl->role_set());
  ExplorationBounds bounds;
  bounds.state_bound = 100000;
  TransitionGraph g = explore(c0, reliable, bounds);
  std::size_t shown = 0;
  for (const auto& e : g.edges) {
    if (g.path_to(e.from).size() >= depth) continue;
    std::cout << "#" << e.from << " --" << to_string(e.label) << "--> #" << e.to << "\n";
    ++shown;
  }
  std::cout << g.states.size() << " states, " << g.edges.size() << " edges"
            << (g.truncated ? " (truncated)" : "") << "\n";
  return 0;
}

std::optional<Session> load_session(const ProtocolDecl& decl, const std::string& procfile,
                                    int& exit_code) {
  auto source = read_file(procfile);
  if (!source) {
    std::cerr << "cannot read " << procfile << "\n";
    exit_code = 2;
    return std::nullopt;
  }
  auto parsed = parse_process_script(*source);
  print_diagnostics(parsed.diagnostics);
  if (!parsed.ok()) {
    exit_code = 1;
    return std::nullopt;
  }
  for (const auto& [role, proc] : parsed.value->processes) {
    if (!decl.role_set().count(role)) {
      std::cerr << "process script defines unknown role " << role.name << "\n";
      exit_code = 1;
      return std::nullopt;
    }
  }
  Session m = parsed.value->to_session();
  for (const auto& [role, rel] : decl.roles)
    if (!m.entries.count(role)) m.entries[role] = {p_inact(), false, {}};
  return m;
}

int cmd_typecheck(const std::string& protocol, const std::string& procfile) {
  int exit_code = 0;
  auto decl = load_protocol(protocol, exit_code);
  if (!decl) return exit_code;
  auto session = load_session(*decl, procfile, exit_code);
  if (!session) return exit_code;

  auto result = typecheck_session(*session, {{}, decl->body}, decl->reliable_set());
  print_diagnostics(result.diagnostics);
  std::cout << (result.ok ? "well-typed" : "ill-typed") << "\n";
  return result.ok ? 0 : 1;
}

int cmd_run(const std::string& protocol, const std::string& procfile,
            std::optional<std::uint64_t> seed, const std::vector<std::string>& crashes,
            double crash_prob, int max_crashes, int max_steps, const std::string& trace_path,
            bool json) {
  int exit_code = 0;
  auto decl = load_protocol(protocol, exit_code);
  if (!decl) return exit_code;
  auto session = load_session(*decl, procfile, exit_code);
  if (!session) return exit_code;

  CrashSchedule schedule = CrashSchedule::none();
  if (!crashes.empty()) {
    std::vector<std::pair<int, Role>> exact;
    for (const auto& spec : crashes) {
      auto at = spec.find('@');
      if (at == std::string::npos) {
        std::cerr << "--crash expects role@step, got '" << spec << "'\n";
        return 2;
      }
      Role role{spec.substr(0, at)};
      if (decl->reliable_set().count(role)) {
        std::cerr << "cannot crash reliable role " << role.name << "\n";
        return 2;
      }
      exact.emplace_back(std::stoi(spec.substr(at + 1)), role);
    }
    schedule = CrashSchedule::exact(std::move(exact));
  } else if (seed) {
    schedule = CrashSchedule::seeded(*seed, crash_prob, max_crashes);
  }

  RunResult result = run_session(*session, decl->reliable_set(), schedule, max_steps);

  std::ostringstream human;
  for (const auto& entry : result.trace)
    human << entry.step << "  " << to_string(entry.label) << "  " << entry.digest << "\n";
  if (json) {
    std::cout << trace_json(result.trace, result.quiescent, result.max_steps_exceeded);
  } else {
    std::cout << human.str();
    std::cout << (result.quiescent ? "quiescent" : "max steps exceeded") << " after "
              << result.trace.size() << " steps\n";
  }
  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << trace_path << "\n";
      return 2;
    }
    out << (json ? trace_json(result.trace, result.quiescent, result.max_steps_exceeded)
                 : human.str());
  }

  for (const auto& d : stuck_receives(result.final_state)) std::cerr << to_string(d) << "\n";

  bool conforming = result.quiescent;
  for (const auto& [role, entry] : result.final_state.entries) {
    bool ok_inact = entry.process->kind == Process::Kind::Inact && !entry.queue_unavailable &&
                    entry.queue.empty();
    bool ok_crashed = entry.process->kind == Process::Kind::Crashed && entry.queue_unavailable;
    conforming = conforming && (ok_inact || ok_crashed);
  }
  return conforming ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crash-aware multiparty protocol checker and simulator"};
  app.require_subcommand(1);

  std::string path, procfile, trace_path;
  bool json = false, global_mode = false, config_mode = false;
  ExplorationBounds bounds;
  unsigned threads = 1;
  std::size_t depth = 6;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> crashes;
  double crash_prob = 0.05;
  int max_crashes = 1;
  int max_steps = 10000;

  auto* check = app.add_subcommand("check", "parse, validate and project a protocol");
  check->add_option("path", path, "protocol file (.crmpst)")->required();

  auto* verify = app.add_subcommand("verify", "run safety, deadlock-freedom, liveness and "
                                              "correspondence checks");
  verify->add_option("path", path, "protocol file (.crmpst)")->required();
  verify->add_option("--bound", bounds.queue_bound, "max messages per channel");
  verify->add_option("--states", bounds.state_bound, "max explored states");
  verify->add_option("--cycle-bound", bounds.cycle_len_bound, "max liveness lasso length");
  verify->add_flag("--json", json, "machine-readable report");
  verify->add_option("--threads", threads, "run checks concurrently");

  auto* simulate = app.add_subcommand("simulate", "enumerate transitions of a protocol");
  simulate->add_option("path", path, "protocol file (.crmpst)")->required();
  simulate->add_flag("--global", global_mode, "explore the global type semantics");
  simulate->add_flag("--config", config_mode, "explore the configuration semantics (default)");
  simulate->add_option("--depth", depth, "exploration depth");

  auto* typecheck = app.add_subcommand("typecheck", "check processes against a protocol");
  typecheck->add_option("protocol", path, "protocol file (.crmpst)")->required();
  typecheck->add_option("procfile", procfile, "process script (.crproc)")->required();

  auto* run = app.add_subcommand("run", "interpret processes with crash injection");
  run->add_option("protocol", path, "protocol file (.crmpst)")->required();
  run->add_option("procfile", procfile, "process script (.crproc)")->required();
  run->add_option("--seed", seed, "seeded random crash schedule");
  run->add_option("--crash", crashes, "scripted crash, role@step (repeatable)");
  run->add_option("--crash-prob", crash_prob, "per-step crash probability with --seed");
  run->add_option("--max-crashes", max_crashes, "crash budget with --seed");
  run->add_option("--max-steps", max_steps, "step budget");
  run->add_option("--trace", trace_path, "write the trace to a file");
  run->add_flag("--json", json, "machine-readable trace");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(path);
    if (verify->parsed()) return cmd_verify(path, bounds, json, threads);
    if (simulate->parsed()) return cmd_simulate(path, global_mode && !config_mode, depth);
    if (typecheck->parsed()) return cmd_typecheck(path, procfile);
    if (run->parsed())
      return cmd_run(path, procfile, seed, crashes, crash_prob, max_crashes, max_steps,
                     trace_path, json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
