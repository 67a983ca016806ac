#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crmpst/diagnostics.hpp"
#include "crmpst/labels.hpp"
#include "crmpst/types.hpp"

namespace crmpst {

// ---------------------------------------------------------------------------
// Expressions and values

struct Value {
  Sort sort = Sort::Unit;
  std::variant<std::monostate, std::int64_t, bool, std::string> v;

  bool operator==(const Value&) const = default;
};

Value unit_value();
Value int_value(std::int64_t i);
Value bool_value(bool b);
Value str_value(std::string s);
std::string to_string(const Value& v);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Lit, Var, Binary, Not };
  enum class Op { Add, Sub, Less, Eq };

  Kind kind = Kind::Lit;
  Value lit;               // Lit
  std::string var;         // Var
  Op op = Op::Add;         // Binary
  ExprPtr lhs, rhs;        // Binary
  ExprPtr operand;         // Not
};

ExprPtr e_lit(Value v);
ExprPtr e_var(std::string name);
ExprPtr e_binary(Expr::Op op, ExprPtr lhs, ExprPtr rhs);
ExprPtr e_not(ExprPtr operand);
std::string to_string(const ExprPtr& e);

struct SortError : std::runtime_error {
  explicit SortError(const std::string& what) : std::runtime_error(what) {}
};

/// Big-step evaluation; throws SortError on operator/operand mismatch or an
/// unbound variable.
Value eval_expr(const ExprPtr& e, const std::map<std::string, Value>& env);

/// Static sort of e under variable sorts; throws SortError.
Sort sort_of_expr(const ExprPtr& e, const std::map<std::string, Sort>& env);

// ---------------------------------------------------------------------------
// Processes

struct Process;
using ProcessPtr = std::shared_ptr<const Process>;

struct ProcBranch {
  Label label;
  std::optional<std::string> binder;  // absent on crash branches
  ProcessPtr cont;
};

struct Process {
  enum class Kind { Inact, Crashed, Send, Recv, If, Rec, Var };

  Kind kind = Kind::Inact;
  Role peer;                          // Send, Recv
  Label label;                        // Send
  ExprPtr payload;                    // Send
  ProcessPtr cont;                    // Send
  std::vector<ProcBranch> branches;   // Recv
  ExprPtr cond;                       // If
  ProcessPtr then_branch;             // If
  ProcessPtr else_branch;             // If
  std::string var;                    // Rec, Var
  ProcessPtr body;                    // Rec
};

ProcessPtr p_inact();
ProcessPtr p_crashed();
ProcessPtr p_send(Role to, Label label, ExprPtr payload, ProcessPtr cont);
ProcessPtr p_recv(Role from, std::vector<ProcBranch> branches);
ProcessPtr p_if(ExprPtr cond, ProcessPtr then_branch, ProcessPtr else_branch);
ProcessPtr p_rec(std::string var, ProcessPtr body);
ProcessPtr p_var(std::string name);

ProcessPtr substitute(const ProcessPtr& p, const std::string& var, const Value& value);
std::string render_process(const ProcessPtr& p);

// ---------------------------------------------------------------------------
// Sessions

struct SessionMsg {
  Role origin;
  Label label;
  Value value;
};

struct SessionEntry {
  ProcessPtr process;
  bool queue_unavailable = false;
  std::vector<SessionMsg> queue;
};

struct Session {
  std::map<Role, SessionEntry> entries;
};

std::string session_digest(const Session& m);

// ---------------------------------------------------------------------------
// Crash scheduling

/// Resolves the nondeterminism of spontaneous crashes for reproducible runs.
struct CrashSchedule {
  struct Seeded {
    std::uint64_t seed = 0;
    double crash_probability = 0.0;
    int max_crashes = 0;
  };
  struct Exact {
    std::vector<std::pair<int, Role>> crashes;  // (step index, role)
  };

  std::variant<Seeded, Exact> plan = Exact{};

  static CrashSchedule none() { return CrashSchedule{Exact{}}; }
  static CrashSchedule seeded(std::uint64_t seed, double probability, int max_crashes) {
    return CrashSchedule{Seeded{seed, probability, max_crashes}};
  }
  static CrashSchedule exact(std::vector<std::pair<int, Role>> crashes) {
    return CrashSchedule{Exact{std::move(crashes)}};
  }
};

// ---------------------------------------------------------------------------
// Session reduction

struct SessionStep {
  TransitionLabel label;
  Session next;
};

/// All reductions enabled in m. Conditionals and recursion unfold silently
/// while matching; crash steps are produced only when allow_crash is set and
/// then for every unreliable role whose process is still active.
std::vector<SessionStep> session_transitions(const Session& m, const RoleSet& reliable,
                                             bool allow_crash);

struct TraceEntry {
  int step = 0;
  TransitionLabel label;
  std::string digest;
};

struct RunResult {
  std::vector<TraceEntry> trace;
  Session final_state;
  bool quiescent = false;
  bool max_steps_exceeded = false;
};

/// Deterministic interpreter: scheduled crashes fire first at their step,
/// then the least enabled non-crash transition (by label order). Stops at
/// quiescence or after max_steps.
RunResult run_session(const Session& m0, const RoleSet& reliable, const CrashSchedule& schedule,
                      int max_steps);

// ---------------------------------------------------------------------------
// Typing

struct TypeEnv {
  std::map<std::string, Sort> vars;
  std::map<std::string, LocalPtr> proc_vars;
};

struct TypecheckResult {
  bool ok = true;
  std::vector<Diagnostic> diagnostics;
};

/// Subtyping-directed algorithmic check of p against t. Receive sums may
/// cover more labels than the type offers only when strict is false.
TypecheckResult typecheck_process(const TypeEnv& env, const ProcessPtr& p, const LocalPtr& t,
                                  bool strict = true);

/// Per-origin queue contents (label/sort sequences); nullopt = unavailable.
using QueueType = std::optional<std::map<Role, std::vector<std::pair<Label, Sort>>>>;

TypecheckResult typecheck_queue(const SessionEntry& entry, const QueueType& expected);

}  // namespace crmpst
