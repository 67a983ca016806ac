#include "crmpst/calculus.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <random>
#include <sstream>

namespace crmpst {

// ---------------------------------------------------------------------------
// Values and expressions

Value unit_value() { return {Sort::Unit, std::monostate{}}; }
Value int_value(std::int64_t i) { return {Sort::Int, i}; }
Value bool_value(bool b) { return {Sort::Bool, b}; }
Value str_value(std::string s) { return {Sort::Str, std::move(s)}; }

std::string to_string(const Value& v) {
  switch (v.sort) {
    case Sort::Unit: return "()";
    case Sort::Int: return std::to_string(std::get<std::int64_t>(v.v));
    case Sort::Bool: return std::get<bool>(v.v) ? "true" : "false";
    case Sort::Str: return "\"" + std::get<std::string>(v.v) + "\"";
  }
  return "?";
}

ExprPtr e_lit(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Lit;
  e->lit = std::move(v);
  return e;
}

ExprPtr e_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->var = std::move(name);
  return e;
}

ExprPtr e_binary(Expr::Op op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

ExprPtr e_not(ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Not;
  e->operand = std::move(operand);
  return e;
}

std::string to_string(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Lit:
      return to_string(e->lit);
    case Expr::Kind::Var:
      return e->var;
    case Expr::Kind::Binary: {
      const char* op = e->op == Expr::Op::Add    ? " + "
                       : e->op == Expr::Op::Sub  ? " - "
                       : e->op == Expr::Op::Less ? " < "
                                                 : " == ";
      return "(" + to_string(e->lhs) + op + to_string(e->rhs) + ")";
    }
    case Expr::Kind::Not:
      return "not " + to_string(e->operand);
  }
  return "?";
}

Value eval_expr(const ExprPtr& e, const std::map<std::string, Value>& env) {
  switch (e->kind) {
    case Expr::Kind::Lit:
      return e->lit;
    case Expr::Kind::Var: {
      auto it = env.find(e->var);
      if (it == env.end()) throw SortError("unbound variable '" + e->var + "'");
      return it->second;
    }
    case Expr::Kind::Binary: {
      Value l = eval_expr(e->lhs, env);
      Value r = eval_expr(e->rhs, env);
      switch (e->op) {
        case Expr::Op::Add:
        case Expr::Op::Sub: {
          if (l.sort != Sort::Int || r.sort != Sort::Int)
            throw SortError("arithmetic on non-integers");
          auto a = std::get<std::int64_t>(l.v), b = std::get<std::int64_t>(r.v);
          return int_value(e->op == Expr::Op::Add ? a + b : a - b);
        }
        case Expr::Op::Less: {
          if (l.sort != Sort::Int || r.sort != Sort::Int)
            throw SortError("comparison on non-integers");
          return bool_value(std::get<std::int64_t>(l.v) < std::get<std::int64_t>(r.v));
        }
        case Expr::Op::Eq: {
          if (l.sort != r.sort) throw SortError("equality across sorts");
          return bool_value(l == r);
        }
      }
      throw SortError("unknown operator");
    }
    case Expr::Kind::Not: {
      Value v = eval_expr(e->operand, env);
      if (v.sort != Sort::Bool) throw SortError("negation of a non-boolean");
      return bool_value(!std::get<bool>(v.v));
    }
  }
  throw SortError("malformed expression");
}

Sort sort_of_expr(const ExprPtr& e, const std::map<std::string, Sort>& env) {
  switch (e->kind) {
    case Expr::Kind::Lit:
      return e->lit.sort;
    case Expr::Kind::Var: {
      auto it = env.find(e->var);
      if (it == env.end()) throw SortError("unbound variable '" + e->var + "'");
      return it->second;
    }
    case Expr::Kind::Binary: {
      Sort l = sort_of_expr(e->lhs, env);
      Sort r = sort_of_expr(e->rhs, env);
      switch (e->op) {
        case Expr::Op::Add:
        case Expr::Op::Sub:
          if (l != Sort::Int || r != Sort::Int) throw SortError("arithmetic on non-integers");
          return Sort::Int;
        case Expr::Op::Less:
          if (l != Sort::Int || r != Sort::Int) throw SortError("comparison on non-integers");
          return Sort::Bool;
        case Expr::Op::Eq:
          if (l != r) throw SortError("equality across sorts");
          return Sort::Bool;
      }
      throw SortError("unknown operator");
    }
    case Expr::Kind::Not:
      if (sort_of_expr(e->operand, env) != Sort::Bool)
        throw SortError("negation of a non-boolean");
      return Sort::Bool;
  }
  throw SortError("malformed expression");
}

// ---------------------------------------------------------------------------
// Processes

ProcessPtr p_inact() {
  static const ProcessPtr p = std::make_shared<Process>();
  return p;
}

ProcessPtr p_crashed() {
  static const ProcessPtr p = [] {
    auto n = std::make_shared<Process>();
    n->kind = Process::Kind::Crashed;
    return n;
  }();
  return p;
}

ProcessPtr p_send(Role to, Label label, ExprPtr payload, ProcessPtr cont) {
  assert(!label.is_crash());
  auto n = std::make_shared<Process>();
  n->kind = Process::Kind::Send;
  n->peer = std::move(to);
  n->label = std::move(label);
  n->payload = std::move(payload);
  n->cont = std::move(cont);
  return n;
}

ProcessPtr p_recv(Role from, std::vector<ProcBranch> branches) {
  assert(!branches.empty());
  auto n = std::make_shared<Process>();
  n->kind = Process::Kind::Recv;
  n->peer = std::move(from);
  n->branches = std::move(branches);
  return n;
}

ProcessPtr p_if(ExprPtr cond, ProcessPtr then_branch, ProcessPtr else_branch) {
  auto n = std::make_shared<Process>();
  n->kind = Process::Kind::If;
  n->cond = std::move(cond);
  n->then_branch = std::move(then_branch);
  n->else_branch = std::move(else_branch);
  return n;
}

ProcessPtr p_rec(std::string var, ProcessPtr body) {
  auto n = std::make_shared<Process>();
  n->kind = Process::Kind::Rec;
  n->var = std::move(var);
  n->body = std::move(body);
  return n;
}

ProcessPtr p_var(std::string name) {
  auto n = std::make_shared<Process>();
  n->kind = Process::Kind::Var;
  n->var = std::move(name);
  return n;
}

namespace {

ExprPtr substitute_expr(const ExprPtr& e, const std::string& var, const Value& value) {
  switch (e->kind) {
    case Expr::Kind::Lit:
      return e;
    case Expr::Kind::Var:
      return e->var == var ? e_lit(value) : e;
    case Expr::Kind::Binary: {
      ExprPtr l = substitute_expr(e->lhs, var, value);
      ExprPtr r = substitute_expr(e->rhs, var, value);
      if (l.get() == e->lhs.get() && r.get() == e->rhs.get()) return e;
      return e_binary(e->op, std::move(l), std::move(r));
    }
    case Expr::Kind::Not: {
      ExprPtr o = substitute_expr(e->operand, var, value);
      return o.get() == e->operand.get() ? e : e_not(std::move(o));
    }
  }
  return e;
}

ProcessPtr substitute_proc_var(const ProcessPtr& p, const std::string& var,
                               const ProcessPtr& replacement) {
  switch (p->kind) {
    case Process::Kind::Inact:
    case Process::Kind::Crashed:
      return p;
    case Process::Kind::Var:
      return p->var == var ? replacement : p;
    case Process::Kind::Rec: {
      if (p->var == var) return p;
      ProcessPtr body = substitute_proc_var(p->body, var, replacement);
      return body.get() == p->body.get() ? p : p_rec(p->var, std::move(body));
    }
    case Process::Kind::Send: {
      ProcessPtr cont = substitute_proc_var(p->cont, var, replacement);
      return cont.get() == p->cont.get() ? p : p_send(p->peer, p->label, p->payload, cont);
    }
    case Process::Kind::Recv: {
      std::vector<ProcBranch> branches;
      bool changed = false;
      for (const auto& b : p->branches) {
        ProcessPtr cont = substitute_proc_var(b.cont, var, replacement);
        changed = changed || cont.get() != b.cont.get();
        branches.push_back({b.label, b.binder, std::move(cont)});
      }
      return changed ? p_recv(p->peer, std::move(branches)) : p;
    }
    case Process::Kind::If: {
      ProcessPtr t = substitute_proc_var(p->then_branch, var, replacement);
      ProcessPtr e = substitute_proc_var(p->else_branch, var, replacement);
      if (t.get() == p->then_branch.get() && e.get() == p->else_branch.get()) return p;
      return p_if(p->cond, std::move(t), std::move(e));
    }
  }
  return p;
}

}  // namespace

ProcessPtr substitute(const ProcessPtr& p, const std::string& var, const Value& value) {
  switch (p->kind) {
    case Process::Kind::Inact:
    case Process::Kind::Crashed:
    case Process::Kind::Var:
      return p;
    case Process::Kind::Send: {
      ExprPtr payload = substitute_expr(p->payload, var, value);
      ProcessPtr cont = substitute(p->cont, var, value);
      if (payload.get() == p->payload.get() && cont.get() == p->cont.get()) return p;
      return p_send(p->peer, p->label, std::move(payload), std::move(cont));
    }
    case Process::Kind::Recv: {
      std::vector<ProcBranch> branches;
      bool changed = false;
      for (const auto& b : p->branches) {
        if (b.binder && *b.binder == var) {  // shadowed
          branches.push_back(b);
          continue;
        }
        ProcessPtr cont = substitute(b.cont, var, value);
        changed = changed || cont.get() != b.cont.get();
        branches.push_back({b.label, b.binder, std::move(cont)});
      }
      return changed ? p_recv(p->peer, std::move(branches)) : p;
    }
    case Process::Kind::If: {
      ExprPtr cond = substitute_expr(p->cond, var, value);
      ProcessPtr t = substitute(p->then_branch, var, value);
      ProcessPtr e = substitute(p->else_branch, var, value);
      if (cond.get() == p->cond.get() && t.get() == p->then_branch.get() &&
          e.get() == p->else_branch.get())
        return p;
      return p_if(std::move(cond), std::move(t), std::move(e));
    }
    case Process::Kind::Rec: {
      ProcessPtr body = substitute(p->body, var, value);
      return body.get() == p->body.get() ? p : p_rec(p->var, std::move(body));
    }
  }
  return p;
}

std::string render_process(const ProcessPtr& p) {
  switch (p->kind) {
    case Process::Kind::Inact:
      return "end";
    case Process::Kind::Crashed:
      return "crashed";
    case Process::Kind::Send: {
      std::string payload;
      bool unit_literal =
          p->payload->kind == Expr::Kind::Lit && p->payload->lit.sort == Sort::Unit;
      if (!unit_literal) payload = "(" + to_string(p->payload) + ")";
      return "send " + p->peer.name + " " + p->label.name + payload + ". " +
             render_process(p->cont);
    }
    case Process::Kind::Recv: {
      std::string out = "recv " + p->peer.name + " { ";
      for (std::size_t i = 0; i < p->branches.size(); ++i) {
        if (i) out += ", ";
        const auto& b = p->branches[i];
        out += b.label.name;
        if (b.binder) out += "(" + *b.binder + ")";
        out += " -> " + render_process(b.cont);
      }
      return out + " }";
    }
    case Process::Kind::If:
      return "if " + to_string(p->cond) + " then " + render_process(p->then_branch) + " else " +
             render_process(p->else_branch);
    case Process::Kind::Rec:
      return "mu " + p->var + ". " + render_process(p->body);
    case Process::Kind::Var:
      return p->var;
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Sessions

std::string session_digest(const Session& m) {
  std::string repr;
  for (const auto& [role, entry] : m.entries) {
    repr += role.name + "=" + render_process(entry.process);
    repr += entry.queue_unavailable ? "!" : ":";
    for (const auto& msg : entry.queue)
      repr += msg.origin.name + "." + msg.label.name + "(" + to_string(msg.value) + ");";
    repr += "|";
  }
  // FNV-1a
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : repr) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

namespace {

// Conditionals and recursion resolve silently; enumeration only ever sees
// send, receive, inact or crashed processes.
ProcessPtr normalize(ProcessPtr p) {
  int guard = 0;
  for (;;) {
    if (p->kind == Process::Kind::Rec) {
      p = substitute_proc_var(p->body, p->var, p);
    } else if (p->kind == Process::Kind::If) {
      Value v = eval_expr(p->cond, {});
      if (v.sort != Sort::Bool) throw SortError("condition is not a boolean");
      p = std::get<bool>(v.v) ? p->then_branch : p->else_branch;
    } else {
      return p;
    }
    if (++guard > 1000) throw std::runtime_error("unguarded process recursion");
  }
}

}  // namespace

std::vector<SessionStep> session_transitions(const Session& m, const RoleSet& reliable,
                                             bool allow_crash) {
  std::vector<SessionStep> out;

  for (const auto& [role, entry] : m.entries) {
    ProcessPtr p = normalize(entry.process);

    if (p->kind == Process::Kind::Send) {
      Value v = eval_expr(p->payload, {});
      Session next = m;
      next.entries[role].process = normalize(p->cont);
      auto peer = next.entries.find(p->peer);
      if (peer != next.entries.end() && !peer->second.queue_unavailable)
        peer->second.queue.push_back({role, p->label, v});
      out.push_back({TransitionLabel::send(role, p->peer, p->label, v.sort), std::move(next)});
      continue;
    }

    if (p->kind == Process::Kind::Recv) {
      // First message from this origin; messages from other origins commute
      // past it.
      const SessionMsg* head = nullptr;
      std::size_t head_index = 0;
      for (std::size_t i = 0; i < entry.queue.size(); ++i) {
        if (entry.queue[i].origin == p->peer) {
          head = &entry.queue[i];
          head_index = i;
          break;
        }
      }
      if (head) {
        for (const auto& b : p->branches) {
          if (b.label.is_crash() || b.label != head->label) continue;
          Session next = m;
          next.entries[role].queue.erase(next.entries[role].queue.begin() +
                                         static_cast<std::ptrdiff_t>(head_index));
          ProcessPtr cont = b.binder ? substitute(b.cont, *b.binder, head->value) : b.cont;
          next.entries[role].process = normalize(cont);
          out.push_back({TransitionLabel::recv(role, p->peer, head->label, head->value.sort),
                         std::move(next)});
          break;
        }
      } else {
        auto peer = m.entries.find(p->peer);
        bool peer_crashed =
            peer != m.entries.end() && peer->second.process->kind == Process::Kind::Crashed;
        if (peer_crashed) {
          for (const auto& b : p->branches) {
            if (!b.label.is_crash()) continue;
            Session next = m;
            next.entries[role].process = normalize(b.cont);
            out.push_back({TransitionLabel::crash_detect(role, p->peer), std::move(next)});
            break;
          }
        }
      }
      continue;
    }
  }

  if (allow_crash) {
    for (const auto& [role, entry] : m.entries) {
      if (reliable.count(role)) continue;
      if (entry.process->kind == Process::Kind::Inact ||
          entry.process->kind == Process::Kind::Crashed)
        continue;
      Session next = m;
      next.entries[role].process = p_crashed();
      next.entries[role].queue_unavailable = true;
      next.entries[role].queue.clear();
      out.push_back({TransitionLabel::crash(role), std::move(next)});
    }
  }
  return out;
}

RunResult run_session(const Session& m0, const RoleSet& reliable, const CrashSchedule& schedule,
                      int max_steps) {
  RunResult result;
  Session m = m0;
  for (auto& [role, entry] : m.entries) entry.process = normalize(entry.process);

  std::mt19937_64 rng;
  double crash_probability = 0.0;
  int crashes_left = 0;
  const CrashSchedule::Exact* exact = std::get_if<CrashSchedule::Exact>(&schedule.plan);
  if (const auto* seeded = std::get_if<CrashSchedule::Seeded>(&schedule.plan)) {
    rng.seed(seeded->seed);
    crash_probability = seeded->crash_probability;
    crashes_left = seeded->max_crashes;
  }

  auto eligible_roles = [&]() {
    std::vector<Role> out;
    for (const auto& [role, entry] : m.entries) {
      if (reliable.count(role)) continue;
      if (entry.process->kind == Process::Kind::Inact ||
          entry.process->kind == Process::Kind::Crashed)
        continue;
      out.push_back(role);
    }
    return out;
  };
  auto apply_crash = [&](const Role& role, int step) {
    m.entries[role].process = p_crashed();
    m.entries[role].queue_unavailable = true;
    m.entries[role].queue.clear();
    result.trace.push_back({step, TransitionLabel::crash(role), session_digest(m)});
  };

  for (int step = 0; step < max_steps; ++step) {
    if (exact) {
      for (const auto& [at, role] : exact->crashes) {
        if (at != step) continue;
        auto it = m.entries.find(role);
        bool ok = it != m.entries.end() && !reliable.count(role) &&
                  it->second.process->kind != Process::Kind::Inact &&
                  it->second.process->kind != Process::Kind::Crashed;
        if (ok) apply_crash(role, step);
      }
    } else if (crashes_left > 0 && crash_probability > 0.0) {
      // Engine output is consumed directly so runs replay across platforms.
      double draw = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (draw < crash_probability) {
        auto roles = eligible_roles();
        if (!roles.empty()) {
          const Role& role = roles[rng() % roles.size()];
          apply_crash(role, step);
          --crashes_left;
        }
      }
    }

    auto steps = session_transitions(m, reliable, /*allow_crash=*/false);
    if (steps.empty()) {
      result.quiescent = true;
      break;
    }
    const SessionStep* least = &steps.front();
    for (const auto& s : steps)
      if (s.label < least->label) least = &s;
    m = least->next;
    result.trace.push_back({step, least->label, session_digest(m)});
  }
  if (!result.quiescent) {
    auto steps = session_transitions(m, reliable, /*allow_crash=*/false);
    if (steps.empty())
      result.quiescent = true;
    else
      result.max_steps_exceeded = true;
  }
  result.final_state = std::move(m);
  return result;
}

}  // namespace crmpst
