#include "crmpst/types.hpp"

#include <cassert>
#include <sstream>
#include <stdexcept>

namespace crmpst {

std::string to_string(Sort s) {
  switch (s) {
    case Sort::Unit: return "Unit";
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::Str: return "Str";
  }
  return "?";
}

std::optional<Sort> sort_from_string(const std::string& s) {
  if (s == "Unit") return Sort::Unit;
  if (s == "Int") return Sort::Int;
  if (s == "Bool") return Sort::Bool;
  if (s == "Str") return Sort::Str;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Factories

GlobalPtr g_end() {
  static const GlobalPtr end = std::make_shared<GlobalType>();
  return end;
}

GlobalPtr g_recvar(std::string var, Span span) {
  auto n = std::make_shared<GlobalType>();
  n->kind = GlobalType::Kind::RecVar;
  n->var = std::move(var);
  n->span = span;
  return n;
}

GlobalPtr g_rec(std::string var, GlobalPtr body, Span span) {
  assert(body);
  auto n = std::make_shared<GlobalType>();
  n->kind = GlobalType::Kind::Rec;
  n->var = std::move(var);
  n->body = std::move(body);
  n->span = span;
  return n;
}

static void check_comm_branches(const Role& sender, const Role& receiver,
                                const std::vector<GlobalBranch>& branches) {
  assert(!branches.empty());
  assert(sender != receiver);
  (void)sender;
  (void)receiver;
  (void)branches;
}

GlobalPtr g_comm(Role sender, Role receiver, std::vector<GlobalBranch> branches, Span span) {
  check_comm_branches(sender, receiver, branches);
  auto n = std::make_shared<GlobalType>();
  n->kind = GlobalType::Kind::Comm;
  n->sender = std::move(sender);
  n->receiver = std::move(receiver);
  n->branches = std::move(branches);
  n->span = span;
  return n;
}

GlobalPtr g_comm_runtime(Role sender, bool sender_crashed, Role receiver, bool receiver_crashed,
                         std::vector<GlobalBranch> branches, std::optional<std::size_t> committed) {
  check_comm_branches(sender, receiver, branches);
  assert(!(sender_crashed && receiver_crashed));
  assert(!sender_crashed || committed.has_value());
  assert(!committed || *committed < branches.size());
  assert(!committed || !receiver_crashed);
  auto n = std::make_shared<GlobalType>();
  n->kind = GlobalType::Kind::Comm;
  n->sender = std::move(sender);
  n->receiver = std::move(receiver);
  n->sender_crashed = sender_crashed;
  n->receiver_crashed = receiver_crashed;
  n->branches = std::move(branches);
  n->committed = committed;
  return n;
}

LocalPtr l_end() {
  static const LocalPtr end = std::make_shared<LocalType>();
  return end;
}

LocalPtr l_stop() {
  static const LocalPtr stop = [] {
    auto n = std::make_shared<LocalType>();
    n->kind = LocalType::Kind::Stop;
    return n;
  }();
  return stop;
}

LocalPtr l_recvar(std::string var) {
  auto n = std::make_shared<LocalType>();
  n->kind = LocalType::Kind::RecVar;
  n->var = std::move(var);
  return n;
}

LocalPtr l_rec(std::string var, LocalPtr body) {
  assert(body);
  auto n = std::make_shared<LocalType>();
  n->kind = LocalType::Kind::Rec;
  n->var = std::move(var);
  n->body = std::move(body);
  return n;
}

LocalPtr l_select(Role peer, std::vector<LocalBranch> branches) {
  assert(!branches.empty());
  for (const auto& b : branches) {
    assert(!b.label.is_crash());
    (void)b;
  }
  auto n = std::make_shared<LocalType>();
  n->kind = LocalType::Kind::Select;
  n->peer = std::move(peer);
  n->branches = std::move(branches);
  return n;
}

LocalPtr l_branch(Role peer, std::vector<LocalBranch> branches) {
  assert(!branches.empty());
  assert(!(branches.size() == 1 && branches[0].label.is_crash()));
  auto n = std::make_shared<LocalType>();
  n->kind = LocalType::Kind::Branch;
  n->peer = std::move(peer);
  n->branches = std::move(branches);
  return n;
}

// ---------------------------------------------------------------------------
// Equality

bool equal(const GlobalPtr& a, const GlobalPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case GlobalType::Kind::End:
      return true;
    case GlobalType::Kind::RecVar:
      return a->var == b->var;
    case GlobalType::Kind::Rec:
      return a->var == b->var && equal(a->body, b->body);
    case GlobalType::Kind::Comm: {
      if (a->sender != b->sender || a->receiver != b->receiver ||
          a->sender_crashed != b->sender_crashed || a->receiver_crashed != b->receiver_crashed ||
          a->committed != b->committed || a->branches.size() != b->branches.size())
        return false;
      for (std::size_t i = 0; i < a->branches.size(); ++i) {
        const auto& x = a->branches[i];
        const auto& y = b->branches[i];
        if (x.label != y.label || x.sort != y.sort || !equal(x.cont, y.cont)) return false;
      }
      return true;
    }
  }
  return false;
}

bool equal(const LocalPtr& a, const LocalPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case LocalType::Kind::End:
    case LocalType::Kind::Stop:
      return true;
    case LocalType::Kind::RecVar:
      return a->var == b->var;
    case LocalType::Kind::Rec:
      return a->var == b->var && equal(a->body, b->body);
    case LocalType::Kind::Select:
    case LocalType::Kind::Branch: {
      if (a->peer != b->peer || a->branches.size() != b->branches.size()) return false;
      for (std::size_t i = 0; i < a->branches.size(); ++i) {
        const auto& x = a->branches[i];
        const auto& y = b->branches[i];
        if (x.label != y.label || x.sort != y.sort || !equal(x.cont, y.cont)) return false;
      }
      return true;
    }
  }
  return false;
}

bool equal_up_to_branch_order(const LocalPtr& a, const LocalPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case LocalType::Kind::End:
    case LocalType::Kind::Stop:
      return true;
    case LocalType::Kind::RecVar:
      return a->var == b->var;
    case LocalType::Kind::Rec:
      return a->var == b->var && equal_up_to_branch_order(a->body, b->body);
    case LocalType::Kind::Select:
    case LocalType::Kind::Branch: {
      if (a->peer != b->peer || a->branches.size() != b->branches.size()) return false;
      for (const auto& x : a->branches) {
        bool found = false;
        for (const auto& y : b->branches) {
          if (x.label == y.label) {
            if (x.sort != y.sort || !equal_up_to_branch_order(x.cont, y.cont)) return false;
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Canonical keys

static void key_into(const GlobalPtr& t, std::string& out) {
  switch (t->kind) {
    case GlobalType::Kind::End:
      out += 'E';
      return;
    case GlobalType::Kind::RecVar:
      out += 'V';
      out += t->var;
      out += ';';
      return;
    case GlobalType::Kind::Rec:
      out += 'R';
      out += t->var;
      out += '(';
      key_into(t->body, out);
      out += ')';
      return;
    case GlobalType::Kind::Comm:
      out += 'C';
      out += t->sender.name;
      if (t->sender_crashed) out += '#';
      out += '>';
      out += t->receiver.name;
      if (t->receiver_crashed) out += '#';
      if (t->committed) {
        out += ':';
        out += std::to_string(*t->committed);
      }
      out += '{';
      for (const auto& b : t->branches) {
        out += b.label.name;
        out += ':';
        out += std::to_string(static_cast<int>(b.sort));
        out += '(';
        key_into(b.cont, out);
        out += ')';
      }
      out += '}';
      return;
  }
}

static void key_into(const LocalPtr& t, std::string& out) {
  switch (t->kind) {
    case LocalType::Kind::End:
      out += 'e';
      return;
    case LocalType::Kind::Stop:
      out += 's';
      return;
    case LocalType::Kind::RecVar:
      out += 'v';
      out += t->var;
      out += ';';
      return;
    case LocalType::Kind::Rec:
      out += 'r';
      out += t->var;
      out += '(';
      key_into(t->body, out);
      out += ')';
      return;
    case LocalType::Kind::Select:
    case LocalType::Kind::Branch:
      out += t->kind == LocalType::Kind::Select ? '+' : '&';
      out += t->peer.name;
      out += '{';
      for (const auto& b : t->branches) {
        out += b.label.name;
        out += ':';
        out += std::to_string(static_cast<int>(b.sort));
        out += '(';
        key_into(b.cont, out);
        out += ')';
      }
      out += '}';
      return;
  }
}

std::string canonical_key(const GlobalPtr& t) {
  std::string out;
  key_into(t, out);
  return out;
}

std::string canonical_key(const LocalPtr& t) {
  std::string out;
  key_into(t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Free variables, substitution, unfolding

static void free_vars_into(const GlobalPtr& t, std::set<std::string>& bound,
                           std::set<std::string>& out) {
  switch (t->kind) {
    case GlobalType::Kind::End:
      return;
    case GlobalType::Kind::RecVar:
      if (!bound.count(t->var)) out.insert(t->var);
      return;
    case GlobalType::Kind::Rec: {
      bool fresh = bound.insert(t->var).second;
      free_vars_into(t->body, bound, out);
      if (fresh) bound.erase(t->var);
      return;
    }
    case GlobalType::Kind::Comm:
      for (const auto& b : t->branches) free_vars_into(b.cont, bound, out);
      return;
  }
}

static void free_vars_into(const LocalPtr& t, std::set<std::string>& bound,
                           std::set<std::string>& out) {
  switch (t->kind) {
    case LocalType::Kind::End:
    case LocalType::Kind::Stop:
      return;
    case LocalType::Kind::RecVar:
      if (!bound.count(t->var)) out.insert(t->var);
      return;
    case LocalType::Kind::Rec: {
      bool fresh = bound.insert(t->var).second;
      free_vars_into(t->body, bound, out);
      if (fresh) bound.erase(t->var);
      return;
    }
    case LocalType::Kind::Select:
    case LocalType::Kind::Branch:
      for (const auto& b : t->branches) free_vars_into(b.cont, bound, out);
      return;
  }
}

std::set<std::string> free_rec_vars(const GlobalPtr& t) {
  std::set<std::string> bound, out;
  free_vars_into(t, bound, out);
  return out;
}

std::set<std::string> free_rec_vars(const LocalPtr& t) {
  std::set<std::string> bound, out;
  free_vars_into(t, bound, out);
  return out;
}

GlobalPtr substitute(const GlobalPtr& t, const std::string& var, const GlobalPtr& replacement) {
  switch (t->kind) {
    case GlobalType::Kind::End:
      return t;
    case GlobalType::Kind::RecVar:
      return t->var == var ? replacement : t;
    case GlobalType::Kind::Rec: {
      if (t->var == var) return t;  // shadowed
      GlobalPtr body = substitute(t->body, var, replacement);
      if (body.get() == t->body.get()) return t;
      return g_rec(t->var, std::move(body), t->span);
    }
    case GlobalType::Kind::Comm: {
      std::vector<GlobalBranch> branches;
      bool changed = false;
      branches.reserve(t->branches.size());
      for (const auto& b : t->branches) {
        GlobalPtr cont = substitute(b.cont, var, replacement);
        changed = changed || cont.get() != b.cont.get();
        branches.push_back({b.label, b.sort, std::move(cont)});
      }
      if (!changed) return t;
      return g_comm_runtime(t->sender, t->sender_crashed, t->receiver, t->receiver_crashed,
                            std::move(branches), t->committed);
    }
  }
  return t;
}

LocalPtr substitute(const LocalPtr& t, const std::string& var, const LocalPtr& replacement) {
  switch (t->kind) {
    case LocalType::Kind::End:
    case LocalType::Kind::Stop:
      return t;
    case LocalType::Kind::RecVar:
      return t->var == var ? replacement : t;
    case LocalType::Kind::Rec: {
      if (t->var == var) return t;
      LocalPtr body = substitute(t->body, var, replacement);
      if (body.get() == t->body.get()) return t;
      return l_rec(t->var, std::move(body));
    }
    case LocalType::Kind::Select:
    case LocalType::Kind::Branch: {
      std::vector<LocalBranch> branches;
      bool changed = false;
      branches.reserve(t->branches.size());
      for (const auto& b : t->branches) {
        LocalPtr cont = substitute(b.cont, var, replacement);
        changed = changed || cont.get() != b.cont.get();
        branches.push_back({b.label, b.sort, std::move(cont)});
      }
      if (!changed) return t;
      auto n = std::make_shared<LocalType>();
      n->kind = t->kind;
      n->peer = t->peer;
      n->branches = std::move(branches);
      return n;
    }
  }
  return t;
}

GlobalPtr unfold_once(const GlobalPtr& t) {
  if (t->kind != GlobalType::Kind::Rec) return t;
  return substitute(t->body, t->var, t);
}

LocalPtr unfold_once(const LocalPtr& t) {
  if (t->kind != LocalType::Kind::Rec) return t;
  return substitute(t->body, t->var, t);
}

GlobalPtr unfold_head(const GlobalPtr& t) {
  GlobalPtr g = t;
  int guard = 0;
  while (g->kind == GlobalType::Kind::Rec) {
    g = unfold_once(g);
    if (++guard > 1000) throw std::runtime_error("non-contractive recursive global type");
  }
  return g;
}

LocalPtr unfold_head(const LocalPtr& t) {
  LocalPtr l = t;
  int guard = 0;
  while (l->kind == LocalType::Kind::Rec) {
    l = unfold_once(l);
    if (++guard > 1000) throw std::runtime_error("non-contractive recursive local type");
  }
  return l;
}

// ---------------------------------------------------------------------------
// Contractivity

namespace {

// Variables that have been guarded by a communication prefix no longer
// constrain the subterm.
template <typename Ptr>
bool contractive_rec(const Ptr& t, std::set<std::string> pending);

bool contractive_rec_g(const GlobalPtr& t, std::set<std::string> pending) {
  switch (t->kind) {
    case GlobalType::Kind::End:
      return true;
    case GlobalType::Kind::RecVar:
      return !pending.count(t->var);
    case GlobalType::Kind::Rec: {
      pending.insert(t->var);
      return contractive_rec_g(t->body, std::move(pending));
    }
    case GlobalType::Kind::Comm:
      for (const auto& b : t->branches)
        if (!contractive_rec_g(b.cont, {})) return false;
      return true;
  }
  return true;
}

bool contractive_rec_l(const LocalPtr& t, std::set<std::string> pending) {
  switch (t->kind) {
    case LocalType::Kind::End:
    case LocalType::Kind::Stop:
      return true;
    case LocalType::Kind::RecVar:
      return !pending.count(t->var);
    case LocalType::Kind::Rec: {
      pending.insert(t->var);
      return contractive_rec_l(t->body, std::move(pending));
    }
    case LocalType::Kind::Select:
    case LocalType::Kind::Branch:
      for (const auto& b : t->branches)
        if (!contractive_rec_l(b.cont, {})) return false;
      return true;
  }
  return true;
}

}  // namespace

bool contractive(const GlobalPtr& t) { return contractive_rec_g(t, {}); }
bool contractive(const LocalPtr& t) { return contractive_rec_l(t, {}); }

}  // namespace crmpst
