#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace crmpst {

/// Payload sorts. Closed enumeration; Unit is the default payload.
enum class Sort : std::uint8_t { Unit, Int, Bool, Str };

std::string to_string(Sort s);
std::optional<Sort> sort_from_string(const std::string& s);

/// Source position of a construct (zero when synthesized). Not part of term
/// identity: equality, canonical keys and rendering all ignore it.
struct Span {
  int line = 0;
  int column = 0;
  int length = 0;
};

struct Role {
  std::string name;
  auto operator<=>(const Role&) const = default;
};

inline constexpr const char* kCrashLabel = "crash";

struct Label {
  std::string name;
  bool is_crash() const { return name == kCrashLabel; }
  auto operator<=>(const Label&) const = default;
};

// ---------------------------------------------------------------------------
// Global types

struct GlobalType;
using GlobalPtr = std::shared_ptr<const GlobalType>;

struct GlobalBranch {
  Label label;
  Sort sort = Sort::Unit;
  GlobalPtr cont;
};

/// A node of a global type term. Terms are immutable after construction and
/// may share subtrees freely.
///
/// A Comm with committed == nullopt is a pending transmission p -> q; with
/// committed == j it is a transmission en route p ~> q whose branch j was
/// selected by the sender. Crash flags mark crashed endpoints and occur only
/// in runtime terms: a pending Comm may have a crashed receiver, an en-route
/// Comm a crashed sender, never both.
struct GlobalType {
  enum class Kind { End, RecVar, Rec, Comm };

  Kind kind = Kind::End;
  std::string var;                       // RecVar, Rec
  GlobalPtr body;                        // Rec
  Role sender, receiver;                 // Comm
  bool sender_crashed = false;           // Comm (en-route only)
  bool receiver_crashed = false;         // Comm (pending only)
  std::vector<GlobalBranch> branches;    // Comm
  std::optional<std::size_t> committed;  // Comm: en-route branch index
  Span span;
};

GlobalPtr g_end();
GlobalPtr g_recvar(std::string var, Span span = {});
GlobalPtr g_rec(std::string var, GlobalPtr body, Span span = {});
GlobalPtr g_comm(Role sender, Role receiver, std::vector<GlobalBranch> branches, Span span = {});
GlobalPtr g_comm_runtime(Role sender, bool sender_crashed, Role receiver, bool receiver_crashed,
                         std::vector<GlobalBranch> branches, std::optional<std::size_t> committed);

// ---------------------------------------------------------------------------
// Local types

struct LocalType;
using LocalPtr = std::shared_ptr<const LocalType>;

struct LocalBranch {
  Label label;
  Sort sort = Sort::Unit;
  LocalPtr cont;
};

/// A node of a local type term. Select is an internal choice towards peer,
/// Branch an external choice from peer. Stop is the runtime type of a crashed
/// endpoint. The crash label never occurs in a Select, and a Branch is never
/// a sole crash branch.
struct LocalType {
  enum class Kind { End, Stop, RecVar, Rec, Select, Branch };

  Kind kind = Kind::End;
  std::string var;                    // RecVar, Rec
  LocalPtr body;                      // Rec
  Role peer;                          // Select, Branch
  std::vector<LocalBranch> branches;  // Select, Branch
};

LocalPtr l_end();
LocalPtr l_stop();
LocalPtr l_recvar(std::string var);
LocalPtr l_rec(std::string var, LocalPtr body);
LocalPtr l_select(Role peer, std::vector<LocalBranch> branches);
LocalPtr l_branch(Role peer, std::vector<LocalBranch> branches);

// ---------------------------------------------------------------------------
// Structural operations

bool equal(const GlobalPtr& a, const GlobalPtr& b);
bool equal(const LocalPtr& a, const LocalPtr& b);

/// Equality where Select/Branch branch lists are compared as label-keyed sets.
bool equal_up_to_branch_order(const LocalPtr& a, const LocalPtr& b);

/// Deterministic serialization usable as a hash key; identical for equal terms.
std::string canonical_key(const GlobalPtr& t);
std::string canonical_key(const LocalPtr& t);

/// Capture-avoidance is not needed: binders are never rebound during
/// substitution because recursion variables are unfolded with their own
/// binder's term. Subtrees without free occurrences of var are shared.
GlobalPtr substitute(const GlobalPtr& t, const std::string& var, const GlobalPtr& replacement);
LocalPtr substitute(const LocalPtr& t, const std::string& var, const LocalPtr& replacement);

/// Rec(x, B) becomes B with x replaced by the whole Rec; identity otherwise.
GlobalPtr unfold_once(const GlobalPtr& t);
LocalPtr unfold_once(const LocalPtr& t);

/// Unfold until the head is not a Rec (terminates on contractive terms).
GlobalPtr unfold_head(const GlobalPtr& t);
LocalPtr unfold_head(const LocalPtr& t);

std::set<std::string> free_rec_vars(const GlobalPtr& t);
std::set<std::string> free_rec_vars(const LocalPtr& t);

/// True if every Rec body guards its variable behind at least one Comm /
/// Select / Branch prefix.
bool contractive(const GlobalPtr& t);
bool contractive(const LocalPtr& t);

}  // namespace crmpst
