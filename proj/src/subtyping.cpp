#include "crmpst/subtyping.hpp"

#include <set>
#include <string>

namespace crmpst {

namespace {

// A closed contractive type has finitely many distinct unfoldings, so keying
// the visited set on canonical serializations terminates; a revisited pair is
// assumed related (greatest fixpoint).
struct SubtypeCheck {
  std::set<std::pair<std::string, std::string>> visited;

  bool check(const LocalPtr& sub, const LocalPtr& sup) {
    LocalPtr s = unfold_head(sub);
    LocalPtr t = unfold_head(sup);
    if (s.get() == t.get()) return true;

    if (s->kind != t->kind) return false;
    switch (s->kind) {
      case LocalType::Kind::End:
      case LocalType::Kind::Stop:
        return true;
      case LocalType::Kind::RecVar:
        return s->var == t->var;  // closed inputs never reach this
      case LocalType::Kind::Rec:
        return false;  // unreachable after unfolding
      case LocalType::Kind::Select:
      case LocalType::Kind::Branch:
        break;
    }
    if (s->peer != t->peer) return false;

    auto key = std::make_pair(canonical_key(s), canonical_key(t));
    if (!visited.insert(key).second) return true;

    if (s->kind == LocalType::Kind::Select) {
      // Every selection offered by s must exist in t.
      for (const auto& bs : s->branches) {
        const LocalBranch* bt = find(t->branches, bs.label);
        if (!bt || bt->sort != bs.sort || !check(bs.cont, bt->cont)) return false;
      }
      return true;
    }

    // Branch: s must handle everything t may require.
    bool t_pure_crash = t->branches.size() == 1 && t->branches.front().label.is_crash();
    if (t_pure_crash) return false;
    bool s_has_crash = find(s->branches, Label{kCrashLabel}) != nullptr;
    bool t_has_crash = find(t->branches, Label{kCrashLabel}) != nullptr;
    if (s_has_crash && !t_has_crash) return false;
    for (const auto& bt : t->branches) {
      const LocalBranch* bs = find(s->branches, bt.label);
      if (!bs || bs->sort != bt.sort || !check(bs->cont, bt.cont)) return false;
    }
    return true;
  }

  static const LocalBranch* find(const std::vector<LocalBranch>& branches, const Label& l) {
    for (const auto& b : branches)
      if (b.label == l) return &b;
    return nullptr;
  }
};

}  // namespace

bool subtype(const LocalPtr& s, const LocalPtr& t) {
  SubtypeCheck check;
  return check.check(s, t);
}

bool equal_up_to_unfolding(const LocalPtr& a, const LocalPtr& b) {
  struct Eq {
    std::set<std::pair<std::string, std::string>> visited;
    bool check(const LocalPtr& x0, const LocalPtr& y0) {
      LocalPtr x = unfold_head(x0);
      LocalPtr y = unfold_head(y0);
      if (x.get() == y.get()) return true;
      if (x->kind != y->kind) return false;
      switch (x->kind) {
        case LocalType::Kind::End:
        case LocalType::Kind::Stop:
          return true;
        case LocalType::Kind::RecVar:
          return x->var == y->var;
        case LocalType::Kind::Rec:
          return false;
        case LocalType::Kind::Select:
        case LocalType::Kind::Branch:
          break;
      }
      if (x->peer != y->peer || x->branches.size() != y->branches.size()) return false;
      auto key = std::make_pair(canonical_key(x), canonical_key(y));
      if (!visited.insert(key).second) return true;
      for (std::size_t i = 0; i < x->branches.size(); ++i) {
        const auto& bx = x->branches[i];
        const auto& by = y->branches[i];
        if (bx.label != by.label || bx.sort != by.sort || !check(bx.cont, by.cont)) return false;
      }
      return true;
    }
  } eq;
  return eq.check(a, b);
}

}  // namespace crmpst
