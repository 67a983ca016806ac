#include <doctest.h>

#include "crmpst/core_ops.hpp"
#include "crmpst/frontend.hpp"
#include "helpers.hpp"

using namespace crmpst;
using namespace crmpst::testing;

namespace {

GlobalPtr logging_body() { return load_protocol_fixture("logging.crmpst").body; }

}  // namespace

TEST_CASE("unfold_once substitutes the binder and is identity elsewhere") {
  LocalPtr t = l_rec("t", l_select(role("q"), {lb("l", l_recvar("t"))}));
  LocalPtr u = unfold_once(t);
  REQUIRE(u->kind == LocalType::Kind::Select);
  CHECK(equal(u, l_select(role("q"), {lb("l", t)})));

  CHECK(equal(unfold_once(g_end()), g_end()));
  CHECK(unfold_once(u).get() == u.get());
}

TEST_CASE("unfolding the recursive commit protocol exposes the proposal prefix") {
  GlobalPtr g = load_protocol_fixture("nbac.crmpst").body;
  REQUIRE(g->kind == GlobalType::Kind::Rec);
  GlobalPtr u = unfold_once(g);
  REQUIRE(u->kind == GlobalType::Kind::Comm);
  CHECK(u->sender == role("C"));
  CHECK(u->receiver == role("L"));
  CHECK(u->branches.front().label.name == "prop");
  CHECK(free_rec_vars(u).empty());
  CHECK(active_roles(u) == active_roles(g));
  CHECK(equal(unfold_once(u), u));
}

TEST_CASE("active and crashed roles of the logging protocol") {
  GlobalPtr g = logging_body();
  CHECK(active_roles(g) == RoleSet{role("C"), role("I"), role("L")});
  CHECK(crashed_roles(g).empty());

  CHECK(active_roles(g_end()).empty());
  CHECK(crashed_roles(g_end()).empty());
}

TEST_CASE("removing the client annotates it in a continuation position") {
  GlobalPtr removed = remove_role(logging_body(), role("C"));
  CHECK(crashed_roles(removed) == RoleSet{role("C")});
  CHECK(active_roles(removed) == RoleSet{role("I"), role("L")});
  CHECK(render_global(removed) == "L->I:trigger. C#~>I:crash. I->L:fatal. end");
}

TEST_CASE("removing the sender of a transmission en route keeps the selected index") {
  GlobalPtr g = g_comm_runtime(role("p"), false, role("q"), false,
                               {gb("l", g_end()), gb("crash", g_end())}, 0);
  GlobalPtr removed = remove_role(g, role("p"));
  REQUIRE(removed->kind == GlobalType::Kind::Comm);
  CHECK(removed->sender_crashed);
  CHECK(removed->committed == std::size_t{0});
  CHECK(removed->branches.size() == 2);
}

TEST_CASE("removal under an unrelated prefix converts the inner transmission") {
  GlobalPtr inner = g_comm(role("p"), role("q"), {gb("l", g_end()), gb("crash", g_end())});
  GlobalPtr g = g_comm(role("a"), role("b"), {gb("go", inner)});
  GlobalPtr removed = remove_role(g, role("p"));
  REQUIRE(removed->kind == GlobalType::Kind::Comm);
  CHECK(removed->sender == role("a"));
  CHECK_FALSE(removed->committed.has_value());
  const GlobalPtr& converted = removed->branches.front().cont;
  REQUIRE(converted->kind == GlobalType::Kind::Comm);
  CHECK(converted->sender_crashed);
  REQUIRE(converted->committed.has_value());
  CHECK(converted->branches[*converted->committed].label.is_crash());
}

TEST_CASE("removal needs an active role and a crash branch") {
  GlobalPtr g = logging_body();
  CHECK_THROWS_AS(remove_role(g, role("Z")), RoleNotActiveError);
  CHECK_THROWS_AS(remove_role(remove_role(g, role("C")), role("C")), RoleNotActiveError);

  GlobalPtr no_crash = g_comm(role("p"), role("q"), {gb("l", g_end())});
  CHECK_THROWS_AS(remove_role(no_crash, role("p")), NoCrashBranchError);
}

TEST_CASE("removing a role towards an already crashed receiver resolves the prefix") {
  // p -> q# { l. end , crash. end }: when p also dies, nobody observes the
  // prefix; the crash continuation remains.
  GlobalPtr g = g_comm_runtime(role("p"), false, role("q"), true,
                               {gb("l", g_end()), gb("crash", g_end())}, std::nullopt);
  GlobalPtr removed = remove_role(g, role("p"));
  CHECK(equal(removed, g_end()));
}

TEST_CASE("well-annotatedness of the logging protocol and its crash reduct") {
  GlobalPtr g = logging_body();
  RoleSet reliable{role("L"), role("I")};
  CHECK(well_annotated({}, g, reliable));

  GlobalPtr removed = remove_role(g, role("C"));
  CHECK(well_annotated({role("C")}, removed, reliable));
  CHECK_FALSE(well_annotated({}, removed, reliable));                  // WA2
  CHECK_FALSE(well_annotated({role("C")}, removed, {role("C")}));      // WA1
}

TEST_CASE("well-formedness accepts the logging protocol under its reliability set") {
  GlobalPtr g = logging_body();
  CHECK(well_formed(g, {role("L"), role("I")}).empty());
}

TEST_CASE("a reliable sender cannot carry a crash branch") {
  auto diagnostics = well_formed(logging_body(), {role("L"), role("I"), role("C")});
  REQUIRE(diagnostics.size() == 1);
  CHECK(diagnostics.front().rule == "CrashBranchForReliableSender");
}

TEST_CASE("crash cannot be the only branch") {
  GlobalPtr g = g_comm(role("p"), role("q"), {gb("crash", g_end())});
  auto diagnostics = well_formed(g, {});
  bool found = false;
  for (const auto& d : diagnostics) found = found || d.rule == "SingletonCrashBranch";
  CHECK(found);
}

TEST_CASE("an unreliable sender needs a crash branch") {
  GlobalPtr g = g_comm(role("p"), role("q"), {gb("l", g_end())});
  auto diagnostics = well_formed(g, {});
  REQUIRE(diagnostics.size() == 1);
  CHECK(diagnostics.front().rule == "MissingCrashBranch");
}

TEST_CASE("crash branches carry no payload") {
  GlobalPtr g =
      g_comm(role("p"), role("q"), {gb("l", g_end()), gb("crash", g_end(), Sort::Int)});
  auto diagnostics = well_formed(g, {});
  bool found = false;
  for (const auto& d : diagnostics) found = found || d.rule == "CrashPayloadNotUnit";
  CHECK(found);
}

TEST_CASE("shadowed binders and free variables are rejected") {
  GlobalPtr shadowed = g_rec(
      "t", g_comm(role("p"), role("q"),
                  {gb("l", g_rec("t", g_comm(role("p"), role("q"),
                                             {gb("l", g_recvar("t")), gb("crash", g_end())}))),
                   gb("crash", g_end())}));
  bool found = false;
  for (const auto& d : well_formed(shadowed, {})) found = found || d.rule == "ShadowedBinder";
  CHECK(found);

  bool free_var = false;
  for (const auto& d : well_formed(g_recvar("t"), {})) free_var = free_var || d.rule == "FreeRecVar";
  CHECK(free_var);
}

TEST_CASE("unfolding preserves role analyses and well-formedness verdicts") {
  GlobalPtr g = load_protocol_fixture("nbac.crmpst").body;
  GlobalPtr u = unfold_once(g);
  RoleSet reliable{role("C"), role("Mhd"), role("Mtl")};
  CHECK(active_roles(u) == active_roles(g));
  CHECK(crashed_roles(u) == crashed_roles(g));
  CHECK(well_formed(u, reliable).empty() == well_formed(g, reliable).empty());
}

TEST_CASE("role removal only removes the requested role") {
  GlobalPtr g = logging_body();
  GlobalPtr removed = remove_role(g, role("C"));
  RoleSet before = active_roles(g);
  RoleSet after = active_roles(removed);
  CHECK_FALSE(after.count(role("C")));
  for (const Role& r : after) CHECK(before.count(r));
  RoleSet crashed_after = crashed_roles(removed);
  crashed_after.erase(role("C"));
  for (const Role& r : crashed_after) CHECK(crashed_roles(g).count(r));
}
