#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "gen_util.hpp"
#include "sess2gts/parse.hpp"
#include "sess2gts/print.hpp"
#include "sess2gts/session_dynamics.hpp"
#include "sess2gts/session_typing.hpp"

using namespace sess2gts;

namespace {

SessionTypePtr st(const std::string& s) { return parse_session_type(s); }
SessionProcPtr sp(const std::string& s) { return parse_session_proc(s); }
TypeEnv te(const std::string& s) { return parse_type_env(s); }

// The worked example used throughout: a two-option server and the client
// that picks the service branch over a freshly created channel.
const char* kServiceType = "&{service: ?<int>.!<bool>.end, quit: end}";
const char* kClient = "c- <<service.c-!<3>.c-?(b).0";
const char* kServer = "x >>{service: x?(i).x!<i==3>.0, quit: 0}";

std::string system_src(bool annotated) {
  std::string z_ann =
      annotated ? std::string(": !<") + kServiceType + ">.end" : "";
  std::string c_ann = annotated ? std::string(": ") + kServiceType : "";
  return "(new z" + z_ann + ")((new c" + c_ann + ")z+!<c+>." + kClient +
         " | z-?(x).(" + kServer + "))";
}

// Independent structural double-swap used as the duality oracle.
SessionTypePtr mirror(const SessionTypePtr& s) {
  if (auto* in = std::get_if<SessionType::In>(&s->node))
    return st_out(in->payload, mirror(in->cont));
  if (auto* out = std::get_if<SessionType::Out>(&s->node))
    return st_in(out->payload, mirror(out->cont));
  if (auto* br = std::get_if<SessionType::Branch>(&s->node)) {
    std::vector<LabelArm> arms;
    for (const auto& [l, t] : br->arms) arms.emplace_back(l, mirror(t));
    return st_choice(std::move(arms));
  }
  if (auto* ch = std::get_if<SessionType::Choice>(&s->node)) {
    std::vector<LabelArm> arms;
    for (const auto& [l, t] : ch->arms) arms.emplace_back(l, mirror(t));
    return st_branch(std::move(arms));
  }
  return s;
}

bool has_base(const SessionTypePtr& s) {
  if (std::holds_alternative<SessionType::Base>(s->node)) return true;
  return false;
}

// True when no base type sits in tail position, i.e. dual is defined.
bool dualizable(const SessionTypePtr& s) {
  if (has_base(s)) return false;
  if (auto* in = std::get_if<SessionType::In>(&s->node))
    return dualizable(in->cont);
  if (auto* out = std::get_if<SessionType::Out>(&s->node))
    return dualizable(out->cont);
  if (auto* br = std::get_if<SessionType::Branch>(&s->node)) {
    for (const auto& [l, t] : br->arms)
      if (!dualizable(t)) return false;
    return true;
  }
  if (auto* ch = std::get_if<SessionType::Choice>(&s->node)) {
    for (const auto& [l, t] : ch->arms)
      if (!dualizable(t)) return false;
    return true;
  }
  return true;
}

// Produce guaranteed sub/supertypes by applying the rules upward and
// downward; serves as a closure oracle for the subtype checker.
SessionTypePtr widen(testgen::SynGen& g, const SessionTypePtr& s);
SessionTypePtr narrow(testgen::SynGen& g, const SessionTypePtr& s);

SessionTypePtr widen(testgen::SynGen& g, const SessionTypePtr& s) {
  if (auto* in = std::get_if<SessionType::In>(&s->node))
    return st_in(has_base(in->payload) ? in->payload : widen(g, in->payload),
                 widen(g, in->cont));
  if (auto* out = std::get_if<SessionType::Out>(&s->node))
    return st_out(has_base(out->payload) ? out->payload : narrow(g, out->payload),
                  widen(g, out->cont));
  if (auto* br = std::get_if<SessionType::Branch>(&s->node)) {
    std::vector<LabelArm> arms;
    for (const auto& [l, t] : br->arms) arms.emplace_back(l, widen(g, t));
    if (g.coin(0.5)) arms.emplace_back("extra", st_end()); // widen the offer
    return st_branch(std::move(arms));
  }
  if (auto* ch = std::get_if<SessionType::Choice>(&s->node)) {
    std::vector<LabelArm> arms;
    for (const auto& [l, t] : ch->arms) arms.emplace_back(l, widen(g, t));
    if (arms.size() > 1 && g.coin(0.5)) arms.pop_back(); // narrow the selection
    return st_choice(std::move(arms));
  }
  return s;
}

SessionTypePtr narrow(testgen::SynGen& g, const SessionTypePtr& s) {
  if (auto* in = std::get_if<SessionType::In>(&s->node))
    return st_in(has_base(in->payload) ? in->payload : narrow(g, in->payload),
                 narrow(g, in->cont));
  if (auto* out = std::get_if<SessionType::Out>(&s->node))
    return st_out(has_base(out->payload) ? out->payload : widen(g, out->payload),
                  narrow(g, out->cont));
  if (auto* br = std::get_if<SessionType::Branch>(&s->node)) {
    std::vector<LabelArm> arms;
    for (const auto& [l, t] : br->arms) arms.emplace_back(l, narrow(g, t));
    if (arms.size() > 1 && g.coin(0.5)) arms.pop_back();
    return st_branch(std::move(arms));
  }
  if (auto* ch = std::get_if<SessionType::Choice>(&s->node)) {
    std::vector<LabelArm> arms;
    for (const auto& [l, t] : ch->arms) arms.emplace_back(l, narrow(g, t));
    if (g.coin(0.5)) arms.emplace_back("extra", st_end());
    return st_choice(std::move(arms));
  }
  return s;
}

} // namespace

TEST_CASE("duality swaps directions and choices") {
  CHECK(render(dual(st(kServiceType))) ==
        "(+){service: !<int>.?<bool>.end, quit: end}");
  CHECK(render(dual(st("end"))) == "end");
  CHECK(render(dual(st("?<int>.!<bool>.end"))) == "!<int>.?<bool>.end");
  CHECK_THROWS_AS(dual(st("int")), std::invalid_argument);
  // payloads are what travels; they keep their orientation
  CHECK(render(dual(st("!<?<int>.end>.end"))) == "?<?<int>.end>.end");
}

TEST_CASE("duality is an involution and matches the double-swap oracle") {
  testgen::SynGen g(42);
  int used = 0;
  for (int i = 0; i < 2000; ++i) {
    auto s = g.stype(4);
    if (!dualizable(s)) continue;
    ++used;
    CHECK(st_eq(dual(s), mirror(s)));
    CHECK(st_eq(dual(dual(s)), s));
  }
  CHECK(used > 300);
}

TEST_CASE("subtyping on the frozen examples") {
  CHECK(subtype_session(st("&{l1: end}"), st("&{l1: end, l2: end}")));
  CHECK_FALSE(subtype_session(st("&{l1: end, l2: end}"), st("&{l1: end}")));
  CHECK(subtype_session(st("(+){l1: end, l2: end}"), st("(+){l1: end}")));
  CHECK_FALSE(subtype_session(st("(+){l1: end}"), st("(+){l1: end, l2: end}")));
  // output payloads are contravariant
  CHECK(subtype_session(st("!<&{l1: end, l2: end}>.end"), st("!<&{l1: end}>.end")));
  CHECK_FALSE(subtype_session(st("!<&{l1: end}>.end"), st("!<&{l1: end, l2: end}>.end")));
  // input payloads are covariant
  CHECK(subtype_session(st("?<&{l1: end}>.end"), st("?<&{l1: end, l2: end}>.end")));
  CHECK(subtype_session(st("end"), st("end")));
  CHECK_FALSE(subtype_session(st("end"), st("?<int>.end")));
  CHECK_FALSE(subtype_session(st("int"), st("bool")));
}

TEST_CASE("subtyping is a preorder closed under its rules") {
  testgen::SynGen g(7);
  for (int i = 0; i < 500; ++i) {
    auto s = g.stype(4);
    CHECK(subtype_session(s, s)); // reflexive
    auto up = widen(g, s);
    auto down = narrow(g, s);
    CHECK(subtype_session(s, up));
    CHECK(subtype_session(down, s));
    CHECK(subtype_session(down, up)); // transitive through s
  }
}

TEST_CASE("environment comma absorbs only identical bindings") {
  TypeEnv env = te("x+: end");
  auto same = env_extend(env, "x", Polarity::Plus, st_end());
  REQUIRE(same.has_value());
  CHECK(same->size() == 1);
  CHECK_FALSE(env_extend(env, "x", Polarity::Plus, st("?<int>.end")).has_value());
  auto other = env_extend(env, "y", Polarity::None, st("int"));
  REQUIRE(other.has_value());
  CHECK(other->size() == 2);
  // a bare binding never joins a polarized one
  CHECK_FALSE(env_extend(env, "x", Polarity::None, st_end()).has_value());
}

TEST_CASE("environment plus demands exclusivity") {
  TypeEnv env = te("x+: end");
  CHECK_FALSE(env_plus(env, "x", Polarity::None, st_end()).has_value());
  CHECK_FALSE(env_plus(env, "x", Polarity::Plus, st_end()).has_value());
  auto ok = env_plus(env, "x", Polarity::Minus, st_end());
  REQUIRE(ok.has_value());
  CHECK(ok->size() == 2);
  CHECK(env_plus(TypeEnv{}, "x", Polarity::Plus, st("?<int>.end")).has_value());
}

TEST_CASE("balance requires exact duals") {
  CHECK(is_balanced(te("c+: ?<int>.!<bool>.end, c-: !<int>.?<bool>.end")));
  CHECK_FALSE(is_balanced(te("c+: end, c-: ?<int>.end")));
  CHECK(is_balanced(TypeEnv{}));
  CHECK(is_balanced(te("c+: end, d-: end"))); // no partner, nothing to match
}

TEST_CASE("advancing a branch binding picks the arm's continuation") {
  TypeEnv env = te(std::string("x+: ") + kServiceType);
  auto adv = env_advance(env, "x", Polarity::Plus, "service");
  REQUIRE(adv.has_value());
  CHECK(render(*adv->lookup("x", Polarity::Plus)) == "?<int>.!<bool>.end");
  CHECK_FALSE(env_advance(env, "x", Polarity::Plus, "missing").has_value());
  CHECK_FALSE(env_advance(env, "y", Polarity::Plus, "service").has_value());

  // advancing both endpoints by one label keeps the environment balanced
  TypeEnv both = te(std::string("x+: ") + kServiceType +
                    ", x-: (+){service: !<int>.?<bool>.end, quit: end}");
  REQUIRE(is_balanced(both));
  auto a1 = env_advance(both, "x", Polarity::Plus, "service");
  auto a2 = env_advance(*a1, "x", Polarity::Minus, "service");
  REQUIRE(a2.has_value());
  CHECK(is_balanced(*a2));
}

TEST_CASE("nil types under finished environments only") {
  CHECK(typecheck_session(TypeEnv{}, sp("0")).ok);
  CHECK(typecheck_session(te("x+: end, n: int"), sp("0")).ok);
  auto bad = typecheck_session(te("x+: ?<int>.end"), sp("0"));
  CHECK_FALSE(bad.ok);
  CHECK(bad.error.find("leftover") != std::string::npos);
}

TEST_CASE("replication needs an unlimited environment") {
  CHECK(typecheck_session(TypeEnv{}, sp("!0")).ok);
  CHECK(typecheck_session(te("n: int"), sp("!0")).ok);
  // even a finished session binding is not unlimited
  auto r = typecheck_session(te("x+: end"), sp("!0"));
  CHECK_FALSE(r.ok);
  CHECK(r.error.find("unlimited") != std::string::npos);
}

TEST_CASE("the worked example types under its declared environment") {
  std::string env_src = std::string("z+: !<") + kServiceType + ">.end, z-: ?<" +
                        kServiceType + ">.end, c+: " + kServiceType +
                        ", c-: (+){service: !<int>.?<bool>.end, quit: end}";
  TypeEnv env = te(env_src);
  REQUIRE(is_balanced(env));
  std::string proc = std::string("z+!<c+>.") + kClient + " | z-?(x).(" + kServer + ")";
  auto r = typecheck_session(env, sp(proc));
  REQUIRE(r.ok);
  std::string tree = render_derivation(r.derivation);
  CHECK(tree.find("T-Par") != std::string::npos);
  CHECK(tree.find("T-Offer") != std::string::npos);
  CHECK(tree.find("T-Select") != std::string::npos);
}

TEST_CASE("the closed system types under the empty environment") {
  auto r = typecheck_session(TypeEnv{}, sp(system_src(true)));
  REQUIRE(r.ok);
  CHECK(r.derivation.rule == "T-Res");
}

TEST_CASE("restriction types are inferred when annotations are missing") {
  auto p = sp(system_src(false));
  auto r = typecheck_session(TypeEnv{}, p);
  REQUIRE(r.ok);
  // the outermost restriction is the checked node itself
  auto it = r.res_types.find(p.get());
  REQUIRE(it != r.res_types.end());
  // inference derives the minimal protocol: the quit arm is never selected
  CHECK(render(it->second) == "!<&{service: ?<int>.!<bool>.end}>.end");
}

TEST_CASE("annotations are echoed back for the encoder") {
  auto p = sp("(new x: ?<int>.end)(x+?(v).0 | x-!<2>.0)");
  auto r = typecheck_session(TypeEnv{}, p);
  REQUIRE(r.ok);
  auto it = r.res_types.find(p.get());
  REQUIRE(it != r.res_types.end());
  CHECK(render(it->second) == "?<int>.end");
}

TEST_CASE("typing failures carry a diagnosis") {
  auto unbound = typecheck_session(TypeEnv{}, sp("x!<1>.0"));
  CHECK_FALSE(unbound.ok);
  CHECK(unbound.error.find("unbound subject") != std::string::npos);

  auto clash = typecheck_session(te("x: end"), sp("x+!<1>.0"));
  CHECK_FALSE(clash.ok);
  CHECK(clash.error.find("polarity clash") != std::string::npos);

  auto missing = typecheck_session(te("x+: &{go: end}"),
                                   sp("x+ >>{stop: 0}"));
  CHECK_FALSE(missing.ok);
  CHECK(missing.error.find("not offered") != std::string::npos);

  auto badsel = typecheck_session(te("x+: (+){go: end}"),
                                  sp("x+ <<stop.0"));
  CHECK_FALSE(badsel.ok);
  CHECK(badsel.error.find("not offered") != std::string::npos);

  auto proto = typecheck_session(te("x+: ?<int>.end"), sp("x+!<1>.0"));
  CHECK_FALSE(proto.ok);
  CHECK(proto.error.find("protocol mismatch") != std::string::npos);
}

TEST_CASE("output payloads enjoy subtyping slack") {
  CHECK(typecheck_session(
            te("x+: !<&{l1: end, l2: end}>.end, y+: &{l1: end}"),
            sp("x+!<y+>.0"))
            .ok);
  CHECK_FALSE(typecheck_session(
                  te("x+: !<&{l1: end}>.end, y+: &{l1: end, l2: end}"),
                  sp("x+!<y+>.0"))
                  .ok);
}

TEST_CASE("offers may have more arms than the type demands") {
  CHECK(typecheck_session(te("x+: &{go: end}"),
                          sp("x+ >>{go: 0, stop: x+!<1>.0}"))
            .ok); // the stop arm is dead code and stays unchecked
  CHECK_FALSE(typecheck_session(te("x+: &{go: end, stop: end}"),
                                sp("x+ >>{go: 0}"))
                  .ok);
}

TEST_CASE("parallel composition splits the environment by usage") {
  CHECK(typecheck_session(te("c+: ?<int>.end, c-: !<int>.end"),
                          sp("c+?(v).0 | c-!<1>.0"))
            .ok);
  // base values are shared, sessions are not
  CHECK(typecheck_session(te("a+: !<int>.end, b+: !<int>.end, n: int"),
                          sp("a+!<n>.0 | b+!<n>.0"))
            .ok);
  // the endpoint routes to one side; the composition cannot share it
  auto twice = typecheck_session(te("c+: ?<int>.?<int>.end"),
                                 sp("c+?(v).0 | c+?(w).0"));
  CHECK_FALSE(twice.ok);
  CHECK(twice.error.find("c+") != std::string::npos);
}

TEST_CASE("sending a linear endpoint moves it across") {
  // after the send, the payload channel is gone from the sender's side
  CHECK_FALSE(typecheck_session(te("x: !<end>.end, y+: end"),
                                sp("x!<y+>.y+?(v).0"))
                  .ok);
  CHECK(typecheck_session(te("x: !<end>.end, y+: end"), sp("x!<y+>.0")).ok);
}

TEST_CASE("input binders shadow outer bindings safely") {
  CHECK(typecheck_session(te("x+: ?<int>.end, z: int"), sp("x+?(z).0")).ok);
  // the received value is usable at the payload type
  CHECK(typecheck_session(te("x+: ?<int>.end, w: !<bool>.end"),
                          sp("x+?(i).w!<i==3>.0"))
            .ok);
}

TEST_CASE("derivations render as an indented premise tree") {
  auto r = typecheck_session(TypeEnv{}, sp("0"));
  REQUIRE(r.ok);
  CHECK(render_derivation(r.derivation) == "T-Nil  |- 0\n");
  auto r2 = typecheck_session(te("x+: end"), sp("0 | 0"));
  REQUIRE(r2.ok);
  CHECK(render_derivation(r2.derivation) ==
        "T-Par  x+: end |- 0 | 0\n"
        "  T-Nil  x+: end |- 0\n"
        "  T-Nil  |- 0\n");
}

TEST_CASE("typability is preserved along reductions of the system") {
  // explore everything the closed system can do and re-check each state
  std::vector<SessionProcPtr> frontier{sp(system_src(true))};
  std::set<std::string> seen;
  int states = 0;
  while (!frontier.empty()) {
    auto p = frontier.back();
    frontier.pop_back();
    if (!seen.insert(render(p)).second) continue;
    ++states;
    CAPTURE(render(p));
    CHECK(typecheck_session(TypeEnv{}, p).ok);
    CHECK_FALSE(is_session_error(p));
    for (auto& [r, q] : reduce_session(p)) frontier.push_back(q);
  }
  CHECK(states >= 4); // create, select, send, receive
}

TEST_CASE("typability survives structural rearrangement") {
  std::string env_src = "c+: ?<int>.end, c-: !<int>.end, n: int";
  auto a = sp("c+?(v).0 | c-!<1>.0 | 0");
  auto b = sp("0 | c-!<1>.0 | c+?(v).0");
  CHECK(struct_equiv(a, b) == Verdict::Yes);
  CHECK(typecheck_session(te(env_src), a).ok);
  CHECK(typecheck_session(te(env_src), b).ok);
}

TEST_CASE("the environment split helper routes by occurrence") {
  TypeEnv env = te("c+: ?<int>.end, c-: !<int>.end, n: int, u+: end");
  auto left = sp("c+?(v).0");
  auto right = sp("c-!<1>.0");
  auto [l, r] = env_split(env, left, right);
  CHECK(l.contains("c", Polarity::Plus));
  CHECK_FALSE(l.contains("c", Polarity::Minus));
  CHECK(r.contains("c", Polarity::Minus));
  // bases are copied, unused sessions stay left
  CHECK(l.contains("n", Polarity::None));
  CHECK(r.contains("n", Polarity::None));
  CHECK(l.contains("u", Polarity::Plus));
  CHECK_FALSE(r.contains("u", Polarity::Plus));
}

TEST_CASE("type preservation computes the successor environment") {
  // a com on a free polarized channel advances both endpoint types
  TypeEnv env = te("z+: !<int>.end, z-: ?<int>.end");
  auto p = sp("z+!<4>.0 | z-?(v).0");
  REQUIRE(typecheck_session(env, p).ok);
  auto steps = reduce_session(p);
  REQUIRE(steps.size() == 1);
  TypeEnv after = te("z+: end, z-: end");
  CHECK(typecheck_session(after, steps[0].second).ok);
  CHECK(is_balanced(after));
}
