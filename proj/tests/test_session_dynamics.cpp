#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "sess2gts/alpha.hpp"
#include "sess2gts/parse.hpp"
#include "sess2gts/print.hpp"
#include "sess2gts/session_dynamics.hpp"

using namespace sess2gts;

namespace {

SessionProcPtr sp(const std::string& s) { return parse_session_proc(s); }

std::string reducts_of(const std::string& src) {
  auto steps = reduce_session(sp(src));
  std::string out;
  for (const auto& [r, q] : steps) {
    if (!out.empty()) out += "\n";
    out += redex_str(r) + " => " + render(q);
  }
  return out;
}

} // namespace

TEST_CASE("substitution: polarity of the occurrence wins") {
  auto p = sp("z!<1>.z+?(w).0");
  auto q = subst_session(p, "z", Payload{Chan{"x", Polarity::Minus}});
  // bare occurrence inherits the payload polarity, explicit one keeps its own
  CHECK(render(q) == "x-!<1>.x+?(w).0");
}

TEST_CASE("substitution: comparisons evaluate once closed") {
  auto p = sp("w!<z==3>.0");
  CHECK(render(subst_session(p, "z", Payload{mk_int(3)})) == "w!<true>.0");
  CHECK(render(subst_session(p, "z", Payload{mk_int(4)})) == "w!<false>.0");
  // an unrelated channel leaves the comparison alone
  auto q = subst_session(p, "y", Payload{mk_int(7)});
  CHECK(render(q) == "w!<z==3>.0");
}

TEST_CASE("substitution avoids capture by restriction binders") {
  auto p = sp("(new x)(y!<2>.x?(v).0)");
  auto q = subst_session(p, "y", Payload{Chan{"x", Polarity::None}});
  // the binder must move out of the way of the incoming x
  auto& res = std::get<SessionProc::Res>(q->node);
  CHECK(res.name != "x");
  std::string want = "(new " + res.name + ")x!<2>." + res.name + "?(v).0";
  CHECK(render(q) == want);
}

TEST_CASE("substitution stops at a shadowing input binder") {
  auto p = sp("z!<1>.x?(z).z!<2>.0");
  auto q = subst_session(p, "z", Payload{Chan{"y", Polarity::None}});
  CHECK(render(q) == "y!<1>.x?(z).z!<2>.0");
}

TEST_CASE("substitution of a value where a channel is required is inert") {
  auto p = sp("z!<1>.0");
  auto q = subst_session(p, "z", Payload{mk_int(5)});
  // ill-typed, so the occurrence simply stays
  CHECK(render(q) == "z!<1>.0");
}

TEST_CASE("vector substitution demands matching lengths") {
  auto p = sp("a!<1>.0");
  std::vector<std::string> names{"a", "b"};
  std::vector<Payload> vals{Payload{mk_int(1)}};
  CHECK_THROWS_AS(subst_session(p, names, vals), std::invalid_argument);
  auto q =
      subst_session(p, {"a"}, {Payload{Chan{"c", Polarity::Plus}}});
  CHECK(render(q) == "c+!<1>.0");
}

TEST_CASE("prenex form pulls restrictions and drops inert threads") {
  auto f = session_prenex(sp("(new x)(0 | x!<1>.0 | (new y)(y?(v).0 | !0))"));
  REQUIRE(f.binders.size() == 2);
  CHECK(f.binders[0].name == "x");
  CHECK(f.binders[1].name == "y");
  REQUIRE(f.threads.size() == 2);
  CHECK(render(f.threads[0]) == "x!<1>.0");
  CHECK(render(f.threads[1]) == "y?(v).0");
  CHECK(render(rebuild(f)) == "(new x)(new y)(x!<1>.0 | y?(v).0)");
}

TEST_CASE("prenex form freshens colliding binders") {
  auto f = session_prenex(sp("(new x)(x!<1>.0 | (new x)x?(v).0)"));
  REQUIRE(f.binders.size() == 2);
  CHECK(f.binders[0].name == "x");
  CHECK(f.binders[1].name != "x");
  CHECK(render(f.threads[1]) == f.binders[1].name + "?(v).0");
}

TEST_CASE("prenex form never moves a restriction across a prefix") {
  auto f = session_prenex(sp("x?(v).(new y)y!<1>.0"));
  CHECK(f.binders.empty());
  REQUIRE(f.threads.size() == 1);
  CHECK(render(f.threads[0]) == "x?(v).(new y)y!<1>.0");
}

TEST_CASE("prenex form keeps replication bodies verbatim") {
  auto f = session_prenex(sp("!((new y)y!<1>.0 | 0)"));
  CHECK(f.binders.empty());
  REQUIRE(f.threads.size() == 1);
  CHECK(render(f.threads[0]) == "!((new y)y!<1>.0 | 0)");
}

TEST_CASE("inert laws of the structural preorder") {
  CHECK(struct_equiv(sp("x!<1>.0 | 0"), sp("x!<1>.0")) == Verdict::Yes);
  CHECK(struct_equiv(sp("!0"), sp("0")) == Verdict::Yes);
  CHECK(struct_equiv(sp("0 | (0 | !0)"), sp("0")) == Verdict::Yes);
  // replicated-nil erasure is literal; no rewriting happens under !
  CHECK(struct_equiv(sp("!(0 | 0)"), sp("!0")) == Verdict::No);
}

TEST_CASE("parallel composition commutes and reassociates") {
  auto a = sp("x!<1>.0 | (y?(v).0 | z!<2>.0)");
  auto b = sp("(z!<2>.0 | x!<1>.0) | y?(v).0");
  CHECK(struct_equiv(a, b) == Verdict::Yes);
  CHECK(struct_equiv(a, sp("x!<1>.0 | y?(v).0")) == Verdict::No);
}

TEST_CASE("scope extrusion is invertible") {
  auto a = sp("(new c)(x!<1>.0 | c?(v).0)");
  auto b = sp("x!<1>.0 | (new c)c?(v).0");
  CHECK(struct_equiv(a, b) == Verdict::Yes);
}

TEST_CASE("restriction binders match up to renaming") {
  CHECK(struct_equiv(sp("(new x)x!<1>.0"), sp("(new y)y!<1>.0")) == Verdict::Yes);
  // a bound name never matches a free one
  CHECK(struct_equiv(sp("(new x)x!<1>.0"), sp("y!<1>.0")) == Verdict::No);
  // annotations are bookkeeping only
  CHECK(struct_equiv(sp("(new x: end)0"), sp("(new y)0")) == Verdict::Yes);
}

TEST_CASE("replication spawns copies one way only") {
  CHECK(struct_leq(sp("!x?(v).0"), sp("!x?(v).0 | x?(v).0")) == Verdict::Yes);
  CHECK(struct_leq(sp("!x?(v).0 | x?(v).0"), sp("!x?(v).0")) == Verdict::No);
  CHECK(struct_equiv(sp("!x?(v).0"), sp("!x?(v).0 | x?(v).0")) == Verdict::No);
  // two copies fit the default budget
  CHECK(struct_leq(sp("!x?(v).0"), sp("!x?(v).0 | x?(v).0 | x?(v).0")) ==
        Verdict::Yes);
}

TEST_CASE("the copy budget separates No from Unknown") {
  auto a = sp("!x?(v).0");
  auto b = sp("!x?(v).0 | x?(v).0 | x?(v).0 | x?(v).0");
  StructOptions tight;
  tight.repl_budget = 2;
  CHECK(struct_leq(a, b, tight) == Verdict::Unknown);
  StructOptions wide;
  wide.repl_budget = 3;
  CHECK(struct_leq(a, b, wide) == Verdict::Yes);
  // a genuinely different thread shape stays No no matter the budget
  CHECK(struct_leq(a, sp("!x?(v).0 | y?(v).0"), wide) == Verdict::No);
}

TEST_CASE("spawned copies rename their own restrictions apart") {
  auto a = sp("!(new c)c!<1>.0");
  auto b = sp("!(new c)c!<1>.0 | (new d)d!<1>.0 | (new e)e!<1>.0");
  CHECK(struct_leq(a, b) == Verdict::Yes);
}

TEST_CASE("no congruence under prefixes") {
  CHECK(struct_equiv(sp("x?(v).(0 | 0)"), sp("x?(v).0")) == Verdict::No);
  CHECK(struct_equiv(sp("x!<1>.(new y)0"), sp("x!<1>.0")) == Verdict::No);
}

TEST_CASE("basic communication substitutes the payload") {
  CHECK(reducts_of("x!<3>.0 | x?(z).w!<z==3>.0") == "com x => w!<true>.0");
  CHECK(reducts_of("x!<c->.0 | x?(z).z!<1>.0") == "com x => c-!<1>.0");
}

TEST_CASE("polarized endpoints synchronize only with their complement") {
  CHECK(reducts_of("x+?(z).0 | x-!<1>.0") == "com x => 0");
  CHECK(reducts_of("x+?(z).0 | x+!<1>.0").empty());
  CHECK(reducts_of("x+?(z).0 | x!<1>.0").empty());
  CHECK(reducts_of("x?(z).0 | x-!<1>.0").empty());
}

TEST_CASE("branch and select commit to the offered arm") {
  CHECK(reducts_of("x+ >>{go: y!<1>.0, stop: 0} | x- <<go.w?(v).0") ==
        "sel x go => y!<1>.0 | w?(v).0");
  // a missing label is not a step
  CHECK(reducts_of("x+ >>{go: 0} | x- <<stop.0").empty());
}

TEST_CASE("reduction under restriction advances the annotation") {
  CHECK(reducts_of("(new x: ?<int>.end)(x+?(z).0 | x-!<1>.0)") ==
        "com x => (new x: end)0");
  CHECK(reducts_of("(new x: &{go: end})(x+ >>{go: 0} | x- <<go.0)") ==
        "sel x go => (new x: end)0");
}

TEST_CASE("scope extrusion happens on demand") {
  CHECK(reducts_of("(new c)x!<c>.0 | x?(z).z+!<1>.0") ==
        "com x => (new c)c+!<1>.0");
}

TEST_CASE("replicated servers stay available") {
  CHECK(reducts_of("!x?(z).0 | x!<1>.0") == "com x => !x?(z).0");
  // the copy carries private state of its own, hoisted to prenex form
  CHECK(reducts_of("!(new c)x?(z).c!<1>.0 | x!<9>.0") ==
        "com x => (new %c_0)(!(new c)x?(z).c!<1>.0 | %c_0!<1>.0)");
}

TEST_CASE("reducts come back in a stable order") {
  std::string twice = reducts_of("x!<1>.x!<2>.0 | x?(a).0 | x?(b).0");
  CHECK(twice ==
        "com x => x?(b).0 | x!<2>.0\n"
        "com x => x?(a).0 | x!<2>.0");
  CHECK(reducts_of("x!<1>.x!<2>.0 | x?(a).0 | x?(b).0") == twice);
}

TEST_CASE("communication errors need a polarized third party") {
  CHECK(is_session_error(sp("x+?(z).0 | x-!<1>.0 | x+!<2>.0")));
  CHECK(is_session_error(sp("x+?(z).0 | x-!<1>.0 | x-?(v).0")));
  CHECK_FALSE(is_session_error(sp("x+?(z).0 | x-!<1>.0")));
  // unpolarized races are fine
  CHECK_FALSE(is_session_error(sp("x?(z).0 | x!<1>.0 | x!<2>.0")));
  // the continuations themselves are not the third party
  CHECK_FALSE(is_session_error(sp("x+?(z).x+?(w).0 | x-!<1>.x-!<2>.0")));
}

TEST_CASE("a selection without a matching arm is an error") {
  CHECK(is_session_error(sp("x >>{go: 0} | x <<stop.0")));
  CHECK(is_session_error(sp("x+ >>{go: 0} | x- <<stop.0")));
  CHECK_FALSE(is_session_error(sp("x >>{go: 0} | x <<go.0")));
}

TEST_CASE("label races on polarized channels are errors") {
  CHECK(is_session_error(sp("x+ >>{go: 0} | x- <<go.0 | x- <<go.0")));
  CHECK_FALSE(is_session_error(sp("x >>{go: 0} | x <<go.0 | x <<go.0")));
}

TEST_CASE("errors hide under restrictions and replication") {
  CHECK(is_session_error(sp("(new x)(x+?(z).0 | x-!<1>.0 | x+!<2>.0)")));
  // the replicated original remains in the context after unfolding
  CHECK(is_session_error(sp("!x+?(z).0 | x-!<1>.0")));
  CHECK_FALSE(is_session_error(sp("!x?(z).0 | x!<1>.0")));
}

// ---------------------------------------------------------------------------
// Randomized cross-checks against a naive enumerator
// ---------------------------------------------------------------------------

namespace {

// Flat processes only: parallel threads of prefix chains, no restriction
// and no replication, so redexes can be counted by brute force.
struct FlatGen {
  std::mt19937_64 rng;
  explicit FlatGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

  Chan chan() {
    // small pool and a bias towards unpolarized names so that
    // complementary pairs actually show up
    static const char* names[] = {"x", "y"};
    Polarity pols[] = {Polarity::Plus, Polarity::Minus, Polarity::None,
                       Polarity::None};
    return Chan{names[pick(2)], pols[pick(4)]};
  }

  SessionProcPtr thread(int depth) {
    if (depth == 0) return sp_nil();
    switch (pick(4)) {
      case 0:
        return sp_out(chan(), Payload{mk_int(pick(5))}, thread(depth - 1));
      case 1:
        return sp_in(chan(), "z", thread(depth - 1));
      case 2: {
        std::vector<std::pair<std::string, SessionProcPtr>> arms;
        arms.emplace_back("go", thread(depth - 1));
        if (pick(2)) arms.emplace_back("stop", thread(depth - 1));
        return sp_branch(chan(), std::move(arms));
      }
      default:
        return sp_select(chan(), pick(2) ? "go" : "stop", thread(depth - 1));
    }
  }

  std::vector<SessionProcPtr> threads() {
    std::vector<SessionProcPtr> out;
    int n = 2 + pick(3);
    for (int i = 0; i < n; ++i) out.push_back(thread(1 + pick(2)));
    return out;
  }
};

SessionProcPtr par_all(const std::vector<SessionProcPtr>& ts) {
  SessionProcPtr p = nullptr;
  for (const auto& t : ts) p = p ? sp_par(p, t) : t;
  return p ? p : sp_nil();
}

// Brute-force redex count over an explicit thread list.
int naive_redex_count(const std::vector<SessionProcPtr>& ts) {
  int n = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (i == j) continue;
      if (auto* in = std::get_if<SessionProc::In>(&ts[i]->node)) {
        auto* o = std::get_if<SessionProc::Out>(&ts[j]->node);
        if (o && o->subj.name == in->subj.name &&
            o->subj.pol == complement(in->subj.pol))
          ++n;
      } else if (auto* br = std::get_if<SessionProc::Branch>(&ts[i]->node)) {
        auto* sel = std::get_if<SessionProc::Select>(&ts[j]->node);
        if (!sel || sel->subj.name != br->subj.name) continue;
        if (sel->subj.pol != complement(br->subj.pol)) continue;
        for (const auto& [l, body] : br->arms)
          if (l == sel->label) ++n;
      }
    }
  }
  return n;
}

} // namespace

TEST_CASE("redex enumeration agrees with brute force on flat processes") {
  FlatGen g(20260819);
  int nonzero = 0;
  for (int round = 0; round < 400; ++round) {
    auto ts = g.threads();
    auto p = par_all(ts);
    auto steps = reduce_session(p);
    CHECK(static_cast<int>(steps.size()) == naive_redex_count(ts));
    if (!steps.empty()) ++nonzero;
    for (const auto& [r, q] : steps) {
      // the reduct is the thread list with the pair replaced by continuations
      REQUIRE(r.pos_in < ts.size());
      REQUIRE(r.pos_out < ts.size());
      std::vector<SessionProcPtr> rest;
      for (std::size_t k = 0; k < ts.size(); ++k)
        if (k != r.pos_in && k != r.pos_out) rest.push_back(ts[k]);
      if (auto* in = std::get_if<SessionProc::In>(&ts[r.pos_in]->node)) {
        auto* o = std::get_if<SessionProc::Out>(&ts[r.pos_out]->node);
        REQUIRE(o != nullptr);
        rest.push_back(subst_session(in->cont, in->bound, o->payload));
        rest.push_back(o->cont);
      } else {
        auto* br = std::get_if<SessionProc::Branch>(&ts[r.pos_in]->node);
        auto* sel = std::get_if<SessionProc::Select>(&ts[r.pos_out]->node);
        REQUIRE(br != nullptr);
        REQUIRE(sel != nullptr);
        for (const auto& [l, body] : br->arms)
          if (l == sel->label) rest.push_back(body);
        rest.push_back(sel->cont);
      }
      CHECK(struct_equiv(q, par_all(rest)) == Verdict::Yes);
    }
  }
  CHECK(nonzero > 40); // the generator must actually exercise reduction
}

TEST_CASE("thread order never matters to the preorder") {
  FlatGen g(7);
  for (int round = 0; round < 200; ++round) {
    auto ts = g.threads();
    auto shuffled = ts;
    std::shuffle(shuffled.begin(), shuffled.end(), g.rng);
    CHECK(struct_equiv(par_all(ts), par_all(shuffled)) == Verdict::Yes);
    // dropping a thread breaks equivalence when nothing can respawn it
    CHECK(struct_equiv(par_all(ts), sp_par(par_all(ts), g.thread(2))) ==
          Verdict::No);
  }
}

TEST_CASE("reduction commutes with structural rearrangement") {
  FlatGen g(99);
  for (int round = 0; round < 120; ++round) {
    auto ts = g.threads();
    auto shuffled = ts;
    std::shuffle(shuffled.begin(), shuffled.end(), g.rng);
    auto a = reduce_session(par_all(ts));
    auto b = reduce_session(par_all(shuffled));
    REQUIRE(a.size() == b.size());
    // every reduct on one side has a structurally equal partner on the other
    std::vector<bool> used(b.size(), false);
    for (const auto& [ra, qa] : a) {
      bool found = false;
      for (std::size_t k = 0; k < b.size() && !found; ++k) {
        if (used[k]) continue;
        if (redex_str(ra) == redex_str(b[k].first) &&
            struct_equiv(qa, b[k].second) == Verdict::Yes) {
          used[k] = true;
          found = true;
        }
      }
      CHECK(found);
    }
  }
}
