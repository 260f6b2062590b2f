#include "sess2gts/gts_types.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sess2gts/alpha.hpp"
#include "sess2gts/parse.hpp"
#include "sess2gts/print.hpp"

namespace sess2gts {

namespace {

// ---------------------------------------------------------------------------
// Thread view. A process type is handled as a multiset of threads: parallel
// structure is flattened, syntactic zeros (0, replications of null bodies,
// one-armed external choices) are normalized away.
// ---------------------------------------------------------------------------

using Threads = std::vector<ProcessTypePtr>;

void flatten_into(const ProcessTypePtr& t, Threads& out);

Threads flatten(const ProcessTypePtr& t) {
  Threads out;
  flatten_into(t, out);
  return out;
}

void flatten_into(const ProcessTypePtr& t, Threads& out) {
  if (std::get_if<ProcessType::Zero>(&t->node)) return;
  if (auto* p = std::get_if<ProcessType::Par>(&t->node)) {
    flatten_into(p->left, out);
    flatten_into(p->right, out);
    return;
  }
  if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    if (e->arms.size() == 1) {
      flatten_into(e->arms[0], out);
      return;
    }
  }
  if (auto* r = std::get_if<ProcessType::Repl>(&t->node)) {
    if (flatten(r->body).empty()) return;  // replication of a dead body
  }
  out.push_back(t);
}

ProcessTypePtr rebuild(const Threads& ts) {
  if (ts.empty()) return pt_zero();
  ProcessTypePtr acc = ts[0];
  for (size_t i = 1; i < ts.size(); ++i) acc = pt_par(acc, ts[i]);
  return acc;
}

Threads sorted_by_render(Threads ts) {
  std::stable_sort(ts.begin(), ts.end(),
                   [](const ProcessTypePtr& a, const ProcessTypePtr& b) {
                     return render(a) < render(b);
                   });
  return ts;
}

std::string canon_str(const Threads& ts) {
  std::vector<std::string> rs;
  rs.reserve(ts.size());
  for (const auto& t : ts) rs.push_back(render(t));
  std::sort(rs.begin(), rs.end());
  if (rs.empty()) return "0";
  std::string out = rs[0];
  for (size_t i = 1; i < rs.size(); ++i) out += " | " + rs[i];
  return out;
}

Threads erase_at(const Threads& ts, size_t i) {
  Threads out;
  out.reserve(ts.size());
  for (size_t k = 0; k < ts.size(); ++k)
    if (k != i) out.push_back(ts[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Free names
// ---------------------------------------------------------------------------

void free_names_into(const ProcessTypePtr& t, std::set<std::string>& out);

void payload_free_names(const TypePayload& p, std::set<std::string>& out) {
  if (auto* tt = std::get_if<TupleType>(&p)) {
    std::set<std::string> inner;
    free_names_into(tt->body, inner);
    for (const auto& b : tt->binders) inner.erase(b);
    out.insert(inner.begin(), inner.end());
  }
}

void free_names_into(const ProcessTypePtr& t, std::set<std::string>& out) {
  if (std::get_if<ProcessType::Zero>(&t->node)) return;
  if (auto* p = std::get_if<ProcessType::Par>(&t->node)) {
    free_names_into(p->left, out);
    free_names_into(p->right, out);
  } else if (auto* o = std::get_if<ProcessType::OutPfx>(&t->node)) {
    out.insert(o->chan);
    payload_free_names(o->payload, out);
    free_names_into(o->cont, out);
  } else if (auto* i = std::get_if<ProcessType::InPfx>(&t->node)) {
    out.insert(i->chan);
    payload_free_names(i->payload, out);
    free_names_into(i->cont, out);
  } else if (auto* u = std::get_if<ProcessType::TauPfx>(&t->node)) {
    free_names_into(u->cont, out);
  } else if (auto* c = std::get_if<ProcessType::IntChoice>(&t->node)) {
    free_names_into(c->left, out);
    free_names_into(c->right, out);
  } else if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    for (const auto& a : e->arms) free_names_into(a, out);
  } else if (auto* r = std::get_if<ProcessType::Repl>(&t->node)) {
    free_names_into(r->body, out);
  }
}

void all_names_into(const ProcessTypePtr& t, std::set<std::string>& out);

void payload_all_names(const TypePayload& p, std::set<std::string>& out) {
  if (auto* tt = std::get_if<TupleType>(&p)) {
    for (const auto& b : tt->binders) out.insert(b);
    all_names_into(tt->body, out);
  }
}

void all_names_into(const ProcessTypePtr& t, std::set<std::string>& out) {
  if (std::get_if<ProcessType::Zero>(&t->node)) return;
  if (auto* p = std::get_if<ProcessType::Par>(&t->node)) {
    all_names_into(p->left, out);
    all_names_into(p->right, out);
  } else if (auto* o = std::get_if<ProcessType::OutPfx>(&t->node)) {
    out.insert(o->chan);
    payload_all_names(o->payload, out);
    all_names_into(o->cont, out);
  } else if (auto* i = std::get_if<ProcessType::InPfx>(&t->node)) {
    out.insert(i->chan);
    payload_all_names(i->payload, out);
    all_names_into(i->cont, out);
  } else if (auto* u = std::get_if<ProcessType::TauPfx>(&t->node)) {
    all_names_into(u->cont, out);
  } else if (auto* c = std::get_if<ProcessType::IntChoice>(&t->node)) {
    all_names_into(c->left, out);
    all_names_into(c->right, out);
  } else if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    for (const auto& a : e->arms) all_names_into(a, out);
  } else if (auto* r = std::get_if<ProcessType::Repl>(&t->node)) {
    all_names_into(r->body, out);
  }
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

using NameMap = std::map<std::string, std::string>;

ProcessTypePtr subst_rec(const ProcessTypePtr& t, const NameMap& m,
                         FreshSupply& fs);

TypePayload subst_payload(const TypePayload& p, const NameMap& m,
                          FreshSupply& fs) {
  auto* tt = std::get_if<TupleType>(&p);
  if (!tt) return p;
  NameMap local = m;
  for (const auto& b : tt->binders) local.erase(b);
  std::set<std::string> body_free;
  free_names_into(tt->body, body_free);
  // Restrict to mappings that actually apply.
  for (auto it = local.begin(); it != local.end();)
    it = body_free.count(it->first) ? std::next(it) : local.erase(it);
  if (local.empty()) return p;
  // Rename binders a mapping image would collide with.
  std::vector<std::string> binders = tt->binders;
  NameMap rename;
  for (auto& b : binders) {
    bool captured = false;
    for (const auto& kv : local)
      if (kv.second == b) captured = true;
    if (captured) {
      std::string nb = fs.fresh(b);
      rename[b] = nb;
      b = nb;
    }
  }
  ProcessTypePtr body = tt->body;
  if (!rename.empty()) body = subst_rec(body, rename, fs);
  body = subst_rec(body, local, fs);
  return TupleType{std::move(binders), std::move(body)};
}

ProcessTypePtr subst_rec(const ProcessTypePtr& t, const NameMap& m,
                         FreshSupply& fs) {
  if (m.empty()) return t;
  auto ch = [&](const std::string& n) {
    auto it = m.find(n);
    return it == m.end() ? n : it->second;
  };
  if (std::get_if<ProcessType::Zero>(&t->node)) return t;
  if (auto* p = std::get_if<ProcessType::Par>(&t->node))
    return pt_par(subst_rec(p->left, m, fs), subst_rec(p->right, m, fs));
  if (auto* o = std::get_if<ProcessType::OutPfx>(&t->node))
    return pt_out(ch(o->chan), subst_payload(o->payload, m, fs),
                  subst_rec(o->cont, m, fs));
  if (auto* i = std::get_if<ProcessType::InPfx>(&t->node))
    return pt_in(ch(i->chan), subst_payload(i->payload, m, fs),
                 subst_rec(i->cont, m, fs));
  if (auto* u = std::get_if<ProcessType::TauPfx>(&t->node))
    return pt_tau(subst_rec(u->cont, m, fs));
  if (auto* c = std::get_if<ProcessType::IntChoice>(&t->node))
    return pt_and(subst_rec(c->left, m, fs), subst_rec(c->right, m, fs));
  if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    std::vector<ProcessTypePtr> arms;
    arms.reserve(e->arms.size());
    for (const auto& a : e->arms) arms.push_back(subst_rec(a, m, fs));
    return pt_ext(std::move(arms));
  }
  auto* r = std::get_if<ProcessType::Repl>(&t->node);
  return pt_repl(subst_rec(r->body, m, fs));
}

// ---------------------------------------------------------------------------
// Subtyping engine. Works over thread multisets with backtracking: every
// right-hand thread must be covered, left-hand threads may be discharged if
// they can rise to 0, replicated left-hand threads may lend copies.
// ---------------------------------------------------------------------------

struct SubCtx {
  long long nodes = 0;
  long long max_nodes = 400000;
  std::map<std::pair<std::string, std::string>, bool> memo;
  bool budget() { return ++nodes <= max_nodes; }
};

bool leq_threads(SubCtx& cx, const Threads& A, const Threads& B);

bool leq_types(SubCtx& cx, const ProcessTypePtr& a, const ProcessTypePtr& b) {
  return leq_threads(cx, flatten(a), flatten(b));
}

// Can this thread rise to 0? Only choices picking a dead arm and replications
// of dead bodies qualify; prefixes never disappear.
bool dischargeable(SubCtx& cx, const ProcessTypePtr& a) {
  if (auto* c = std::get_if<ProcessType::IntChoice>(&a->node))
    return leq_threads(cx, flatten(c->left), {}) ||
           leq_threads(cx, flatten(c->right), {});
  if (auto* r = std::get_if<ProcessType::Repl>(&a->node))
    return leq_threads(cx, flatten(r->body), {});
  return false;
}

// Can 0 rise to this thread? Only replications whose body 0 can rise to;
// internal choice is never introduced.
bool zero_liftable(SubCtx& cx, const ProcessTypePtr& b) {
  if (auto* r = std::get_if<ProcessType::Repl>(&b->node))
    return leq_threads(cx, {}, flatten(r->body));
  return false;
}

bool thread_leq(SubCtx& cx, const ProcessTypePtr& a, const ProcessTypePtr& b) {
  if (!cx.budget()) return false;
  if (a == b) return true;
  // Internal choice on the left: eliminate either arm, or match pointwise.
  if (auto* ca = std::get_if<ProcessType::IntChoice>(&a->node)) {
    if (leq_threads(cx, flatten(ca->left), {b})) return true;
    if (leq_threads(cx, flatten(ca->right), {b})) return true;
    if (auto* cb = std::get_if<ProcessType::IntChoice>(&b->node))
      return leq_types(cx, ca->left, cb->left) &&
             leq_types(cx, ca->right, cb->right);
    return false;
  }
  if (auto* oa = std::get_if<ProcessType::OutPfx>(&a->node)) {
    auto* ob = std::get_if<ProcessType::OutPfx>(&b->node);
    return ob && oa->chan == ob->chan && alpha_eq(oa->payload, ob->payload) &&
           leq_types(cx, oa->cont, ob->cont);
  }
  if (auto* ia = std::get_if<ProcessType::InPfx>(&a->node)) {
    auto* ib = std::get_if<ProcessType::InPfx>(&b->node);
    return ib && ia->chan == ib->chan && alpha_eq(ia->payload, ib->payload) &&
           leq_types(cx, ia->cont, ib->cont);
  }
  if (auto* ua = std::get_if<ProcessType::TauPfx>(&a->node)) {
    auto* ub = std::get_if<ProcessType::TauPfx>(&b->node);
    return ub && leq_types(cx, ua->cont, ub->cont);
  }
  if (auto* ea = std::get_if<ProcessType::ExtChoice>(&a->node)) {
    auto* eb = std::get_if<ProcessType::ExtChoice>(&b->node);
    if (!eb || ea->arms.size() != eb->arms.size()) return false;
    for (size_t i = 0; i < ea->arms.size(); ++i)
      if (!leq_types(cx, ea->arms[i], eb->arms[i])) return false;
    return true;
  }
  if (auto* ra = std::get_if<ProcessType::Repl>(&a->node)) {
    auto* rb = std::get_if<ProcessType::Repl>(&b->node);
    return rb && leq_types(cx, ra->body, rb->body);
  }
  return false;
}

struct MatchState {
  Threads apool;
  std::vector<bool> used;
  std::vector<int> spawned;  // per apool slot; only meaningful for repls
};

bool match_from(SubCtx& cx, MatchState& st, const Threads& B, size_t bi,
                int spawn_cap) {
  if (!cx.budget()) return false;
  if (bi == B.size()) {
    for (size_t i = 0; i < st.apool.size(); ++i)
      if (!st.used[i] && !dischargeable(cx, st.apool[i])) return false;
    return true;
  }
  const ProcessTypePtr& b = B[bi];
  for (size_t i = 0; i < st.apool.size(); ++i) {
    if (st.used[i]) continue;
    if (!thread_leq(cx, st.apool[i], b)) continue;
    st.used[i] = true;
    if (match_from(cx, st, B, bi + 1, spawn_cap)) return true;
    st.used[i] = false;
  }
  // Lend copies from replicated threads, then retry this position.
  size_t n = st.apool.size();
  for (size_t i = 0; i < n; ++i) {
    auto* r = std::get_if<ProcessType::Repl>(&st.apool[i]->node);
    if (!r || st.spawned[i] >= spawn_cap) continue;
    Threads copy = flatten(r->body);
    if (copy.empty()) continue;
    st.spawned[i]++;
    size_t base = st.apool.size();
    for (const auto& ct : copy) {
      st.apool.push_back(ct);
      st.used.push_back(false);
      st.spawned.push_back(0);
    }
    if (match_from(cx, st, B, bi, spawn_cap)) return true;
    st.apool.resize(base);
    st.used.resize(base);
    st.spawned.resize(base);
    st.spawned[i]--;
  }
  if (zero_liftable(cx, b)) return match_from(cx, st, B, bi + 1, spawn_cap);
  return false;
}

bool leq_threads(SubCtx& cx, const Threads& A, const Threads& B) {
  if (!cx.budget()) return false;
  std::string ka = canon_str(A), kb = canon_str(B);
  if (ka == kb) return true;
  auto key = std::make_pair(ka, kb);
  auto it = cx.memo.find(key);
  if (it != cx.memo.end()) return it->second;
  MatchState st;
  st.apool = A;
  st.used.assign(A.size(), false);
  st.spawned.assign(A.size(), 0);
  bool ok = match_from(cx, st, B, 0, static_cast<int>(B.size()) + 1);
  cx.memo.emplace(std::move(key), ok);
  return ok;
}

// ---------------------------------------------------------------------------
// Exposure: the prefixes a thread multiset offers without synchronization.
// Sum arms count; replicated threads offer one copy of each body thread and
// keep standing when a copy is consumed.
// ---------------------------------------------------------------------------

struct Exposure {
  size_t origin = 0;
  bool from_repl = false;
  int kind = 0;  // 0 output, 1 input, 2 internal step
  std::string chan;
  TypePayload payload;
  ProcessTypePtr cont;
};

struct Committable {
  size_t origin = 0;
  bool from_repl = false;
  ProcessTypePtr left, right;
};

void collect_thread(size_t origin, bool from_repl, const ProcessTypePtr& th,
                    std::vector<Exposure>& es, std::vector<Committable>& cs) {
  if (auto* o = std::get_if<ProcessType::OutPfx>(&th->node)) {
    es.push_back({origin, from_repl, 0, o->chan, o->payload, o->cont});
  } else if (auto* i = std::get_if<ProcessType::InPfx>(&th->node)) {
    es.push_back({origin, from_repl, 1, i->chan, i->payload, i->cont});
  } else if (auto* u = std::get_if<ProcessType::TauPfx>(&th->node)) {
    es.push_back({origin, from_repl, 2, "", empty_payload(), u->cont});
  } else if (auto* e = std::get_if<ProcessType::ExtChoice>(&th->node)) {
    for (const auto& arm : e->arms) collect_thread(origin, from_repl, arm, es, cs);
  } else if (auto* c = std::get_if<ProcessType::IntChoice>(&th->node)) {
    cs.push_back({origin, from_repl, c->left, c->right});
  } else if (auto* r = std::get_if<ProcessType::Repl>(&th->node)) {
    for (const auto& ct : flatten(r->body))
      collect_thread(origin, true, ct, es, cs);
  }
}

void collect_state(const Threads& ts, std::vector<Exposure>& es,
                   std::vector<Committable>& cs) {
  for (size_t i = 0; i < ts.size(); ++i) collect_thread(i, false, ts[i], es, cs);
}

// Two exposures are parallel unless they are alternatives of one and the same
// (unreplicated) thread.
bool parallel(const Exposure& a, const Exposure& b) {
  return a.origin != b.origin || a.from_repl;
}

Threads consume(const Threads& ts, const Exposure& e) {
  Threads out;
  for (size_t i = 0; i < ts.size(); ++i)
    if (i != e.origin || e.from_repl) out.push_back(ts[i]);
  for (const auto& c : flatten(e.cont)) out.push_back(c);
  return out;
}

struct Step {
  std::string label;
  Threads next;
  bool unfolded = false;
};

std::vector<Step> successor_steps(const Threads& ts) {
  std::vector<Exposure> es;
  std::vector<Committable> cs;
  collect_state(ts, es, cs);
  std::vector<Step> out;
  std::set<std::string> seen;
  auto push = [&](std::string label, Threads next, bool unf) {
    next = sorted_by_render(std::move(next));
    std::string key = canon_str(next);
    if (!seen.insert(key).second) return;
    out.push_back({std::move(label), std::move(next), unf});
  };
  for (const auto& ei : es) {
    if (ei.kind == 2) {
      Threads next = consume(ts, ei);
      push("tau", std::move(next), ei.from_repl);
      continue;
    }
    if (ei.kind != 0) continue;
    for (const auto& ej : es) {
      if (ej.kind != 1 || ej.chan != ei.chan || !parallel(ei, ej)) continue;
      Threads next;
      for (size_t k = 0; k < ts.size(); ++k) {
        bool gone = (k == ei.origin && !ei.from_repl) ||
                    (k == ej.origin && !ej.from_repl);
        if (!gone) next.push_back(ts[k]);
      }
      for (const auto& c : flatten(ei.cont)) next.push_back(c);
      for (const auto& c : flatten(ej.cont)) next.push_back(c);
      push("com " + ei.chan, std::move(next), ei.from_repl || ej.from_repl);
    }
  }
  for (const auto& c : cs) {
    for (int side = 0; side < 2; ++side) {
      Threads next;
      for (size_t k = 0; k < ts.size(); ++k)
        if (k != c.origin || c.from_repl) next.push_back(ts[k]);
      for (const auto& a : flatten(side == 0 ? c.left : c.right))
        next.push_back(a);
      push(std::string("commit & ") + (side == 0 ? "left" : "right"),
           std::move(next), c.from_repl);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public: subtyping, substitution, reduction, null
// ---------------------------------------------------------------------------

bool subtype_generic(const ProcessTypePtr& a, const ProcessTypePtr& b) {
  SubCtx cx;
  return leq_types(cx, a, b);
}

bool equiv_generic(const ProcessTypePtr& a, const ProcessTypePtr& b) {
  return subtype_generic(a, b) && subtype_generic(b, a);
}

bool subtype_payload(const TypePayload& a, const TypePayload& b) {
  if (a.index() != b.index()) return false;
  if (auto* ba = std::get_if<std::vector<BaseType>>(&a))
    return *ba == std::get<std::vector<BaseType>>(b);
  const auto& ta = std::get<TupleType>(a);
  const auto& tb = std::get<TupleType>(b);
  if (ta.binders.size() != tb.binders.size()) return false;
  // Align both bodies on one fresh binder vector, then compare.
  FreshSupply fs;
  std::set<std::string> names;
  all_names_into(ta.body, names);
  all_names_into(tb.body, names);
  for (const auto& n : names) fs.observe(n);
  NameMap ma, mb;
  std::vector<std::string> common;
  for (size_t i = 0; i < ta.binders.size(); ++i) {
    std::string n = fs.fresh("cmp");
    ma[ta.binders[i]] = n;
    mb[tb.binders[i]] = n;
    common.push_back(n);
  }
  SubCtx cx;
  return leq_types(cx, subst_rec(ta.body, ma, fs), subst_rec(tb.body, mb, fs));
}

ProcessTypePtr subst_ptype(const ProcessTypePtr& t,
                           const std::vector<std::string>& from,
                           const std::vector<std::string>& to) {
  if (from.size() != to.size())
    throw std::invalid_argument("substitution arity mismatch");
  NameMap m;
  for (size_t i = 0; i < from.size(); ++i)
    if (from[i] != to[i]) m[from[i]] = to[i];
  if (m.empty()) return t;
  FreshSupply fs;
  std::set<std::string> names;
  all_names_into(t, names);
  for (const auto& n : names) fs.observe(n);
  for (const auto& n : to) fs.observe(n);
  return subst_rec(t, m, fs);
}

std::vector<ProcessTypePtr> type_reduce(const ProcessTypePtr& t) {
  std::vector<ProcessTypePtr> out;
  for (auto& s : successor_steps(flatten(t))) out.push_back(rebuild(s.next));
  return out;
}

bool is_null(const ProcessTypePtr& t) {
  if (std::get_if<ProcessType::Zero>(&t->node)) return true;
  if (auto* p = std::get_if<ProcessType::Par>(&t->node))
    return is_null(p->left) && is_null(p->right);
  if (auto* u = std::get_if<ProcessType::TauPfx>(&t->node)) return is_null(u->cont);
  if (auto* c = std::get_if<ProcessType::IntChoice>(&t->node))
    return is_null(c->left) && is_null(c->right);
  if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    for (const auto& a : e->arms)
      if (!is_null(a)) return false;
    return true;
  }
  if (auto* r = std::get_if<ProcessType::Repl>(&t->node)) return is_null(r->body);
  return false;  // input or output prefix
}

// ---------------------------------------------------------------------------
// Bounds and verdict rendering
// ---------------------------------------------------------------------------

ExplorationBound parse_bound(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty bound spec");
  ExplorationBound b;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bound entry needs key=value: " + item);
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    int n = 0;
    try {
      size_t used = 0;
      n = std::stoi(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw std::invalid_argument("bound value must be an integer: " + item);
    }
    if (n <= 0) throw std::invalid_argument("bound value must be positive: " + item);
    if (key == "depth")
      b.max_depth = n;
    else if (key == "states")
      b.max_states = n;
    else if (key == "unfold")
      b.unfold_limit = n;
    else
      throw std::invalid_argument("unknown bound key: " + key);
  }
  return b;
}

std::string verdict_str(const TypeVerdict& tv) {
  switch (tv.v) {
    case Verdict::Yes:
      return tv.used_unfold ? "true (replication unfolded)" : "true";
    case Verdict::No: {
      std::string out = "false";
      for (const auto& l : tv.witness) out += "\n  " + l;
      return out;
    }
    default:
      return "unknown(bound)";
  }
}

// ---------------------------------------------------------------------------
// Well-formedness and linearity exploration
// ---------------------------------------------------------------------------

namespace {

struct StateInfo {
  Threads threads;
  int depth = 0;
  std::string parent;  // empty for the root
  std::string label;
};

struct Explorer {
  ExplorationBound b;
  bool bound_hit = false;
  bool used_unfold = false;
  int unfolds = 0;
  std::map<std::string, StateInfo> seen;
  std::deque<std::string> frontier;

  explicit Explorer(const ExplorationBound& bb) : b(bb) {}

  void seed(const Threads& root) {
    std::string key = canon_str(root);
    seen.emplace(key, StateInfo{sorted_by_render(root), 0, "", ""});
    frontier.push_back(key);
  }

  // Expands one state; returns the keys of fresh successors.
  void expand(const std::string& key) {
    const StateInfo info = seen.at(key);
    if (info.depth >= b.max_depth) {
      if (!successor_steps(info.threads).empty()) bound_hit = true;
      return;
    }
    for (auto& st : successor_steps(info.threads)) {
      if (st.unfolded) {
        if (++unfolds > b.unfold_limit) {
          bound_hit = true;
          continue;
        }
      }
      std::string nk = canon_str(st.next);
      if (seen.count(nk)) continue;
      if (static_cast<int>(seen.size()) >= b.max_states) {
        bound_hit = true;
        return;
      }
      seen.emplace(nk, StateInfo{st.next, info.depth + 1, key, st.label});
      frontier.push_back(nk);
    }
  }

  std::vector<std::string> path_to(const std::string& key) const {
    std::vector<std::string> labels;
    std::string k = key;
    while (true) {
      const auto& info = seen.at(k);
      if (info.parent.empty()) break;
      labels.push_back(info.label);
      k = info.parent;
    }
    std::reverse(labels.begin(), labels.end());
    return labels;
  }
};

// Scans one state for a send/receive pair with incompatible payloads.
bool wf_violation(const Threads& ts, std::string& msg) {
  std::vector<Exposure> es;
  std::vector<Committable> cs;
  collect_state(ts, es, cs);
  for (const auto& eo : es) {
    if (eo.kind != 0) continue;
    for (const auto& ei : es) {
      if (ei.kind != 1 || ei.chan != eo.chan || !parallel(eo, ei)) continue;
      if (!subtype_payload(eo.payload, ei.payload)) {
        msg = "payload mismatch on " + eo.chan + ": <" +
              render(eo.payload) + "> vs <" + render(ei.payload) + ">";
        return true;
      }
    }
  }
  return false;
}

bool state_has_repl(const Threads& ts) {
  for (const auto& t : ts)
    if (std::get_if<ProcessType::Repl>(&t->node)) return true;
  return false;
}

TypeVerdict explore_wf(const Threads& root, const ExplorationBound& b,
                       bool* unfold_seen, bool* hit,
                       std::vector<std::string>* witness) {
  Explorer ex(b);
  ex.seed(root);
  TypeVerdict tv;
  while (!ex.frontier.empty()) {
    std::string key = ex.frontier.front();
    ex.frontier.pop_front();
    const StateInfo& info = ex.seen.at(key);
    if (state_has_repl(info.threads)) ex.used_unfold = true;
    std::string msg;
    if (wf_violation(info.threads, msg)) {
      tv.v = Verdict::No;
      for (const auto& l : ex.path_to(key)) tv.witness.push_back(l);
      tv.witness.push_back("state: " + key);
      tv.witness.push_back(msg);
      tv.used_unfold = ex.used_unfold;
      tv.bound_hit = ex.bound_hit;
      return tv;
    }
    ex.expand(key);
  }
  if (unfold_seen) *unfold_seen = ex.used_unfold;
  if (hit) *hit = ex.bound_hit;
  tv.used_unfold = ex.used_unfold;
  tv.bound_hit = ex.bound_hit;
  tv.v = ex.bound_hit ? Verdict::Unknown : Verdict::Yes;
  if (witness) *witness = {};
  return tv;
}

// Searches the residual for a second exposed action of the given kind.
// Returns true when found; path collects the steps taken inside the residual.
bool residual_exposes(const Threads& residual, const std::string& chan,
                      int kind, const ExplorationBound& b, bool& hit,
                      bool& unfolded, std::vector<std::string>& path) {
  Explorer ex(b);
  ex.seed(residual);
  while (!ex.frontier.empty()) {
    std::string key = ex.frontier.front();
    ex.frontier.pop_front();
    const StateInfo& info = ex.seen.at(key);
    if (state_has_repl(info.threads)) unfolded = true;
    std::vector<Exposure> es;
    std::vector<Committable> cs;
    collect_state(info.threads, es, cs);
    for (const auto& e : es) {
      if (e.kind == kind && e.chan == chan) {
        path = ex.path_to(key);
        return true;
      }
    }
    ex.expand(key);
  }
  if (ex.bound_hit) hit = true;
  if (ex.used_unfold) unfolded = true;
  return false;
}

}  // namespace

TypeVerdict is_wf(const ProcessTypePtr& t, const ExplorationBound& b) {
  return explore_wf(flatten(t), b, nullptr, nullptr, nullptr);
}

TypeVerdict is_lin(const ProcessTypePtr& t, const ExplorationBound& b) {
  Explorer ex(b);
  ex.seed(flatten(t));
  TypeVerdict tv;
  // Residual searches repeat across states; cache their outcomes.
  std::map<std::string, bool> residual_memo;
  while (!ex.frontier.empty()) {
    std::string key = ex.frontier.front();
    ex.frontier.pop_front();
    const StateInfo& info = ex.seen.at(key);
    if (state_has_repl(info.threads)) ex.used_unfold = true;
    std::string msg;
    if (wf_violation(info.threads, msg)) {
      tv.v = Verdict::No;
      for (const auto& l : ex.path_to(key)) tv.witness.push_back(l);
      tv.witness.push_back("state: " + key);
      tv.witness.push_back(msg);
      tv.used_unfold = ex.used_unfold;
      tv.bound_hit = ex.bound_hit;
      return tv;
    }
    std::vector<Exposure> es;
    std::vector<Committable> cs;
    collect_state(info.threads, es, cs);
    for (const auto& e : es) {
      if (e.kind == 2) continue;
      Threads residual;
      for (size_t i = 0; i < info.threads.size(); ++i)
        if (i != e.origin || e.from_repl) residual.push_back(info.threads[i]);
      std::string rkey = canon_str(residual) + "#" + e.chan +
                         (e.kind == 0 ? "!" : "?");
      bool raced;
      std::vector<std::string> rpath;
      auto it = residual_memo.find(rkey);
      if (it != residual_memo.end() && !it->second) {
        raced = false;
      } else {
        bool unf = false;
        raced = residual_exposes(residual, e.chan, e.kind, b, ex.bound_hit,
                                 unf, rpath);
        if (unf) ex.used_unfold = true;
        residual_memo[rkey] = raced;
      }
      if (raced) {
        tv.v = Verdict::No;
        for (const auto& l : ex.path_to(key)) tv.witness.push_back(l);
        tv.witness.push_back("state: " + key);
        tv.witness.push_back("residual: " + canon_str(residual));
        for (const auto& l : rpath) tv.witness.push_back(l);
        tv.witness.push_back(std::string("parallel ") +
                             (e.kind == 0 ? "sends" : "receives") + " on " +
                             e.chan);
        tv.used_unfold = ex.used_unfold;
        tv.bound_hit = ex.bound_hit;
        return tv;
      }
    }
    ex.expand(key);
  }
  tv.used_unfold = ex.used_unfold;
  tv.bound_hit = ex.bound_hit;
  tv.v = ex.bound_hit ? Verdict::Unknown : Verdict::Yes;
  return tv;
}

// ---------------------------------------------------------------------------
// Annotation sidecar
// ---------------------------------------------------------------------------

namespace {

void collect_res(const GenericProcPtr& p, std::vector<const GenericProc*>& out) {
  if (std::get_if<GenericProc::Nil>(&p->node)) return;
  if (auto* par = std::get_if<GenericProc::Par>(&p->node)) {
    collect_res(par->left, out);
    collect_res(par->right, out);
  } else if (auto* res = std::get_if<GenericProc::Res>(&p->node)) {
    out.push_back(p.get());
    collect_res(res->body, out);
  } else if (auto* rep = std::get_if<GenericProc::Repl>(&p->node)) {
    collect_res(rep->body, out);
  } else if (auto* sum = std::get_if<GenericProc::Sum>(&p->node)) {
    for (const auto& arm : sum->arms) collect_res(arm.cont, out);
  }
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t z = s.find_last_not_of(" \t\r");
  return s.substr(a, z - a + 1);
}

}  // namespace

GtsAnnotations parse_annotations(const GenericProcPtr& p,
                                 const std::string& text) {
  std::vector<const GenericProc*> res_nodes;
  collect_res(p, res_nodes);
  GtsAnnotations out;
  size_t next = 0;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string l = trim(line);
    if (l.empty() || l[0] == '#') continue;
    if (l.rfind("new", 0) != 0)
      throw std::runtime_error("annotation line " + std::to_string(lineno) +
                               " must start with 'new'");
    auto colon = l.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("annotation line " + std::to_string(lineno) +
                               " is missing ':'");
    std::string names_part = trim(l.substr(3, colon - 3));
    std::vector<std::string> names;
    std::stringstream ns(names_part);
    std::string n;
    while (std::getline(ns, n, ',')) {
      n = trim(n);
      if (!n.empty()) names.push_back(n);
    }
    if (next >= res_nodes.size())
      throw std::runtime_error("more annotation lines than restrictions");
    const GenericProc* node = res_nodes[next++];
    const auto& res = std::get<GenericProc::Res>(node->node);
    if (res.names != names)
      throw std::runtime_error(
          "annotation line " + std::to_string(lineno) +
          " names do not match the restriction in source order");
    out[node] = parse_process_type(l.substr(colon + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Typechecking generic processes
// ---------------------------------------------------------------------------

namespace {

struct TcCtx {
  ExplorationBound b;
  const GtsAnnotations* ann = nullptr;
  long long nodes = 0;
  long long limit = 0;
  bool bound_hit = false;
  std::string fail;
  std::map<std::string, bool> memo;
  FreshSupply fresh;
  SubCtx sub;

  bool budget() {
    if (++nodes > limit) {
      bound_hit = true;
      return false;
    }
    return true;
  }
  void note(const std::string& msg) {
    if (fail.empty()) fail = msg;
  }
};

// Can the thread rise to a type with no send/receive prefixes?
bool nullable_thread(const ProcessTypePtr& t) {
  if (std::get_if<ProcessType::Zero>(&t->node)) return true;
  if (auto* p = std::get_if<ProcessType::Par>(&t->node))
    return nullable_thread(p->left) && nullable_thread(p->right);
  if (auto* u = std::get_if<ProcessType::TauPfx>(&t->node)) return nullable_thread(u->cont);
  if (auto* c = std::get_if<ProcessType::IntChoice>(&t->node))
    return nullable_thread(c->left) || nullable_thread(c->right);
  if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    for (const auto& a : e->arms) {
      auto* u = std::get_if<ProcessType::TauPfx>(&a->node);
      if (!u || !nullable_thread(u->cont)) return false;
    }
    return true;
  }
  if (auto* r = std::get_if<ProcessType::Repl>(&t->node)) return nullable_thread(r->body);
  return false;
}

bool check(TcCtx& cx, const Threads& env, const GenericProcPtr& p);

// Enumerates environments reachable by committing internal choices, calling
// fn on each until one succeeds.
bool with_commits(TcCtx& cx, const Threads& env,
                  const std::function<bool(const Threads&)>& fn, int fuel) {
  if (!cx.budget()) return false;
  if (fn(env)) return true;
  if (fuel <= 0) return false;
  for (size_t i = 0; i < env.size(); ++i) {
    auto* c = std::get_if<ProcessType::IntChoice>(&env[i]->node);
    if (!c) continue;
    for (int side = 0; side < 2; ++side) {
      Threads e2 = erase_at(env, i);
      for (const auto& t : flatten(side == 0 ? c->left : c->right))
        e2.push_back(t);
      if (with_commits(cx, e2, fn, fuel - 1)) return true;
    }
  }
  return false;
}

// Renames free occurrences of the given names in every thread so that an
// inner binding of the same spelling cannot reach outer capabilities.
Threads shadow_out(TcCtx& cx, const Threads& env,
                   const std::vector<std::string>& binders) {
  NameMap m;
  std::set<std::string> free;
  for (const auto& t : env) free_names_into(t, free);
  for (const auto& b : binders)
    if (free.count(b)) m[b] = cx.fresh.fresh(b);
  if (m.empty()) return env;
  Threads out;
  out.reserve(env.size());
  for (const auto& t : env) out.push_back(subst_rec(t, m, cx.fresh));
  return out;
}

bool arg_kind_ok(const GArg& a, BaseType want) {
  if (std::get_if<std::string>(&a)) return true;  // a name: checked elsewhere
  const ExprPtr& e = std::get<ExprPtr>(a);
  if (std::get_if<Expr::IntLit>(&e->node)) return want == BaseType::Int;
  if (std::get_if<Expr::BoolLit>(&e->node)) return want == BaseType::Bool;
  if (std::get_if<Expr::Eq>(&e->node)) return want == BaseType::Bool;
  return true;  // a variable reference: kind unknown, accept
}

// One prefix action against one environment (already commit-expanded).
bool try_arm(TcCtx& cx, const Threads& env, const GuardedArm& arm,
             bool& matched_shape) {
  for (size_t j = 0; j < env.size(); ++j) {
    if (arm.input) {
      auto* in = std::get_if<ProcessType::InPfx>(&env[j]->node);
      if (!in || in->chan != arm.chan) continue;
      if (payload_arity(in->payload) != arm.binders.size()) continue;
      matched_shape = true;
      // Both the rest of the environment and the consumed thread's own
      // continuation live outside the new binding; rename collisions there.
      Threads outer = erase_at(env, j);
      for (const auto& t : flatten(in->cont)) outer.push_back(t);
      Threads next = shadow_out(cx, outer, arm.binders);
      if (auto* tt = std::get_if<TupleType>(&in->payload)) {
        ProcessTypePtr gained =
            subst_ptype(tt->body, tt->binders, arm.binders);
        for (const auto& t : flatten(gained)) next.push_back(t);
      }
      if (check(cx, next, arm.cont)) return true;
    } else {
      auto* outp = std::get_if<ProcessType::OutPfx>(&env[j]->node);
      if (!outp || outp->chan != arm.chan) continue;
      if (payload_arity(outp->payload) != arm.args.size()) continue;
      if (auto* tt = std::get_if<TupleType>(&outp->payload)) {
        // Carried environment: arguments must be names, and a matching
        // portion of the remaining environment is surrendered.
        std::vector<std::string> names;
        bool all_names = true;
        for (const auto& a : arm.args) {
          if (auto* n = std::get_if<std::string>(&a))
            names.push_back(*n);
          else
            all_names = false;
        }
        if (!all_names) continue;
        matched_shape = true;
        ProcessTypePtr promised = subst_ptype(tt->body, tt->binders, names);
        Threads rest = erase_at(env, j);
        size_t n = rest.size();
        bool surrendered = false;
        for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
          if (!cx.budget()) return false;
          Threads give, keep;
          for (size_t k = 0; k < n; ++k)
            (mask & (size_t{1} << k)) ? give.push_back(rest[k])
                                      : keep.push_back(rest[k]);
          if (!leq_threads(cx.sub, give, flatten(promised))) continue;
          surrendered = true;
          Threads next = keep;
          for (const auto& t : flatten(outp->cont)) next.push_back(t);
          if (check(cx, next, arm.cont)) return true;
        }
        if (!surrendered)
          cx.note("cannot surrender capabilities matching the payload of " +
                  arm.chan + "!");
      } else {
        const auto& bases = std::get<std::vector<BaseType>>(outp->payload);
        bool kinds_ok = true;
        for (size_t k = 0; k < bases.size(); ++k)
          if (!arg_kind_ok(arm.args[k], bases[k])) kinds_ok = false;
        if (!kinds_ok) continue;
        matched_shape = true;
        Threads next = erase_at(env, j);
        for (const auto& t : flatten(outp->cont)) next.push_back(t);
        if (check(cx, next, arm.cont)) return true;
      }
    }
  }
  return false;
}

bool prefix_compatible(const ProcessTypePtr& t, const GuardedArm& arm) {
  if (arm.input) {
    auto* in = std::get_if<ProcessType::InPfx>(&t->node);
    return in && in->chan == arm.chan &&
           payload_arity(in->payload) == arm.binders.size();
  }
  auto* outp = std::get_if<ProcessType::OutPfx>(&t->node);
  return outp && outp->chan == arm.chan &&
         payload_arity(outp->payload) == arm.args.size();
}

bool check(TcCtx& cx, const Threads& env, const GenericProcPtr& p) {
  if (!cx.budget()) return false;
  std::ostringstream keys;
  keys << canon_str(env) << "#" << p.get();
  std::string key = keys.str();
  auto it = cx.memo.find(key);
  if (it != cx.memo.end()) return it->second;
  bool ok = false;

  if (std::get_if<GenericProc::Nil>(&p->node)) {
    ok = true;
    for (const auto& t : env) {
      if (!nullable_thread(t)) {
        ok = false;
        cx.note("environment not exhausted at 0: " + render(t));
        break;
      }
    }
  } else if (auto* par = std::get_if<GenericProc::Par>(&p->node)) {
    ok = with_commits(
        cx, env,
        [&](const Threads& e) {
          // Replicated threads may lend copies to both sides before the
          // split; the replication itself is routed whole.
          std::vector<size_t> repls;
          for (size_t i = 0; i < e.size(); ++i)
            if (std::get_if<ProcessType::Repl>(&e[i]->node)) repls.push_back(i);
          std::vector<int> lend(repls.size(), 0);
          while (true) {
            Threads pool = e;
            for (size_t r = 0; r < repls.size(); ++r) {
              auto* rep = std::get_if<ProcessType::Repl>(&e[repls[r]]->node);
              for (int c = 0; c < lend[r]; ++c)
                for (const auto& t : flatten(rep->body)) pool.push_back(t);
            }
            size_t n = pool.size();
            if (n <= 16) {
              for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
                if (!cx.budget()) return false;
                Threads l, rgt;
                for (size_t k = 0; k < n; ++k)
                  (mask & (size_t{1} << k)) ? l.push_back(pool[k])
                                            : rgt.push_back(pool[k]);
                if (check(cx, l, par->left) && check(cx, rgt, par->right))
                  return true;
              }
            } else {
              cx.bound_hit = true;
            }
            // Next lending vector, each replication capped at two copies.
            size_t r = 0;
            for (; r < lend.size(); ++r) {
              if (lend[r] < 2) {
                ++lend[r];
                break;
              }
              lend[r] = 0;
            }
            if (r == lend.size()) break;
          }
          return false;
        },
        6);
    if (!ok) cx.note("no split of the environment types both branches");
  } else if (auto* rep = std::get_if<GenericProc::Repl>(&p->node)) {
    ok = with_commits(
        cx, env,
        [&](const Threads& e) {
          std::vector<size_t> repls;
          for (size_t i = 0; i < e.size(); ++i)
            if (std::get_if<ProcessType::Repl>(&e[i]->node)) repls.push_back(i);
          if (repls.size() != e.size()) return false;  // stray threads
          if (e.empty()) return check(cx, {}, rep->body);
          if (e.size() != 1) return false;
          auto* r = std::get_if<ProcessType::Repl>(&e[0]->node);
          return check(cx, flatten(r->body), rep->body);
        },
        6);
    if (!ok) cx.note("replication needs a replicated environment");
  } else if (auto* sum = std::get_if<GenericProc::Sum>(&p->node)) {
    if (sum->arms.size() == 1) {
      const GuardedArm& arm = sum->arms[0];
      bool matched_shape = false;
      ok = with_commits(
          cx, env,
          [&](const Threads& e) { return try_arm(cx, e, arm, matched_shape); },
          6);
      if (!ok && !matched_shape)
        cx.note(std::string("no usable ") + (arm.input ? "input" : "output") +
                " on " + arm.chan + " (arity " +
                std::to_string(arm.input ? arm.binders.size()
                                         : arm.args.size()) +
                ")");
    } else {
      ok = with_commits(
          cx, env,
          [&](const Threads& e) {
            for (size_t j = 0; j < e.size(); ++j) {
              auto* ext = std::get_if<ProcessType::ExtChoice>(&e[j]->node);
              if (!ext || ext->arms.size() != sum->arms.size()) continue;
              bool all = true;
              for (size_t i = 0; i < sum->arms.size() && all; ++i)
                all = prefix_compatible(ext->arms[i], sum->arms[i]);
              if (!all) continue;
              bool every = true;
              for (size_t i = 0; i < sum->arms.size() && every; ++i) {
                Threads e2 = erase_at(e, j);
                e2.push_back(ext->arms[i]);
                every = check(cx, e2, gp_sum({sum->arms[i]}));
              }
              if (every) return true;
            }
            return false;
          },
          6);
      if (!ok)
        cx.note("no external choice matching the sum (" +
                std::to_string(sum->arms.size()) + " arms)");
    }
  } else if (auto* res = std::get_if<GenericProc::Res>(&p->node)) {
    ProcessTypePtr a;
    bool missing = false;
    if (cx.ann) {
      auto ait = cx.ann->find(p.get());
      if (ait != cx.ann->end()) a = ait->second;
    }
    auto group = [&]() {
      std::string g = res->names.empty() ? "" : res->names[0];
      for (size_t i = 1; i < res->names.size(); ++i) g += "," + res->names[i];
      return "(new " + g + ")";
    };
    if (!a) {
      missing = true;
      a = pt_zero();
    }
    if (!missing) {
      TypeVerdict lv = is_lin(a, cx.b);
      if (lv.v == Verdict::No) {
        cx.fail = "restriction annotation for " + group() + " is not linear";
        cx.memo[key] = false;
        return false;
      }
      if (lv.v == Verdict::Unknown) {
        cx.fail =
            "restriction annotation for " + group() + ": linearity unknown";
        cx.bound_hit = true;
        cx.memo[key] = false;
        return false;
      }
    }
    Threads e2 = shadow_out(cx, env, res->names);
    for (const auto& t : flatten(a)) e2.push_back(t);
    ok = check(cx, e2, res->body);
    if (!ok && missing)
      cx.fail = "missing annotation for restriction " + group();
  }

  cx.memo[key] = ok;
  return ok;
}

}  // namespace

GtsCheckResult typecheck_generic(const ProcessTypePtr& env,
                                 const GenericProcPtr& p,
                                 const GtsAnnotations& ann,
                                 const ExplorationBound& b) {
  TcCtx cx;
  cx.b = b;
  cx.ann = &ann;
  cx.limit = static_cast<long long>(b.max_states) * 8;
  // Seed the fresh supply past every name in sight.
  std::set<std::string> names;
  all_names_into(env, names);
  for (const auto& kv : ann) all_names_into(kv.second, names);
  for (const auto& n : names) cx.fresh.observe(n);
  GtsCheckResult r;
  r.ok = check(cx, flatten(env), p);
  r.bound_hit = cx.bound_hit;
  if (!r.ok) {
    r.error = cx.fail.empty()
                  ? (cx.bound_hit ? "type search budget exhausted"
                                  : "typing failed")
                  : cx.fail;
    if (cx.bound_hit && r.error.find("budget") == std::string::npos)
      r.error += " (search budget exhausted)";
  }
  return r;
}

}  // namespace sess2gts
