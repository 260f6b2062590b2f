#include "sess2gts/session_dynamics.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "sess2gts/alpha.hpp"
#include "struct_engine.hpp"

namespace sess2gts {

namespace {

using Subst = std::map<std::string, Payload>;

std::set<std::string> payload_names(const Payload& v) {
  std::set<std::string> out;
  if (auto* c = std::get_if<Chan>(&v)) {
    out.insert(c->name);
  } else {
    std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
      if (auto* var = std::get_if<Expr::Var>(&e->node)) out.insert(var->name);
      else if (auto* q = std::get_if<Expr::Eq>(&e->node)) walk(q->lhs);
    };
    walk(std::get<ExprPtr>(v));
  }
  return out;
}

ExprPtr subst_expr(const ExprPtr& e, const Subst& sub) {
  if (auto* v = std::get_if<Expr::Var>(&e->node)) {
    auto it = sub.find(v->name);
    if (it == sub.end()) return e;
    if (auto* c = std::get_if<Chan>(&it->second)) return mk_var(c->name);
    return std::get<ExprPtr>(it->second);
  }
  if (auto* q = std::get_if<Expr::Eq>(&e->node)) {
    ExprPtr lhs = subst_expr(q->lhs, sub);
    if (auto* i = std::get_if<Expr::IntLit>(&lhs->node)) return mk_bool(i->value == q->rhs);
    // an ill-typed closed comparison collapses rather than sticking around
    if (std::holds_alternative<Expr::BoolLit>(lhs->node)) return mk_bool(false);
    if (lhs == q->lhs) return e;
    return mk_eq(lhs, q->rhs);
  }
  return e;
}

// An explicitly polarized occurrence keeps its polarity; a bare one inherits
// the payload's.
Chan subst_chan(const Chan& c, const Chan& val) {
  return Chan{val.name, c.pol != Polarity::None ? c.pol : val.pol};
}

struct Substituter {
  FreshSupply fs;
  std::set<std::string> valnames;

  Chan subject(const Chan& c, const Subst& sub) {
    auto it = sub.find(c.name);
    if (it == sub.end()) return c;
    if (auto* v = std::get_if<Chan>(&it->second)) return subst_chan(c, *v);
    return c; // value in subject position: ill-typed, left stuck
  }

  Payload payload(const Payload& p, const Subst& sub) {
    if (auto* c = std::get_if<Chan>(&p)) {
      auto it = sub.find(c->name);
      if (it == sub.end()) return p;
      if (auto* v = std::get_if<Chan>(&it->second)) return Payload{subst_chan(*c, *v)};
      if (c->pol == Polarity::None) return it->second;
      return p; // polarized occurrence of a value variable: left alone
    }
    return Payload{subst_expr(std::get<ExprPtr>(p), sub)};
  }

  SessionProcPtr go(const SessionProcPtr& p, const Subst& sub) {
    if (sub.empty()) return p;
    if (std::holds_alternative<SessionProc::Nil>(p->node)) return p;
    if (auto* par = std::get_if<SessionProc::Par>(&p->node))
      return sp_par(go(par->left, sub), go(par->right, sub));
    if (auto* res = std::get_if<SessionProc::Res>(&p->node)) {
      auto [name, body] = freshen(res->name, res->body, sub);
      Subst inner = sub;
      inner.erase(name);
      return sp_res(name, res->ann, go(body, inner));
    }
    if (auto* rep = std::get_if<SessionProc::Repl>(&p->node))
      return sp_repl(go(rep->body, sub));
    if (auto* o = std::get_if<SessionProc::Out>(&p->node))
      return sp_out(subject(o->subj, sub), payload(o->payload, sub), go(o->cont, sub));
    if (auto* i = std::get_if<SessionProc::In>(&p->node)) {
      Chan subj = subject(i->subj, sub);
      auto [bound, cont] = freshen(i->bound, i->cont, sub);
      Subst inner = sub;
      inner.erase(bound);
      return sp_in(subj, bound, go(cont, inner));
    }
    if (auto* br = std::get_if<SessionProc::Branch>(&p->node)) {
      std::vector<std::pair<std::string, SessionProcPtr>> arms;
      for (const auto& [l, body] : br->arms) arms.emplace_back(l, go(body, sub));
      return sp_branch(subject(br->subj, sub), std::move(arms));
    }
    auto& sel = std::get<SessionProc::Select>(p->node);
    return sp_select(subject(sel.subj, sub), sel.label, go(sel.cont, sub));
  }

 private:
  // Rename the binder when a substituted value could capture it.
  std::pair<std::string, SessionProcPtr> freshen(const std::string& name,
                                                 const SessionProcPtr& body,
                                                 const Subst& sub) {
    bool live = false;
    for (const auto& [k, v] : sub)
      if (k != name) live = true;
    if (!live || valnames.count(name) == 0) return {name, body};
    std::string nm = fs.fresh(name);
    Subst ren;
    ren[name] = Payload{Chan{nm, Polarity::None}};
    return {nm, go(body, ren)};
  }
};

SessionProcPtr apply_subst(const SessionProcPtr& p, const Subst& sub) {
  Substituter s;
  for (const auto& n : all_names(p)) s.fs.observe(n);
  for (const auto& [k, v] : sub) {
    auto ns = payload_names(v);
    s.valnames.insert(ns.begin(), ns.end());
    for (const auto& n : ns) s.fs.observe(n);
  }
  return s.go(p, sub);
}

// Plain renaming for prenex freshening.
SessionProcPtr rename_free(const SessionProcPtr& p, const std::string& from,
                           const std::string& to) {
  Subst sub;
  sub[from] = Payload{Chan{to, Polarity::None}};
  return apply_subst(p, sub);
}

void collect_prenex(const SessionProcPtr& p, SessionPrenex& out,
                    std::set<std::string>& taken, FreshSupply& fs) {
  if (std::holds_alternative<SessionProc::Nil>(p->node)) return;
  if (auto* par = std::get_if<SessionProc::Par>(&p->node)) {
    collect_prenex(par->left, out, taken, fs);
    collect_prenex(par->right, out, taken, fs);
    return;
  }
  if (auto* res = std::get_if<SessionProc::Res>(&p->node)) {
    std::string nm = res->name;
    SessionProcPtr body = res->body;
    if (taken.count(nm)) {
      nm = fs.fresh(res->name);
      body = rename_free(body, res->name, nm);
    }
    taken.insert(nm);
    out.binders.push_back({nm, res->ann});
    collect_prenex(body, out, taken, fs);
    return;
  }
  if (auto* rep = std::get_if<SessionProc::Repl>(&p->node)) {
    if (std::holds_alternative<SessionProc::Nil>(rep->body->node)) return; // !0
    out.threads.push_back(p);
    return;
  }
  out.threads.push_back(p);
}

} // namespace

SessionProcPtr subst_session(const SessionProcPtr& p, const std::string& var,
                             const Payload& val) {
  Subst sub;
  sub[var] = val;
  return apply_subst(p, sub);
}

SessionProcPtr subst_session(const SessionProcPtr& p,
                             const std::vector<std::string>& vars,
                             const std::vector<Payload>& vals) {
  if (vars.size() != vals.size())
    throw std::invalid_argument("substitution arity mismatch: " +
                                std::to_string(vars.size()) + " names, " +
                                std::to_string(vals.size()) + " values");
  Subst sub;
  for (std::size_t i = 0; i < vars.size(); ++i) sub[vars[i]] = vals[i];
  return apply_subst(p, sub);
}

SessionPrenex session_prenex(const SessionProcPtr& p) {
  SessionPrenex out;
  std::set<std::string> taken = free_names(p);
  FreshSupply fs;
  for (const auto& n : all_names(p)) fs.observe(n);
  collect_prenex(p, out, taken, fs);
  return out;
}

SessionProcPtr rebuild(const SessionPrenex& f) {
  SessionProcPtr body = nullptr;
  for (const auto& t : f.threads) body = body ? sp_par(body, t) : t;
  if (!body) body = sp_nil();
  for (auto it = f.binders.rbegin(); it != f.binders.rend(); ++it)
    body = sp_res(it->name, it->ann, body);
  return body;
}

// ---------------------------------------------------------------------------
// Structural preorder
// ---------------------------------------------------------------------------

namespace {

bool is_repl(const SessionProcPtr& p) {
  return std::holds_alternative<SessionProc::Repl>(p->node);
}

} // namespace

Verdict struct_leq(const SessionProcPtr& a, const SessionProcPtr& b,
                   const StructOptions& opts) {
  SessionPrenex pa = session_prenex(a);
  SessionPrenex pb = session_prenex(b);
  FreshSupply fs;
  std::set<std::string> taken = all_names(a);
  for (const auto& n : all_names(b)) taken.insert(n);
  for (const auto& n : taken) fs.observe(n);
  LeqEngine<SessionProcPtr> eng{
      opts,
      // One replication copy: the body in prenex form, every pulled binder
      // renamed fresh so distinct copies never share restricted names.
      [&fs, &taken](const SessionProcPtr& repl)
          -> std::optional<EngCopy<SessionProcPtr>> {
        const auto& body = std::get<SessionProc::Repl>(repl->node).body;
        SessionPrenex pre = session_prenex(body);
        EngCopy<SessionProcPtr> cp;
        cp.threads = pre.threads;
        for (const auto& bd : pre.binders) {
          std::string nm = fs.fresh(bd.name);
          taken.insert(nm);
          for (auto& t : cp.threads) t = rename_free(t, bd.name, nm);
          cp.binders.push_back(nm);
        }
        if (cp.threads.empty()) return std::nullopt; // contributes nothing
        return cp;
      },
      [](const SessionProcPtr& p) { return is_repl(p); }};
  NameBij bij;
  for (const auto& bd : pa.binders) bij.flex_left.insert(bd.name);
  for (const auto& bd : pb.binders) bij.flex_right.insert(bd.name);
  if (eng.search(pa.threads, pb.threads, std::move(bij), {}, 0)) return Verdict::Yes;
  if (eng.budget_hit || eng.exhausted) return Verdict::Unknown;
  return Verdict::No;
}

Verdict struct_equiv(const SessionProcPtr& a, const SessionProcPtr& b,
                     const StructOptions& opts) {
  Verdict fw = struct_leq(a, b, opts);
  if (fw == Verdict::No) return Verdict::No;
  Verdict bw = struct_leq(b, a, opts);
  if (bw == Verdict::No) return Verdict::No;
  if (fw == Verdict::Yes && bw == Verdict::Yes) return Verdict::Yes;
  return Verdict::Unknown;
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

namespace {

// The reducible surface: base threads plus one unfolded copy per replicated
// thread (copies of copies one level deeper). Identical copies of a single
// replication never synchronise with each other (their head prefixes are
// equal, hence never complementary), so one copy per level is exhaustive.
struct Exposed {
  SessionPrenex base;
  struct Chunk {
    int parent;         // chunk index, or -1 when spawned from a base thread
    std::size_t origin; // thread index within the parent (or base)
    std::vector<PrenexBinder> binders;
    std::vector<SessionProcPtr> threads;
  };
  std::vector<Chunk> chunks;
  struct Slot {
    int chunk; // -1 = base
    std::size_t idx;
    SessionProcPtr proc;
  };
  std::vector<Slot> slots;
};

Exposed expose(const SessionProcPtr& p, int depth) {
  Exposed ex;
  ex.base = session_prenex(p);
  FreshSupply fs;
  std::set<std::string> taken = all_names(p);
  for (const auto& n : taken) fs.observe(n);

  auto spawn = [&](const SessionProcPtr& repl, int parent, std::size_t origin) {
    const auto& body = std::get<SessionProc::Repl>(repl->node).body;
    Exposed::Chunk c;
    c.parent = parent;
    c.origin = origin;
    SessionPrenex pre = session_prenex(body);
    for (auto& b : pre.binders) {
      std::string nm = fs.fresh(b.name);
      taken.insert(nm);
      for (auto& t : pre.threads) t = rename_free(t, b.name, nm);
      c.binders.push_back({nm, b.ann});
    }
    c.threads = pre.threads;
    return c;
  };

  // depth-1 copies from base threads, then depth-2 copies from those chunks
  std::vector<std::pair<int, std::size_t>> frontier; // (chunk idx, level)
  for (std::size_t i = 0; i < ex.base.threads.size(); ++i) {
    if (is_repl(ex.base.threads[i])) {
      ex.chunks.push_back(spawn(ex.base.threads[i], -1, i));
      frontier.push_back({static_cast<int>(ex.chunks.size()) - 1, 2});
    }
  }
  for (std::size_t f = 0; f < frontier.size(); ++f) {
    auto [ci, level] = frontier[f];
    if (static_cast<int>(level) > depth) continue;
    for (std::size_t i = 0; i < ex.chunks[ci].threads.size(); ++i) {
      if (is_repl(ex.chunks[ci].threads[i])) {
        ex.chunks.push_back(spawn(ex.chunks[ci].threads[i], ci, i));
        frontier.push_back({static_cast<int>(ex.chunks.size()) - 1, level + 1});
      }
    }
  }

  for (std::size_t i = 0; i < ex.base.threads.size(); ++i)
    if (!is_repl(ex.base.threads[i]))
      ex.slots.push_back({-1, i, ex.base.threads[i]});
  for (std::size_t c = 0; c < ex.chunks.size(); ++c)
    for (std::size_t i = 0; i < ex.chunks[c].threads.size(); ++i)
      if (!is_repl(ex.chunks[c].threads[i]))
        ex.slots.push_back({static_cast<int>(c), i, ex.chunks[c].threads[i]});
  return ex;
}

std::optional<SessionTypePtr> advance_ann(const SessionTypePtr& s, const SessionRedex& r) {
  if (r.kind == SessionRedex::Kind::Com) {
    if (auto* i = std::get_if<SessionType::In>(&s->node)) return i->cont;
    if (auto* o = std::get_if<SessionType::Out>(&s->node)) return o->cont;
    return std::nullopt;
  }
  const std::vector<LabelArm>* arms = nullptr;
  if (auto* br = std::get_if<SessionType::Branch>(&s->node)) arms = &br->arms;
  if (auto* ch = std::get_if<SessionType::Choice>(&s->node)) arms = &ch->arms;
  if (arms)
    for (const auto& [l, t] : *arms)
      if (l == r.label) return t;
  return std::nullopt;
}

// Chunks needed to materialize a slot, outermost first.
std::vector<int> chunk_closure(const Exposed& ex, int chunk) {
  std::vector<int> out;
  for (int c = chunk; c != -1; c = ex.chunks[c].parent) out.push_back(c);
  std::reverse(out.begin(), out.end());
  return out;
}

SessionProcPtr build_reduct(const Exposed& ex, const Exposed::Slot& sin,
                            const Exposed::Slot& sout, const SessionRedex& redex,
                            const std::vector<SessionProcPtr>& conts) {
  // involved chunks, in spawn order, each once
  std::vector<int> involved;
  for (int c : chunk_closure(ex, sin.chunk))
    involved.push_back(c);
  for (int c : chunk_closure(ex, sout.chunk))
    if (std::find(involved.begin(), involved.end(), c) == involved.end())
      involved.push_back(c);
  std::sort(involved.begin(), involved.end());

  auto consumed = [&](int chunk, std::size_t idx) {
    return (sin.chunk == chunk && sin.idx == idx) ||
           (sout.chunk == chunk && sout.idx == idx);
  };

  SessionPrenex out;
  for (const auto& b : ex.base.binders) {
    PrenexBinder nb = b;
    if (redex.subject_bound && b.name == redex.subject && b.ann)
      if (auto adv = advance_ann(*b.ann, redex)) nb.ann = adv;
    out.binders.push_back(nb);
  }
  for (int c : involved) {
    for (const auto& b : ex.chunks[c].binders) {
      PrenexBinder nb = b;
      if (redex.subject_bound && b.name == redex.subject && b.ann)
        if (auto adv = advance_ann(*b.ann, redex)) nb.ann = adv;
      out.binders.push_back(nb);
    }
  }

  for (std::size_t i = 0; i < ex.base.threads.size(); ++i)
    if (!consumed(-1, i)) out.threads.push_back(ex.base.threads[i]);
  for (int c : involved)
    for (std::size_t i = 0; i < ex.chunks[c].threads.size(); ++i)
      if (!consumed(c, i)) out.threads.push_back(ex.chunks[c].threads[i]);
  for (const auto& k : conts) out.threads.push_back(k);

  return rebuild(session_prenex(rebuild(out)));
}

} // namespace

std::string redex_str(const SessionRedex& r) {
  if (r.kind == SessionRedex::Kind::Com) return "com " + r.subject;
  return "sel " + r.subject + " " + r.label;
}

std::vector<std::pair<SessionRedex, SessionProcPtr>> reduce_session(
    const SessionProcPtr& p, const StructOptions& opts) {
  (void)opts;
  Exposed ex = expose(p, 2);
  std::set<std::string> bound_names;
  for (const auto& b : ex.base.binders) bound_names.insert(b.name);
  for (const auto& c : ex.chunks)
    for (const auto& b : c.binders) bound_names.insert(b.name);

  std::vector<std::pair<SessionRedex, SessionProcPtr>> out;
  for (std::size_t i = 0; i < ex.slots.size(); ++i) {
    for (std::size_t j = 0; j < ex.slots.size(); ++j) {
      if (i == j) continue;
      const auto& si = ex.slots[i];
      const auto& sj = ex.slots[j];
      if (auto* in = std::get_if<SessionProc::In>(&si.proc->node)) {
        auto* o = std::get_if<SessionProc::Out>(&sj.proc->node);
        if (!o || o->subj.name != in->subj.name) continue;
        if (o->subj.pol != complement(in->subj.pol)) continue;
        SessionRedex r;
        r.kind = SessionRedex::Kind::Com;
        r.subject = in->subj.name;
        r.input_pol = in->subj.pol;
        r.subject_bound = bound_names.count(r.subject) > 0;
        r.pos_in = i;
        r.pos_out = j;
        SessionProcPtr cont_in = subst_session(in->cont, in->bound, o->payload);
        out.emplace_back(r, build_reduct(ex, si, sj, r, {cont_in, o->cont}));
      } else if (auto* br = std::get_if<SessionProc::Branch>(&si.proc->node)) {
        auto* sel = std::get_if<SessionProc::Select>(&sj.proc->node);
        if (!sel || sel->subj.name != br->subj.name) continue;
        if (sel->subj.pol != complement(br->subj.pol)) continue;
        const SessionProcPtr* arm = nullptr;
        for (const auto& [l, body] : br->arms)
          if (l == sel->label) arm = &body;
        if (!arm) continue; // missing label: an error, not a step
        SessionRedex r;
        r.kind = SessionRedex::Kind::BranchSel;
        r.subject = br->subj.name;
        r.input_pol = br->subj.pol;
        r.label = sel->label;
        r.subject_bound = bound_names.count(r.subject) > 0;
        r.pos_in = i;
        r.pos_out = j;
        out.emplace_back(r, build_reduct(ex, si, sj, r, {*arm, sel->cont}));
      }
    }
  }
  return out;
}

bool is_session_error(const SessionProcPtr& p, const StructOptions& opts) {
  (void)opts;
  Exposed ex = expose(p, 2);
  auto rest_uses_endpoint = [&](std::size_t i, std::size_t j, const std::string& x) {
    for (std::size_t k = 0; k < ex.slots.size(); ++k) {
      if (k == i || k == j) continue;
      auto pols = free_polarities(ex.slots[k].proc, x);
      if (pols.count(Polarity::Plus) || pols.count(Polarity::Minus)) return true;
    }
    // replicated originals also stay in the parallel context
    auto repl_uses = [&](const SessionProcPtr& t) {
      if (!is_repl(t)) return false;
      auto pols = free_polarities(t, x);
      return pols.count(Polarity::Plus) > 0 || pols.count(Polarity::Minus) > 0;
    };
    for (const auto& t : ex.base.threads)
      if (repl_uses(t)) return true;
    for (const auto& c : ex.chunks)
      for (const auto& t : c.threads)
        if (repl_uses(t)) return true;
    return false;
  };

  for (std::size_t i = 0; i < ex.slots.size(); ++i) {
    for (std::size_t j = 0; j < ex.slots.size(); ++j) {
      if (i == j) continue;
      const auto& si = ex.slots[i];
      const auto& sj = ex.slots[j];
      if (auto* in = std::get_if<SessionProc::In>(&si.proc->node)) {
        auto* o = std::get_if<SessionProc::Out>(&sj.proc->node);
        if (!o || o->subj.name != in->subj.name) continue;
        if (o->subj.pol != complement(in->subj.pol)) continue;
        if (in->subj.pol == Polarity::None) continue;
        if (rest_uses_endpoint(i, j, in->subj.name)) return true;
      } else if (auto* br = std::get_if<SessionProc::Branch>(&si.proc->node)) {
        auto* sel = std::get_if<SessionProc::Select>(&sj.proc->node);
        if (!sel || sel->subj.name != br->subj.name) continue;
        if (sel->subj.pol != complement(br->subj.pol)) continue;
        bool have = false;
        for (const auto& [l, body] : br->arms)
          if (l == sel->label) have = true;
        if (!have) return true;
        if (br->subj.pol == Polarity::None) continue;
        if (rest_uses_endpoint(i, j, br->subj.name)) return true;
      }
    }
  }
  return false;
}

} // namespace sess2gts
