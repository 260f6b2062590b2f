#include "sess2gts/generic_dynamics.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "sess2gts/alpha.hpp"
#include "struct_engine.hpp"

namespace sess2gts {

namespace {

using GSubst = std::map<std::string, GArg>;

std::set<std::string> arg_names(const GArg& a) {
  std::set<std::string> out;
  if (auto* nm = std::get_if<std::string>(&a)) {
    out.insert(*nm);
  } else {
    std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
      if (auto* var = std::get_if<Expr::Var>(&e->node)) out.insert(var->name);
      else if (auto* q = std::get_if<Expr::Eq>(&e->node)) walk(q->lhs);
    };
    walk(std::get<ExprPtr>(a));
  }
  return out;
}

ExprPtr gsubst_expr(const ExprPtr& e, const GSubst& sub) {
  if (auto* v = std::get_if<Expr::Var>(&e->node)) {
    auto it = sub.find(v->name);
    if (it == sub.end()) return e;
    if (auto* nm = std::get_if<std::string>(&it->second)) return mk_var(*nm);
    return std::get<ExprPtr>(it->second);
  }
  if (auto* q = std::get_if<Expr::Eq>(&e->node)) {
    ExprPtr lhs = gsubst_expr(q->lhs, sub);
    if (auto* i = std::get_if<Expr::IntLit>(&lhs->node)) return mk_bool(i->value == q->rhs);
    // an ill-typed closed comparison collapses rather than sticking around
    if (std::holds_alternative<Expr::BoolLit>(lhs->node)) return mk_bool(false);
    if (lhs == q->lhs) return e;
    return mk_eq(lhs, q->rhs);
  }
  return e;
}

struct GSubstituter {
  FreshSupply fs;
  std::set<std::string> valnames;

  std::string subject(const std::string& c, const GSubst& sub) {
    auto it = sub.find(c);
    if (it == sub.end()) return c;
    if (auto* nm = std::get_if<std::string>(&it->second)) return *nm;
    return c; // value in subject position: ill-typed, left stuck
  }

  GArg arg(const GArg& a, const GSubst& sub) {
    if (auto* nm = std::get_if<std::string>(&a)) {
      auto it = sub.find(*nm);
      if (it == sub.end()) return a;
      return it->second;
    }
    return GArg{gsubst_expr(std::get<ExprPtr>(a), sub)};
  }

  GenericProcPtr go(const GenericProcPtr& p, const GSubst& sub) {
    if (sub.empty()) return p;
    if (std::holds_alternative<GenericProc::Nil>(p->node)) return p;
    if (auto* par = std::get_if<GenericProc::Par>(&p->node))
      return gp_par(go(par->left, sub), go(par->right, sub));
    if (auto* res = std::get_if<GenericProc::Res>(&p->node)) {
      auto [names, body] = freshen(res->names, res->body, sub);
      GSubst inner = sub;
      for (const auto& n : names) inner.erase(n);
      return gp_res(std::move(names), go(body, inner));
    }
    if (auto* rep = std::get_if<GenericProc::Repl>(&p->node))
      return gp_repl(go(rep->body, sub));
    auto& sum = std::get<GenericProc::Sum>(p->node);
    std::vector<GuardedArm> arms;
    for (const auto& a : sum.arms) {
      GuardedArm na;
      na.input = a.input;
      na.chan = subject(a.chan, sub);
      if (a.input) {
        auto [binders, cont] = freshen(a.binders, a.cont, sub);
        GSubst inner = sub;
        for (const auto& n : binders) inner.erase(n);
        na.binders = std::move(binders);
        na.cont = go(cont, inner);
      } else {
        for (const auto& g : a.args) na.args.push_back(arg(g, sub));
        na.cont = go(a.cont, sub);
      }
      arms.push_back(std::move(na));
    }
    return gp_sum(std::move(arms));
  }

 private:
  // Rename binders a substituted value could capture.
  std::pair<std::vector<std::string>, GenericProcPtr> freshen(
      const std::vector<std::string>& names, const GenericProcPtr& body,
      const GSubst& sub) {
    bool live = false;
    for (const auto& [k, v] : sub)
      if (!std::count(names.begin(), names.end(), k)) live = true;
    GSubst ren;
    std::vector<std::string> out = names;
    if (live)
      for (auto& n : out)
        if (valnames.count(n)) {
          std::string nm = fs.fresh(n);
          ren[n] = GArg{nm};
          n = nm;
        }
    if (ren.empty()) return {out, body};
    return {out, go(body, ren)};
  }
};

GenericProcPtr apply_gsubst(const GenericProcPtr& p, const GSubst& sub) {
  GSubstituter s;
  for (const auto& n : all_names(p)) s.fs.observe(n);
  for (const auto& [k, v] : sub) {
    auto ns = arg_names(v);
    s.valnames.insert(ns.begin(), ns.end());
    for (const auto& n : ns) s.fs.observe(n);
  }
  return s.go(p, sub);
}

// Plain renaming for prenex freshening.
GenericProcPtr rename_free(const GenericProcPtr& p, const std::string& from,
                           const std::string& to) {
  GSubst sub;
  sub[from] = GArg{to};
  return apply_gsubst(p, sub);
}

void collect_prenex(const GenericProcPtr& p, GenericPrenex& out,
                    std::set<std::string>& taken, FreshSupply& fs) {
  if (std::holds_alternative<GenericProc::Nil>(p->node)) return;
  if (auto* par = std::get_if<GenericProc::Par>(&p->node)) {
    collect_prenex(par->left, out, taken, fs);
    collect_prenex(par->right, out, taken, fs);
    return;
  }
  if (auto* res = std::get_if<GenericProc::Res>(&p->node)) {
    GenericProcPtr body = res->body;
    for (const auto& name : res->names) {
      std::string nm = name;
      if (taken.count(nm)) {
        nm = fs.fresh(name);
        body = rename_free(body, name, nm);
      }
      taken.insert(nm);
      out.binders.push_back(nm);
    }
    collect_prenex(body, out, taken, fs);
    return;
  }
  if (auto* rep = std::get_if<GenericProc::Repl>(&p->node)) {
    if (std::holds_alternative<GenericProc::Nil>(rep->body->node)) return; // !0
    out.threads.push_back(p);
    return;
  }
  out.threads.push_back(p);
}

bool is_repl(const GenericProcPtr& p) {
  return std::holds_alternative<GenericProc::Repl>(p->node);
}

} // namespace

GenericProcPtr subst_generic(const GenericProcPtr& p,
                             const std::vector<std::string>& binders,
                             const std::vector<GArg>& args) {
  if (binders.size() != args.size())
    throw std::invalid_argument("substitution arity mismatch: " +
                                std::to_string(binders.size()) + " names, " +
                                std::to_string(args.size()) + " values");
  GSubst sub;
  for (std::size_t i = 0; i < binders.size(); ++i) sub[binders[i]] = args[i];
  return apply_gsubst(p, sub);
}

GenericPrenex generic_prenex(const GenericProcPtr& p) {
  GenericPrenex out;
  std::set<std::string> taken = free_names(p);
  FreshSupply fs;
  for (const auto& n : all_names(p)) fs.observe(n);
  collect_prenex(p, out, taken, fs);
  return out;
}

GenericProcPtr rebuild(const GenericPrenex& f) {
  GenericProcPtr body = nullptr;
  for (const auto& t : f.threads) body = body ? gp_par(body, t) : t;
  if (!body) body = gp_nil();
  if (!f.binders.empty()) body = gp_res(f.binders, body);
  return body;
}

// ---------------------------------------------------------------------------
// Structural preorder
// ---------------------------------------------------------------------------

Verdict struct_leq(const GenericProcPtr& a, const GenericProcPtr& b,
                   const StructOptions& opts) {
  GenericPrenex pa = generic_prenex(a);
  GenericPrenex pb = generic_prenex(b);
  FreshSupply fs;
  std::set<std::string> taken = all_names(a);
  for (const auto& n : all_names(b)) taken.insert(n);
  for (const auto& n : taken) fs.observe(n);
  LeqEngine<GenericProcPtr> eng{
      opts,
      [&fs, &taken](const GenericProcPtr& repl)
          -> std::optional<EngCopy<GenericProcPtr>> {
        const auto& body = std::get<GenericProc::Repl>(repl->node).body;
        GenericPrenex pre = generic_prenex(body);
        EngCopy<GenericProcPtr> cp;
        cp.threads = pre.threads;
        for (const auto& bd : pre.binders) {
          std::string nm = fs.fresh(bd);
          taken.insert(nm);
          for (auto& t : cp.threads) t = rename_free(t, bd, nm);
          cp.binders.push_back(nm);
        }
        if (cp.threads.empty()) return std::nullopt; // contributes nothing
        return cp;
      },
      [](const GenericProcPtr& p) { return is_repl(p); }};
  NameBij bij;
  for (const auto& bd : pa.binders) bij.flex_left.insert(bd);
  for (const auto& bd : pb.binders) bij.flex_right.insert(bd);
  if (eng.search(pa.threads, pb.threads, std::move(bij), {}, 0)) return Verdict::Yes;
  if (eng.budget_hit || eng.exhausted) return Verdict::Unknown;
  return Verdict::No;
}

Verdict struct_equiv(const GenericProcPtr& a, const GenericProcPtr& b,
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

// A state with replications unfolded: base threads plus chunks of copied
// threads, each chunk remembering its parent so a reduct can re-materialize
// exactly the copies it touched.
struct GExposed {
  GenericPrenex base;
  struct Chunk {
    int parent;
    std::size_t origin;
    std::vector<std::string> binders;
    std::vector<GenericProcPtr> threads;
  };
  std::vector<Chunk> chunks;
  struct Slot {
    int chunk; // -1 = base
    std::size_t idx;
    GenericProcPtr proc;
  };
  std::vector<Slot> slots;
};

GExposed gexpose(const GenericProcPtr& p, int depth, int copies) {
  GExposed ex;
  ex.base = generic_prenex(p);
  FreshSupply fs;
  std::set<std::string> taken = all_names(p);
  for (const auto& n : taken) fs.observe(n);

  auto spawn = [&](const GenericProcPtr& repl, int parent, std::size_t origin) {
    const auto& body = std::get<GenericProc::Repl>(repl->node).body;
    GExposed::Chunk c;
    c.parent = parent;
    c.origin = origin;
    GenericPrenex pre = generic_prenex(body);
    c.threads = pre.threads;
    for (const auto& b : pre.binders) {
      std::string nm = fs.fresh(b);
      taken.insert(nm);
      for (auto& t : c.threads) t = rename_free(t, b, nm);
      c.binders.push_back(nm);
    }
    return c;
  };

  std::vector<std::pair<int, std::size_t>> frontier; // (chunk idx, level)
  for (std::size_t i = 0; i < ex.base.threads.size(); ++i) {
    if (is_repl(ex.base.threads[i])) {
      for (int k = 0; k < copies; ++k) {
        ex.chunks.push_back(spawn(ex.base.threads[i], -1, i));
        frontier.push_back({static_cast<int>(ex.chunks.size()) - 1, 2});
      }
    }
  }
  for (std::size_t f = 0; f < frontier.size(); ++f) {
    auto [ci, level] = frontier[f];
    if (static_cast<int>(level) > depth) continue;
    for (std::size_t i = 0; i < ex.chunks[ci].threads.size(); ++i) {
      if (is_repl(ex.chunks[ci].threads[i])) {
        for (int k = 0; k < copies; ++k) {
          ex.chunks.push_back(spawn(ex.chunks[ci].threads[i], ci, i));
          frontier.push_back({static_cast<int>(ex.chunks.size()) - 1, level + 1});
        }
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

// Chunks needed to materialize a slot, outermost first.
std::vector<int> chunk_closure(const GExposed& ex, int chunk) {
  std::vector<int> out;
  for (int c = chunk; c != -1; c = ex.chunks[c].parent) out.push_back(c);
  std::reverse(out.begin(), out.end());
  return out;
}

GenericProcPtr build_reduct(const GExposed& ex, const GExposed::Slot& sin,
                            const GExposed::Slot& sout,
                            const std::vector<GenericProcPtr>& conts) {
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

  GenericPrenex out;
  out.binders = ex.base.binders;
  for (int c : involved)
    for (const auto& b : ex.chunks[c].binders) out.binders.push_back(b);

  for (std::size_t i = 0; i < ex.base.threads.size(); ++i)
    if (!consumed(-1, i)) out.threads.push_back(ex.base.threads[i]);
  for (int c : involved)
    for (std::size_t i = 0; i < ex.chunks[c].threads.size(); ++i)
      if (!consumed(c, i)) out.threads.push_back(ex.chunks[c].threads[i]);
  for (const auto& k : conts) out.threads.push_back(k);

  return rebuild(generic_prenex(rebuild(out)));
}

} // namespace

std::string redex_str(const GenericRedex& r) {
  return "com " + r.chan + " /" + std::to_string(r.arity);
}

std::vector<std::pair<GenericRedex, GenericProcPtr>> reduce_generic(
    const GenericProcPtr& p, const StructOptions& opts) {
  (void)opts;
  GExposed ex = gexpose(p, 2, 1);
  std::set<std::string> bound_names(ex.base.binders.begin(),
                                    ex.base.binders.end());
  for (const auto& c : ex.chunks)
    for (const auto& b : c.binders) bound_names.insert(b);

  std::vector<std::pair<GenericRedex, GenericProcPtr>> out;
  for (std::size_t i = 0; i < ex.slots.size(); ++i) {
    auto* si = std::get_if<GenericProc::Sum>(&ex.slots[i].proc->node);
    if (!si) continue;
    for (std::size_t j = 0; j < ex.slots.size(); ++j) {
      if (i == j) continue;
      auto* sj = std::get_if<GenericProc::Sum>(&ex.slots[j].proc->node);
      if (!sj) continue;
      for (const auto& ia : si->arms) {
        if (!ia.input) continue;
        for (const auto& oa : sj->arms) {
          if (oa.input || oa.chan != ia.chan) continue;
          if (oa.args.size() != ia.binders.size()) continue; // mismatch: no step
          GenericRedex r;
          r.chan = ia.chan;
          r.arity = oa.args.size();
          r.chan_bound = bound_names.count(r.chan) > 0;
          r.pos_in = i;
          r.pos_out = j;
          GenericProcPtr cont_in = subst_generic(ia.cont, ia.binders, oa.args);
          out.emplace_back(
              r, build_reduct(ex, ex.slots[i], ex.slots[j], {cont_in, oa.cont}));
        }
      }
    }
  }
  return out;
}

bool is_generic_error(const GenericProcPtr& p) {
  // Two copies per replication: a race between a replication and itself
  // (e.g. a replicated send) needs two unfoldings to show up.
  GExposed ex = gexpose(p, 3, 2);
  for (std::size_t i = 0; i < ex.slots.size(); ++i) {
    auto* si = std::get_if<GenericProc::Sum>(&ex.slots[i].proc->node);
    if (!si) continue;
    for (std::size_t j = i + 1; j < ex.slots.size(); ++j) {
      auto* sj = std::get_if<GenericProc::Sum>(&ex.slots[j].proc->node);
      if (!sj) continue;
      for (const auto& a : si->arms) {
        for (const auto& b : sj->arms) {
          if (a.chan != b.chan) continue;
          if (a.input == b.input) return true; // parallel sends or receives
          const auto& in = a.input ? a : b;
          const auto& os = a.input ? b : a;
          if (in.binders.size() != os.args.size()) return true; // arity
        }
      }
    }
  }
  return false;
}

} // namespace sess2gts
