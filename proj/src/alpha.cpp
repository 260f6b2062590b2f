#include "sess2gts/alpha.hpp"

#include <functional>

namespace sess2gts {

bool NameBij::relate(const std::string& a, const std::string& b) {
  auto f = fwd.find(a);
  if (f != fwd.end()) return f->second == b;
  auto g = bwd.find(b);
  if (g != bwd.end()) return false;
  fwd[a] = b;
  bwd[b] = a;
  return true;
}

namespace {

// Matching context: bound names are matched through the binder maps;
// free names must be identical unless both sides are flexible, in which
// case they go through the (extending) bijection.
class AlphaCtx {
 public:
  explicit AlphaCtx(NameBij* bij) : bij_(bij) {}

  bool names(const std::string& a, const std::string& b) {
    auto it = l2r_.find(a);
    auto jt = r2l_.find(b);
    if (it != l2r_.end() || jt != r2l_.end())
      return it != l2r_.end() && jt != r2l_.end() && it->second == b && jt->second == a;
    if (bij_) {
      bool fa = bij_->flex_left.count(a) > 0;
      bool fb = bij_->flex_right.count(b) > 0;
      if (fa != fb) return false;
      if (fa) return bij_->relate(a, b);
    }
    return a == b;
  }

  template <typename F>
  bool with_binder(const std::string& x, const std::string& y, F body) {
    auto oldx = stash(l2r_, x);
    auto oldy = stash(r2l_, y);
    l2r_[x] = y;
    r2l_[y] = x;
    bool ok = body();
    restore(l2r_, x, oldx);
    restore(r2l_, y, oldy);
    return ok;
  }

  template <typename F>
  bool with_binders(const std::vector<std::string>& xs, const std::vector<std::string>& ys,
                    std::size_t i, F body) {
    if (i == xs.size()) return body();
    return with_binder(xs[i], ys[i], [&] { return with_binders(xs, ys, i + 1, body); });
  }

 private:
  static std::optional<std::string> stash(std::map<std::string, std::string>& m,
                                          const std::string& k) {
    auto it = m.find(k);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }
  static void restore(std::map<std::string, std::string>& m, const std::string& k,
                      const std::optional<std::string>& old) {
    if (old) m[k] = *old;
    else m.erase(k);
  }

  std::map<std::string, std::string> l2r_;
  std::map<std::string, std::string> r2l_;
  NameBij* bij_;
};

bool expr_match(AlphaCtx& cx, const ExprPtr& a, const ExprPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (auto* i = std::get_if<Expr::IntLit>(&a->node))
    return i->value == std::get<Expr::IntLit>(b->node).value;
  if (auto* x = std::get_if<Expr::BoolLit>(&a->node))
    return x->value == std::get<Expr::BoolLit>(b->node).value;
  if (auto* v = std::get_if<Expr::Var>(&a->node))
    return cx.names(v->name, std::get<Expr::Var>(b->node).name);
  auto& e = std::get<Expr::Eq>(a->node);
  auto& f = std::get<Expr::Eq>(b->node);
  return e.rhs == f.rhs && expr_match(cx, e.lhs, f.lhs);
}

bool chan_match(AlphaCtx& cx, const Chan& a, const Chan& b) {
  return a.pol == b.pol && cx.names(a.name, b.name);
}

bool sp_match(AlphaCtx& cx, const SessionProcPtr& a, const SessionProcPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<SessionProc::Nil>(a->node)) return true;
  if (auto* p = std::get_if<SessionProc::Par>(&a->node)) {
    auto& q = std::get<SessionProc::Par>(b->node);
    return sp_match(cx, p->left, q.left) && sp_match(cx, p->right, q.right);
  }
  if (auto* r = std::get_if<SessionProc::Res>(&a->node)) {
    auto& s = std::get<SessionProc::Res>(b->node);
    if (r->ann.has_value() != s.ann.has_value()) return false;
    if (r->ann && !st_eq(*r->ann, *s.ann)) return false;
    return cx.with_binder(r->name, s.name, [&] { return sp_match(cx, r->body, s.body); });
  }
  if (auto* r = std::get_if<SessionProc::Repl>(&a->node))
    return sp_match(cx, r->body, std::get<SessionProc::Repl>(b->node).body);
  if (auto* o = std::get_if<SessionProc::Out>(&a->node)) {
    auto& u = std::get<SessionProc::Out>(b->node);
    if (!chan_match(cx, o->subj, u.subj)) return false;
    if (o->payload.index() != u.payload.index()) return false;
    if (auto* c = std::get_if<Chan>(&o->payload)) {
      if (!chan_match(cx, *c, std::get<Chan>(u.payload))) return false;
    } else if (!expr_match(cx, std::get<ExprPtr>(o->payload), std::get<ExprPtr>(u.payload))) {
      return false;
    }
    return sp_match(cx, o->cont, u.cont);
  }
  if (auto* i = std::get_if<SessionProc::In>(&a->node)) {
    auto& j = std::get<SessionProc::In>(b->node);
    if (!chan_match(cx, i->subj, j.subj)) return false;
    return cx.with_binder(i->bound, j.bound, [&] { return sp_match(cx, i->cont, j.cont); });
  }
  if (auto* br = std::get_if<SessionProc::Branch>(&a->node)) {
    auto& bs = std::get<SessionProc::Branch>(b->node);
    if (!chan_match(cx, br->subj, bs.subj)) return false;
    if (br->arms.size() != bs.arms.size()) return false;
    for (std::size_t k = 0; k < br->arms.size(); ++k) {
      if (br->arms[k].first != bs.arms[k].first) return false;
      if (!sp_match(cx, br->arms[k].second, bs.arms[k].second)) return false;
    }
    return true;
  }
  auto& sel = std::get<SessionProc::Select>(a->node);
  auto& tel = std::get<SessionProc::Select>(b->node);
  return sel.label == tel.label && chan_match(cx, sel.subj, tel.subj) &&
         sp_match(cx, sel.cont, tel.cont);
}

bool gp_match(AlphaCtx& cx, const GenericProcPtr& a, const GenericProcPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<GenericProc::Nil>(a->node)) return true;
  if (auto* p = std::get_if<GenericProc::Par>(&a->node)) {
    auto& q = std::get<GenericProc::Par>(b->node);
    return gp_match(cx, p->left, q.left) && gp_match(cx, p->right, q.right);
  }
  if (auto* r = std::get_if<GenericProc::Res>(&a->node)) {
    auto& s = std::get<GenericProc::Res>(b->node);
    if (r->names.size() != s.names.size()) return false;
    return cx.with_binders(r->names, s.names, 0,
                           [&] { return gp_match(cx, r->body, s.body); });
  }
  if (auto* r = std::get_if<GenericProc::Repl>(&a->node))
    return gp_match(cx, r->body, std::get<GenericProc::Repl>(b->node).body);
  auto& sa = std::get<GenericProc::Sum>(a->node);
  auto& sb = std::get<GenericProc::Sum>(b->node);
  if (sa.arms.size() != sb.arms.size()) return false;
  for (std::size_t k = 0; k < sa.arms.size(); ++k) {
    const GuardedArm& x = sa.arms[k];
    const GuardedArm& y = sb.arms[k];
    if (x.input != y.input || !cx.names(x.chan, y.chan)) return false;
    if (x.input) {
      if (x.binders.size() != y.binders.size()) return false;
      if (!cx.with_binders(x.binders, y.binders, 0,
                           [&] { return gp_match(cx, x.cont, y.cont); }))
        return false;
    } else {
      if (x.args.size() != y.args.size()) return false;
      for (std::size_t m = 0; m < x.args.size(); ++m) {
        if (x.args[m].index() != y.args[m].index()) return false;
        if (auto* n = std::get_if<std::string>(&x.args[m])) {
          if (!cx.names(*n, std::get<std::string>(y.args[m]))) return false;
        } else if (!expr_match(cx, std::get<ExprPtr>(x.args[m]),
                               std::get<ExprPtr>(y.args[m]))) {
          return false;
        }
      }
      if (!gp_match(cx, x.cont, y.cont)) return false;
    }
  }
  return true;
}

bool pt_match(AlphaCtx& cx, const ProcessTypePtr& a, const ProcessTypePtr& b);

bool tpayload_match(AlphaCtx& cx, const TypePayload& a, const TypePayload& b) {
  if (a.index() != b.index()) return false;
  if (auto* ta = std::get_if<TupleType>(&a)) {
    auto& tb = std::get<TupleType>(b);
    if (ta->binders.size() != tb.binders.size()) return false;
    return cx.with_binders(ta->binders, tb.binders, 0,
                           [&] { return pt_match(cx, ta->body, tb.body); });
  }
  return std::get<std::vector<BaseType>>(a) == std::get<std::vector<BaseType>>(b);
}

bool pt_match(AlphaCtx& cx, const ProcessTypePtr& a, const ProcessTypePtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<ProcessType::Zero>(a->node)) return true;
  if (auto* p = std::get_if<ProcessType::Par>(&a->node)) {
    auto& q = std::get<ProcessType::Par>(b->node);
    return pt_match(cx, p->left, q.left) && pt_match(cx, p->right, q.right);
  }
  if (auto* o = std::get_if<ProcessType::OutPfx>(&a->node)) {
    auto& u = std::get<ProcessType::OutPfx>(b->node);
    return cx.names(o->chan, u.chan) && tpayload_match(cx, o->payload, u.payload) &&
           pt_match(cx, o->cont, u.cont);
  }
  if (auto* i = std::get_if<ProcessType::InPfx>(&a->node)) {
    auto& j = std::get<ProcessType::InPfx>(b->node);
    return cx.names(i->chan, j.chan) && tpayload_match(cx, i->payload, j.payload) &&
           pt_match(cx, i->cont, j.cont);
  }
  if (auto* t = std::get_if<ProcessType::TauPfx>(&a->node))
    return pt_match(cx, t->cont, std::get<ProcessType::TauPfx>(b->node).cont);
  if (auto* c = std::get_if<ProcessType::IntChoice>(&a->node)) {
    auto& d = std::get<ProcessType::IntChoice>(b->node);
    return pt_match(cx, c->left, d.left) && pt_match(cx, c->right, d.right);
  }
  if (auto* e = std::get_if<ProcessType::ExtChoice>(&a->node)) {
    auto& f = std::get<ProcessType::ExtChoice>(b->node);
    if (e->arms.size() != f.arms.size()) return false;
    for (std::size_t k = 0; k < e->arms.size(); ++k)
      if (!pt_match(cx, e->arms[k], f.arms[k])) return false;
    return true;
  }
  auto& r = std::get<ProcessType::Repl>(a->node);
  return pt_match(cx, r.body, std::get<ProcessType::Repl>(b->node).body);
}

// ---- free names -----------------------------------------------------------

struct Bound {
  std::map<std::string, int> depth;
  bool is_bound(const std::string& n) const {
    auto it = depth.find(n);
    return it != depth.end() && it->second > 0;
  }
  void push(const std::string& n) { ++depth[n]; }
  void pop(const std::string& n) { --depth[n]; }
};

void expr_fn(const ExprPtr& e, Bound& bound, std::set<std::string>& out) {
  if (auto* v = std::get_if<Expr::Var>(&e->node)) {
    if (!bound.is_bound(v->name)) out.insert(v->name);
  } else if (auto* q = std::get_if<Expr::Eq>(&e->node)) {
    expr_fn(q->lhs, bound, out);
  }
}

void sp_fn(const SessionProcPtr& p, Bound& bound, std::set<std::string>& out) {
  if (auto* par = std::get_if<SessionProc::Par>(&p->node)) {
    sp_fn(par->left, bound, out);
    sp_fn(par->right, bound, out);
  } else if (auto* res = std::get_if<SessionProc::Res>(&p->node)) {
    bound.push(res->name);
    sp_fn(res->body, bound, out);
    bound.pop(res->name);
  } else if (auto* rep = std::get_if<SessionProc::Repl>(&p->node)) {
    sp_fn(rep->body, bound, out);
  } else if (auto* o = std::get_if<SessionProc::Out>(&p->node)) {
    if (!bound.is_bound(o->subj.name)) out.insert(o->subj.name);
    if (auto* c = std::get_if<Chan>(&o->payload)) {
      if (!bound.is_bound(c->name)) out.insert(c->name);
    } else {
      expr_fn(std::get<ExprPtr>(o->payload), bound, out);
    }
    sp_fn(o->cont, bound, out);
  } else if (auto* i = std::get_if<SessionProc::In>(&p->node)) {
    if (!bound.is_bound(i->subj.name)) out.insert(i->subj.name);
    bound.push(i->bound);
    sp_fn(i->cont, bound, out);
    bound.pop(i->bound);
  } else if (auto* br = std::get_if<SessionProc::Branch>(&p->node)) {
    if (!bound.is_bound(br->subj.name)) out.insert(br->subj.name);
    for (const auto& [l, body] : br->arms) sp_fn(body, bound, out);
  } else if (auto* sel = std::get_if<SessionProc::Select>(&p->node)) {
    if (!bound.is_bound(sel->subj.name)) out.insert(sel->subj.name);
    sp_fn(sel->cont, bound, out);
  }
}

void gp_fn(const GenericProcPtr& p, Bound& bound, std::set<std::string>& out) {
  if (auto* par = std::get_if<GenericProc::Par>(&p->node)) {
    gp_fn(par->left, bound, out);
    gp_fn(par->right, bound, out);
  } else if (auto* res = std::get_if<GenericProc::Res>(&p->node)) {
    for (const auto& n : res->names) bound.push(n);
    gp_fn(res->body, bound, out);
    for (const auto& n : res->names) bound.pop(n);
  } else if (auto* rep = std::get_if<GenericProc::Repl>(&p->node)) {
    gp_fn(rep->body, bound, out);
  } else if (auto* sum = std::get_if<GenericProc::Sum>(&p->node)) {
    for (const auto& arm : sum->arms) {
      if (!bound.is_bound(arm.chan)) out.insert(arm.chan);
      if (arm.input) {
        for (const auto& b : arm.binders) bound.push(b);
        gp_fn(arm.cont, bound, out);
        for (const auto& b : arm.binders) bound.pop(b);
      } else {
        for (const auto& a : arm.args) {
          if (auto* n = std::get_if<std::string>(&a)) {
            if (!bound.is_bound(*n)) out.insert(*n);
          } else {
            expr_fn(std::get<ExprPtr>(a), bound, out);
          }
        }
        gp_fn(arm.cont, bound, out);
      }
    }
  }
}

void pt_fn(const ProcessTypePtr& t, Bound& bound, std::set<std::string>& out);

void tpayload_fn(const TypePayload& p, Bound& bound, std::set<std::string>& out) {
  if (auto* tup = std::get_if<TupleType>(&p)) {
    for (const auto& b : tup->binders) bound.push(b);
    pt_fn(tup->body, bound, out);
    for (const auto& b : tup->binders) bound.pop(b);
  }
}

void pt_fn(const ProcessTypePtr& t, Bound& bound, std::set<std::string>& out) {
  if (auto* par = std::get_if<ProcessType::Par>(&t->node)) {
    pt_fn(par->left, bound, out);
    pt_fn(par->right, bound, out);
  } else if (auto* o = std::get_if<ProcessType::OutPfx>(&t->node)) {
    if (!bound.is_bound(o->chan)) out.insert(o->chan);
    tpayload_fn(o->payload, bound, out);
    pt_fn(o->cont, bound, out);
  } else if (auto* i = std::get_if<ProcessType::InPfx>(&t->node)) {
    if (!bound.is_bound(i->chan)) out.insert(i->chan);
    tpayload_fn(i->payload, bound, out);
    pt_fn(i->cont, bound, out);
  } else if (auto* tau = std::get_if<ProcessType::TauPfx>(&t->node)) {
    pt_fn(tau->cont, bound, out);
  } else if (auto* c = std::get_if<ProcessType::IntChoice>(&t->node)) {
    pt_fn(c->left, bound, out);
    pt_fn(c->right, bound, out);
  } else if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    for (const auto& arm : e->arms) pt_fn(arm, bound, out);
  } else if (auto* r = std::get_if<ProcessType::Repl>(&t->node)) {
    pt_fn(r->body, bound, out);
  }
}

void expr_pols(const ExprPtr& e, const std::string& name, Bound& bound,
               std::set<Polarity>& out) {
  if (auto* v = std::get_if<Expr::Var>(&e->node)) {
    if (v->name == name && !bound.is_bound(name)) out.insert(Polarity::None);
  } else if (auto* q = std::get_if<Expr::Eq>(&e->node)) {
    expr_pols(q->lhs, name, bound, out);
  }
}

void sp_pols(const SessionProcPtr& p, const std::string& name, Bound& bound,
             std::set<Polarity>& out) {
  auto hit = [&](const Chan& c) {
    if (c.name == name && !bound.is_bound(name)) out.insert(c.pol);
  };
  if (auto* par = std::get_if<SessionProc::Par>(&p->node)) {
    sp_pols(par->left, name, bound, out);
    sp_pols(par->right, name, bound, out);
  } else if (auto* res = std::get_if<SessionProc::Res>(&p->node)) {
    bound.push(res->name);
    sp_pols(res->body, name, bound, out);
    bound.pop(res->name);
  } else if (auto* rep = std::get_if<SessionProc::Repl>(&p->node)) {
    sp_pols(rep->body, name, bound, out);
  } else if (auto* o = std::get_if<SessionProc::Out>(&p->node)) {
    hit(o->subj);
    if (auto* c = std::get_if<Chan>(&o->payload)) hit(*c);
    else expr_pols(std::get<ExprPtr>(o->payload), name, bound, out);
    sp_pols(o->cont, name, bound, out);
  } else if (auto* i = std::get_if<SessionProc::In>(&p->node)) {
    hit(i->subj);
    bound.push(i->bound);
    sp_pols(i->cont, name, bound, out);
    bound.pop(i->bound);
  } else if (auto* br = std::get_if<SessionProc::Branch>(&p->node)) {
    hit(br->subj);
    for (const auto& [l, body] : br->arms) sp_pols(body, name, bound, out);
  } else if (auto* sel = std::get_if<SessionProc::Select>(&p->node)) {
    hit(sel->subj);
    sp_pols(sel->cont, name, bound, out);
  }
}

} // namespace

bool alpha_eq(const SessionProcPtr& a, const SessionProcPtr& b) {
  AlphaCtx cx(nullptr);
  return sp_match(cx, a, b);
}
bool alpha_eq(const GenericProcPtr& a, const GenericProcPtr& b) {
  AlphaCtx cx(nullptr);
  return gp_match(cx, a, b);
}
bool alpha_eq(const ProcessTypePtr& a, const ProcessTypePtr& b) {
  AlphaCtx cx(nullptr);
  return pt_match(cx, a, b);
}
bool alpha_eq(const TypePayload& a, const TypePayload& b) {
  AlphaCtx cx(nullptr);
  return tpayload_match(cx, a, b);
}

bool alpha_eq_flex(const SessionProcPtr& a, const SessionProcPtr& b, NameBij& bij) {
  AlphaCtx cx(&bij);
  return sp_match(cx, a, b);
}
bool alpha_eq_flex(const GenericProcPtr& a, const GenericProcPtr& b, NameBij& bij) {
  AlphaCtx cx(&bij);
  return gp_match(cx, a, b);
}
bool alpha_eq_flex(const ProcessTypePtr& a, const ProcessTypePtr& b, NameBij& bij) {
  AlphaCtx cx(&bij);
  return pt_match(cx, a, b);
}

std::set<std::string> free_names(const SessionProcPtr& p) {
  Bound bound;
  std::set<std::string> out;
  sp_fn(p, bound, out);
  return out;
}
std::set<std::string> free_names(const GenericProcPtr& p) {
  Bound bound;
  std::set<std::string> out;
  gp_fn(p, bound, out);
  return out;
}
std::set<std::string> free_names(const ProcessTypePtr& t) {
  Bound bound;
  std::set<std::string> out;
  pt_fn(t, bound, out);
  return out;
}

std::set<Polarity> free_polarities(const SessionProcPtr& p, const std::string& name) {
  Bound bound;
  std::set<Polarity> out;
  sp_pols(p, name, bound, out);
  return out;
}

namespace {

void expr_all(const ExprPtr& e, std::set<std::string>& out) {
  if (auto* v = std::get_if<Expr::Var>(&e->node)) out.insert(v->name);
  else if (auto* q = std::get_if<Expr::Eq>(&e->node)) expr_all(q->lhs, out);
}

void sp_all(const SessionProcPtr& p, std::set<std::string>& out) {
  if (auto* par = std::get_if<SessionProc::Par>(&p->node)) {
    sp_all(par->left, out);
    sp_all(par->right, out);
  } else if (auto* res = std::get_if<SessionProc::Res>(&p->node)) {
    out.insert(res->name);
    sp_all(res->body, out);
  } else if (auto* rep = std::get_if<SessionProc::Repl>(&p->node)) {
    sp_all(rep->body, out);
  } else if (auto* o = std::get_if<SessionProc::Out>(&p->node)) {
    out.insert(o->subj.name);
    if (auto* c = std::get_if<Chan>(&o->payload)) out.insert(c->name);
    else expr_all(std::get<ExprPtr>(o->payload), out);
    sp_all(o->cont, out);
  } else if (auto* i = std::get_if<SessionProc::In>(&p->node)) {
    out.insert(i->subj.name);
    out.insert(i->bound);
    sp_all(i->cont, out);
  } else if (auto* br = std::get_if<SessionProc::Branch>(&p->node)) {
    out.insert(br->subj.name);
    for (const auto& [l, body] : br->arms) sp_all(body, out);
  } else if (auto* sel = std::get_if<SessionProc::Select>(&p->node)) {
    out.insert(sel->subj.name);
    sp_all(sel->cont, out);
  }
}

void gp_all(const GenericProcPtr& p, std::set<std::string>& out) {
  if (auto* par = std::get_if<GenericProc::Par>(&p->node)) {
    gp_all(par->left, out);
    gp_all(par->right, out);
  } else if (auto* res = std::get_if<GenericProc::Res>(&p->node)) {
    for (const auto& n : res->names) out.insert(n);
    gp_all(res->body, out);
  } else if (auto* rep = std::get_if<GenericProc::Repl>(&p->node)) {
    gp_all(rep->body, out);
  } else if (auto* sum = std::get_if<GenericProc::Sum>(&p->node)) {
    for (const auto& arm : sum->arms) {
      out.insert(arm.chan);
      for (const auto& b : arm.binders) out.insert(b);
      for (const auto& a : arm.args) {
        if (auto* n = std::get_if<std::string>(&a)) out.insert(*n);
        else expr_all(std::get<ExprPtr>(a), out);
      }
      gp_all(arm.cont, out);
    }
  }
}

void pt_all(const ProcessTypePtr& t, std::set<std::string>& out);

void tpayload_all(const TypePayload& p, std::set<std::string>& out) {
  if (auto* tup = std::get_if<TupleType>(&p)) {
    for (const auto& b : tup->binders) out.insert(b);
    pt_all(tup->body, out);
  }
}

void pt_all(const ProcessTypePtr& t, std::set<std::string>& out) {
  if (auto* par = std::get_if<ProcessType::Par>(&t->node)) {
    pt_all(par->left, out);
    pt_all(par->right, out);
  } else if (auto* o = std::get_if<ProcessType::OutPfx>(&t->node)) {
    out.insert(o->chan);
    tpayload_all(o->payload, out);
    pt_all(o->cont, out);
  } else if (auto* i = std::get_if<ProcessType::InPfx>(&t->node)) {
    out.insert(i->chan);
    tpayload_all(i->payload, out);
    pt_all(i->cont, out);
  } else if (auto* tau = std::get_if<ProcessType::TauPfx>(&t->node)) {
    pt_all(tau->cont, out);
  } else if (auto* c = std::get_if<ProcessType::IntChoice>(&t->node)) {
    pt_all(c->left, out);
    pt_all(c->right, out);
  } else if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    for (const auto& arm : e->arms) pt_all(arm, out);
  } else if (auto* r = std::get_if<ProcessType::Repl>(&t->node)) {
    pt_all(r->body, out);
  }
}

} // namespace

std::set<std::string> all_names(const SessionProcPtr& p) {
  std::set<std::string> out;
  sp_all(p, out);
  return out;
}
std::set<std::string> all_names(const GenericProcPtr& p) {
  std::set<std::string> out;
  gp_all(p, out);
  return out;
}
std::set<std::string> all_names(const ProcessTypePtr& t) {
  std::set<std::string> out;
  pt_all(t, out);
  return out;
}

} // namespace sess2gts
