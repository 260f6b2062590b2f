#include "sess2gts/session_typing.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <stdexcept>

#include "sess2gts/alpha.hpp"
#include "sess2gts/print.hpp"
#include "sess2gts/session_dynamics.hpp"

namespace sess2gts {

SessionTypePtr dual(const SessionTypePtr& s) {
  if (std::holds_alternative<SessionType::End>(s->node)) return s;
  if (std::holds_alternative<SessionType::Base>(s->node))
    throw std::invalid_argument("a base type has no dual");
  if (auto* in = std::get_if<SessionType::In>(&s->node))
    return st_out(in->payload, dual(in->cont));
  if (auto* out = std::get_if<SessionType::Out>(&s->node))
    return st_in(out->payload, dual(out->cont));
  if (auto* br = std::get_if<SessionType::Branch>(&s->node)) {
    std::vector<LabelArm> arms;
    for (const auto& [l, t] : br->arms) arms.emplace_back(l, dual(t));
    return st_choice(std::move(arms));
  }
  auto& ch = std::get<SessionType::Choice>(s->node);
  std::vector<LabelArm> arms;
  for (const auto& [l, t] : ch.arms) arms.emplace_back(l, dual(t));
  return st_branch(std::move(arms));
}

bool subtype_session(const SessionTypePtr& a, const SessionTypePtr& b) {
  if (std::holds_alternative<SessionType::End>(a->node))
    return std::holds_alternative<SessionType::End>(b->node);
  if (auto* ba = std::get_if<SessionType::Base>(&a->node)) {
    auto* bb = std::get_if<SessionType::Base>(&b->node);
    return bb && ba->base == bb->base;
  }
  if (auto* ia = std::get_if<SessionType::In>(&a->node)) {
    auto* ib = std::get_if<SessionType::In>(&b->node);
    return ib && subtype_session(ia->payload, ib->payload) &&
           subtype_session(ia->cont, ib->cont);
  }
  if (auto* oa = std::get_if<SessionType::Out>(&a->node)) {
    auto* ob = std::get_if<SessionType::Out>(&b->node);
    // payload contravariant, continuation covariant
    return ob && subtype_session(ob->payload, oa->payload) &&
           subtype_session(oa->cont, ob->cont);
  }
  if (auto* bra = std::get_if<SessionType::Branch>(&a->node)) {
    auto* brb = std::get_if<SessionType::Branch>(&b->node);
    if (!brb) return false;
    // every offered label must stay offered, continuations pointwise
    for (const auto& [l, ta] : bra->arms) {
      const SessionTypePtr* tb = nullptr;
      for (const auto& [lb, t] : brb->arms)
        if (lb == l) tb = &t;
      if (!tb || !subtype_session(ta, *tb)) return false;
    }
    return true;
  }
  auto& cha = std::get<SessionType::Choice>(a->node);
  auto* chb = std::get_if<SessionType::Choice>(&b->node);
  if (!chb) return false;
  // the wider selection is the subtype
  for (const auto& [l, tb] : chb->arms) {
    const SessionTypePtr* ta = nullptr;
    for (const auto& [la, t] : cha.arms)
      if (la == l) ta = &t;
    if (!ta || !subtype_session(*ta, tb)) return false;
  }
  return true;
}

bool is_balanced(const TypeEnv& env) {
  for (const auto& e : env.entries()) {
    if (e.pol != Polarity::Plus) continue;
    const SessionTypePtr* other = env.lookup(e.name, Polarity::Minus);
    if (!other) continue;
    if (std::holds_alternative<SessionType::Base>((*other)->node)) return false;
    if (!st_eq(e.type, dual(*other))) return false;
  }
  return true;
}

namespace {

bool polarity_clash(const TypeEnv& env, const std::string& name, Polarity pol) {
  if (pol == Polarity::None)
    return env.contains(name, Polarity::Plus) ||
           env.contains(name, Polarity::Minus);
  return env.contains(name, Polarity::None);
}

} // namespace

std::optional<TypeEnv> env_extend(TypeEnv env, const std::string& name,
                                  Polarity pol, const SessionTypePtr& s) {
  if (const SessionTypePtr* have = env.lookup(name, pol)) {
    if (st_eq(*have, s)) return env; // identical binding is absorbed
    return std::nullopt;
  }
  if (polarity_clash(env, name, pol)) return std::nullopt;
  env.set(name, pol, s);
  return env;
}

std::optional<TypeEnv> env_plus(TypeEnv env, const std::string& name,
                                Polarity pol, const SessionTypePtr& s) {
  if (env.contains(name, pol)) return std::nullopt; // no absorption here
  if (pol == Polarity::None) {
    if (env.mentions_name(name)) return std::nullopt;
  } else {
    if (env.contains(name, Polarity::None)) return std::nullopt;
  }
  env.set(name, pol, s);
  return env;
}

std::optional<TypeEnv> env_advance(const TypeEnv& env, const std::string& name,
                                   Polarity pol, const std::string& label) {
  const SessionTypePtr* t = env.lookup(name, pol);
  if (!t) return std::nullopt;
  const std::vector<LabelArm>* arms = nullptr;
  if (auto* br = std::get_if<SessionType::Branch>(&(*t)->node)) arms = &br->arms;
  if (auto* ch = std::get_if<SessionType::Choice>(&(*t)->node)) arms = &ch->arms;
  if (!arms) return std::nullopt;
  for (const auto& [l, cont] : *arms) {
    if (l != label) continue;
    TypeEnv out = env;
    out.set(name, pol, cont);
    return out;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Checker
// ---------------------------------------------------------------------------

namespace {

struct CheckFail {
  std::string msg;
};

[[noreturn]] void fail(const std::string& msg) { throw CheckFail{msg}; }

struct Cell;
using CellRef = std::shared_ptr<Cell>;

// Head constructor of a (possibly partial) session type.
struct Shape {
  enum K { End, Base, In, Out, Branch, Choice } k = End;
  std::optional<BaseType> base; // for K::Base; nullopt = kind still open
  CellRef payload, cont;        // In/Out
  std::vector<std::pair<std::string, CellRef>> arms;
};

// Unification variable; shape filled in as constraints arrive.
struct Cell {
  std::optional<Shape> shape;
  CellRef alias;
};

CellRef fresh_cell() { return std::make_shared<Cell>(); }

CellRef find(CellRef c) {
  while (c->alias) c = c->alias;
  return c;
}

CellRef ground_cell(const SessionTypePtr& s) {
  auto c = fresh_cell();
  Shape sh;
  if (std::holds_alternative<SessionType::End>(s->node)) {
    sh.k = Shape::End;
  } else if (auto* b = std::get_if<SessionType::Base>(&s->node)) {
    sh.k = Shape::Base;
    sh.base = b->base;
  } else if (auto* in = std::get_if<SessionType::In>(&s->node)) {
    sh.k = Shape::In;
    sh.payload = ground_cell(in->payload);
    sh.cont = ground_cell(in->cont);
  } else if (auto* out = std::get_if<SessionType::Out>(&s->node)) {
    sh.k = Shape::Out;
    sh.payload = ground_cell(out->payload);
    sh.cont = ground_cell(out->cont);
  } else {
    const std::vector<LabelArm>* arms;
    if (auto* br = std::get_if<SessionType::Branch>(&s->node)) {
      sh.k = Shape::Branch;
      arms = &br->arms;
    } else {
      sh.k = Shape::Choice;
      arms = &std::get<SessionType::Choice>(s->node).arms;
    }
    for (const auto& [l, t] : *arms) sh.arms.emplace_back(l, ground_cell(t));
  }
  c->shape = std::move(sh);
  return c;
}

void unify(CellRef a, CellRef b, int depth = 0) {
  if (depth > 512) fail("cannot infer a type: constraints do not terminate");
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (!a->shape) {
    a->alias = b;
    return;
  }
  if (!b->shape) {
    b->alias = a;
    return;
  }
  Shape& sa = *a->shape;
  Shape& sb = *b->shape;
  if (sa.k != sb.k) fail("protocol mismatch: conflicting uses of a channel");
  switch (sa.k) {
    case Shape::End:
      break;
    case Shape::Base:
      if (sa.base && sb.base && *sa.base != *sb.base)
        fail("protocol mismatch: int vs bool");
      if (!sa.base) sa.base = sb.base;
      if (!sb.base) sb.base = sa.base;
      break;
    case Shape::In:
    case Shape::Out:
      unify(sa.payload, sb.payload, depth + 1);
      unify(sa.cont, sb.cont, depth + 1);
      break;
    case Shape::Branch:
    case Shape::Choice: {
      if (sa.arms.size() != sb.arms.size())
        fail("protocol mismatch: different label sets");
      for (std::size_t i = 0; i < sa.arms.size(); ++i) {
        if (sa.arms[i].first != sb.arms[i].first)
          fail("protocol mismatch: different label sets");
        unify(sa.arms[i].second, sb.arms[i].second, depth + 1);
      }
      break;
    }
  }
  b->alias = a;
}

// A view of a cell; `dualized` flips In/Out and Branch/Choice on read.
struct CEntry {
  CellRef cell;
  bool dualized = false;
};

// Fully resolved view, or nullopt while variables remain.
std::optional<SessionTypePtr> read_ground(const CEntry& e, int depth = 0) {
  if (depth > 512) return std::nullopt;
  CellRef c = find(e.cell);
  if (!c->shape) return std::nullopt;
  const Shape& s = *c->shape;
  switch (s.k) {
    case Shape::End:
      return st_end();
    case Shape::Base:
      if (e.dualized || !s.base) return std::nullopt;
      return st_base(*s.base);
    case Shape::In:
    case Shape::Out: {
      auto p = read_ground({s.payload, false}, depth + 1);
      auto k = read_ground({s.cont, e.dualized}, depth + 1);
      if (!p || !k) return std::nullopt;
      bool in = (s.k == Shape::In) != e.dualized;
      return in ? st_in(*p, *k) : st_out(*p, *k);
    }
    case Shape::Branch:
    case Shape::Choice: {
      std::vector<LabelArm> arms;
      for (const auto& [l, t] : s.arms) {
        auto g = read_ground({t, e.dualized}, depth + 1);
        if (!g) return std::nullopt;
        arms.emplace_back(l, *g);
      }
      bool br = (s.k == Shape::Branch) != e.dualized;
      return br ? st_branch(std::move(arms)) : st_choice(std::move(arms));
    }
  }
  return std::nullopt;
}

// Resolved view with leftover variables defaulted to end.
SessionTypePtr read_or_end(const CEntry& e, int depth = 0) {
  CellRef c = find(e.cell);
  if (!c->shape || depth > 512) return st_end();
  const Shape& s = *c->shape;
  switch (s.k) {
    case Shape::End:
      return st_end();
    case Shape::Base:
      return st_base(s.base.value_or(BaseType::Int));
    case Shape::In:
    case Shape::Out: {
      auto p = read_or_end({s.payload, false}, depth + 1);
      auto k = read_or_end({s.cont, e.dualized}, depth + 1);
      bool in = (s.k == Shape::In) != e.dualized;
      return in ? st_in(p, k) : st_out(p, k);
    }
    default: {
      std::vector<LabelArm> arms;
      for (const auto& [l, t] : s.arms)
        arms.emplace_back(l, read_or_end({t, e.dualized}, depth + 1));
      bool br = (s.k == Shape::Branch) != e.dualized;
      return br ? st_branch(std::move(arms)) : st_choice(std::move(arms));
    }
  }
}

// Force the viewed head to the given constructor, instantiating a free
// cell on demand. `arms` seeds the label list when instantiation happens.
Shape& force_head(const CEntry& e, Shape::K viewed,
                  const std::vector<std::string>& labels = {}) {
  CellRef c = find(e.cell);
  Shape::K underlying = viewed;
  if (e.dualized) {
    switch (viewed) {
      case Shape::In: underlying = Shape::Out; break;
      case Shape::Out: underlying = Shape::In; break;
      case Shape::Branch: underlying = Shape::Choice; break;
      case Shape::Choice: underlying = Shape::Branch; break;
      default: break;
    }
  }
  if (!c->shape) {
    Shape sh;
    sh.k = underlying;
    if (underlying == Shape::In || underlying == Shape::Out) {
      sh.payload = fresh_cell();
      sh.cont = fresh_cell();
    } else {
      for (const auto& l : labels) sh.arms.emplace_back(l, fresh_cell());
    }
    c->shape = std::move(sh);
  }
  if (c->shape->k != underlying) fail("protocol mismatch");
  return *c->shape;
}

bool is_base_entry(const CEntry& e) {
  CellRef c = find(e.cell);
  return c->shape && c->shape->k == Shape::Base;
}

bool is_free_entry(const CEntry& e) { return !find(e.cell)->shape; }

struct CBinding {
  std::string name;
  Polarity pol = Polarity::None;
  CEntry entry;
};

struct CEnv {
  std::vector<CBinding> items;

  CBinding* lookup(const std::string& name, Polarity pol) {
    for (auto& b : items)
      if (b.name == name && b.pol == pol) return &b;
    return nullptr;
  }
  bool mentions(const std::string& name) const {
    for (const auto& b : items)
      if (b.name == name) return true;
    return false;
  }
  void erase(const std::string& name, Polarity pol) {
    items.erase(std::remove_if(items.begin(), items.end(),
                               [&](const CBinding& b) {
                                 return b.name == name && b.pol == pol;
                               }),
                items.end());
  }
};

std::string entry_str(const std::string& name, Polarity pol) {
  return name + polarity_suffix(pol);
}

// Pre-rendered derivation node; judgments are stringified only after the
// whole check succeeds, once every cell has settled.
struct ProtoNode {
  std::string rule;
  CEnv env;
  SessionProcPtr proc;
  std::vector<ProtoNode> premises;
};

Derivation finalize(const ProtoNode& n) {
  Derivation d;
  d.rule = n.rule;
  std::string env_str;
  for (const auto& b : n.env.items) {
    if (!env_str.empty()) env_str += ", ";
    env_str += entry_str(b.name, b.pol) + ": " + render(read_or_end(b.entry));
  }
  d.judgment = env_str.empty() ? "|- " + render(n.proc)
                               : env_str + " |- " + render(n.proc);
  for (const auto& p : n.premises) d.premises.push_back(finalize(p));
  return d;
}

struct Checker {
  FreshSupply fs;
  std::map<const void*, CEntry> res_cells;
  std::vector<std::pair<CEntry, std::string>> pending_finished;

  // Deferred end-or-base obligations from T-Nil, settled once the whole
  // process has been traversed and no further constraints can arrive.
  void settle_pending() {
    for (const auto& [entry, name] : pending_finished) {
      CellRef c = find(entry.cell);
      if (!c->shape) {
        c->shape = Shape{}; // still unconstrained: settle at end
        continue;
      }
      if (c->shape->k == Shape::End) continue;
      if (c->shape->k == Shape::Base && !entry.dualized) continue;
      fail("leftover linear environment at 0: " + name + " is not finished");
    }
  }

  // Where a binding must go across a parallel composition.
  static bool occurs(const SessionProcPtr& p, const std::string& name,
                     Polarity pol) {
    auto pols = free_polarities(p, name);
    return pols.count(pol) > 0;
  }

  ProtoNode check(CEnv env, const SessionProcPtr& p) {
    ProtoNode node;
    node.env = env;
    node.proc = p;

    if (std::holds_alternative<SessionProc::Nil>(p->node)) {
      node.rule = "T-Nil";
      for (auto& b : env.items) {
        CellRef c = find(b.entry.cell);
        if (!c->shape) {
          if (b.pol != Polarity::None) {
            c->shape = Shape{}; // an unused endpoint's protocol is end
            continue;
          }
          // A bare name may finish as end or as any base type; commit to
          // neither and re-check once every use has been seen.
          pending_finished.push_back({b.entry, entry_str(b.name, b.pol)});
          continue;
        }
        if (c->shape->k == Shape::End) continue;
        if (c->shape->k == Shape::Base && !b.entry.dualized) continue;
        fail("leftover linear environment at 0: " +
             entry_str(b.name, b.pol) + " is not finished");
      }
      return node;
    }

    if (auto* par = std::get_if<SessionProc::Par>(&p->node)) {
      node.rule = "T-Par";
      CEnv left, right;
      for (auto& b : env.items) {
        if (is_base_entry(b.entry)) {
          left.items.push_back(b);
          right.items.push_back(b);
          continue;
        }
        bool l = occurs(par->left, b.name, b.pol);
        bool r = occurs(par->right, b.name, b.pol);
        if (l && r && b.pol == Polarity::None && is_free_entry(b.entry)) {
          // a name shared by both sides can only be a base value
          find(b.entry.cell)->shape = Shape{Shape::Base, std::nullopt, {}, {}, {}};
          left.items.push_back(b);
          right.items.push_back(b);
          continue;
        }
        if (r && !l) right.items.push_back(b);
        else left.items.push_back(b); // ties and leftovers default left
      }
      node.premises.push_back(check(std::move(left), par->left));
      node.premises.push_back(check(std::move(right), par->right));
      return node;
    }

    if (auto* res = std::get_if<SessionProc::Res>(&p->node)) {
      node.rule = "T-Res";
      std::string name = res->name;
      SessionProcPtr body = res->body;
      if (env.mentions(name)) {
        std::string nm = fs.fresh(name);
        body = subst_session(body, name, Payload{Chan{nm, Polarity::None}});
        name = nm;
      }
      CellRef c;
      if (res->ann) {
        if (std::holds_alternative<SessionType::Base>((*res->ann)->node))
          fail("protocol mismatch: a restricted channel cannot have a base type");
        c = ground_cell(*res->ann);
      } else {
        c = fresh_cell();
      }
      res_cells[p.get()] = CEntry{c, false};
      CEnv inner = env;
      inner.items.push_back({name, Polarity::Plus, CEntry{c, false}});
      inner.items.push_back({name, Polarity::Minus, CEntry{c, true}});
      node.premises.push_back(check(std::move(inner), body));
      return node;
    }

    if (auto* rep = std::get_if<SessionProc::Repl>(&p->node)) {
      node.rule = "T-Repl";
      for (auto& b : env.items) {
        CellRef c = find(b.entry.cell);
        if (!c->shape) {
          if (b.pol != Polarity::None)
            fail("replication needs an unlimited environment: " +
                 entry_str(b.name, b.pol) + " is a session binding");
          c->shape = Shape{Shape::Base, std::nullopt, {}, {}, {}};
          continue;
        }
        if (c->shape->k != Shape::Base)
          fail("replication needs an unlimited environment: " +
               entry_str(b.name, b.pol) + " is a session binding");
      }
      node.premises.push_back(check(env, rep->body));
      return node;
    }

    if (auto* out = std::get_if<SessionProc::Out>(&p->node)) {
      node.rule = "T-Out";
      CBinding* subj = env.lookup(out->subj.name, out->subj.pol);
      if (!subj) subject_missing(env, out->subj);
      Shape& sh = force_head(subj->entry, Shape::Out);
      CEntry payload_ty{sh.payload, false};
      CEntry cont_ty{sh.cont, subj->entry.dualized};

      if (auto* ch = std::get_if<Chan>(&out->payload)) {
        if (ch->name == out->subj.name && ch->pol == out->subj.pol)
          fail("polarity clash: " + entry_str(ch->name, ch->pol) +
               " cannot be sent over itself");
        CBinding* arg = env.lookup(ch->name, ch->pol);
        if (!arg)
          fail(polarity_clash_msg(env, ch->name, ch->pol, "payload"));
        auto sent = read_ground(arg->entry);
        auto want = read_ground(payload_ty);
        if (sent && want) {
          if (!subtype_session(*sent, *want))
            fail("protocol mismatch: payload " + entry_str(ch->name, ch->pol) +
                 " has type " + render(*sent) + ", the channel carries " +
                 render(*want));
        } else {
          unify_views(arg->entry, payload_ty);
        }
        if (!is_base_entry(arg->entry))
          env.erase(ch->name, ch->pol); // linear payloads move away
      } else {
        auto b = type_expr(std::get<ExprPtr>(out->payload), env);
        CellRef g = fresh_cell();
        g->shape = Shape{Shape::Base, b, {}, {}, {}};
        unify(payload_ty.cell, g);
      }
      env.lookup(out->subj.name, out->subj.pol)->entry = cont_ty;
      node.premises.push_back(check(env, out->cont));
      return node;
    }

    if (auto* in = std::get_if<SessionProc::In>(&p->node)) {
      node.rule = "T-In";
      CBinding* subj = env.lookup(in->subj.name, in->subj.pol);
      if (!subj) subject_missing(env, in->subj);
      Shape& sh = force_head(subj->entry, Shape::In);
      CEntry payload_ty{sh.payload, false};
      CEntry cont_ty{sh.cont, subj->entry.dualized};
      std::string bound = in->bound;
      SessionProcPtr body = in->cont;
      if (env.mentions(bound)) {
        std::string nm = fs.fresh(bound);
        body = subst_session(body, bound, Payload{Chan{nm, Polarity::None}});
        bound = nm;
      }
      subj->entry = cont_ty;
      env.items.push_back({bound, Polarity::None, payload_ty});
      node.premises.push_back(check(env, body));
      return node;
    }

    if (auto* br = std::get_if<SessionProc::Branch>(&p->node)) {
      node.rule = "T-Offer";
      CBinding* subj = env.lookup(br->subj.name, br->subj.pol);
      if (!subj) subject_missing(env, br->subj);
      std::vector<std::string> labels;
      for (const auto& [l, a] : br->arms) labels.push_back(l);
      Shape& sh = force_head(subj->entry, Shape::Branch, labels);
      // every label of the type must be offered; extra arms are dead code
      for (const auto& [l, cont] : sh.arms) {
        const SessionProcPtr* arm = nullptr;
        for (const auto& [pl, pp] : br->arms)
          if (pl == l) arm = &pp;
        if (!arm)
          fail("label " + l + " is not offered at " +
               entry_str(br->subj.name, br->subj.pol));
        CEnv arm_env = env;
        arm_env.lookup(br->subj.name, br->subj.pol)->entry =
            CEntry{cont, subj->entry.dualized};
        node.premises.push_back(check(std::move(arm_env), *arm));
      }
      return node;
    }

    auto& sel = std::get<SessionProc::Select>(p->node);
    node.rule = "T-Select";
    CBinding* subj = env.lookup(sel.subj.name, sel.subj.pol);
    if (!subj) subject_missing(env, sel.subj);
    Shape& sh = force_head(subj->entry, Shape::Choice, {sel.label});
    const CellRef* cont = nullptr;
    for (const auto& [l, c] : sh.arms)
      if (l == sel.label) cont = &c;
    if (!cont)
      fail("label " + sel.label + " is not offered by the type of " +
           entry_str(sel.subj.name, sel.subj.pol));
    subj->entry = CEntry{*cont, subj->entry.dualized};
    node.premises.push_back(check(env, sel.cont));
    return node;
  }

 private:
  [[noreturn]] static void subject_missing(CEnv& env, const Chan& subj) {
    fail(polarity_clash_msg(env, subj.name, subj.pol, "subject"));
  }

  static std::string polarity_clash_msg(CEnv& env, const std::string& name,
                                        Polarity pol, const char* role) {
    if (env.mentions(name))
      return std::string("polarity clash: ") + role + " " +
             entry_str(name, pol) + " is bound at a different polarity";
    return std::string("unbound ") + role + " " + entry_str(name, pol);
  }

  // Views unify when their underlying cells do, modulo one dual flip.
  void unify_views(const CEntry& a, const CEntry& b) {
    if (a.dualized == b.dualized) {
      unify(a.cell, b.cell);
      return;
    }
    // materialize one side far enough to flip it: resolve then reload
    auto ga = read_ground(a);
    if (ga) {
      unify(b.cell, ground_cell(b.dualized ? dual_total(*ga) : *ga));
      return;
    }
    auto gb = read_ground(b);
    if (gb) {
      unify(a.cell, ground_cell(a.dualized ? dual_total(*gb) : *gb));
      return;
    }
    fail("cannot infer a type: a channel endpoint meets its own dual "
         "before either side is determined");
  }

  static SessionTypePtr dual_total(const SessionTypePtr& s) {
    if (std::holds_alternative<SessionType::Base>(s->node))
      fail("protocol mismatch: a base value has no dual endpoint");
    return dual(s);
  }

  // int/bool of a closed-enough expression; variables must be ints
  // under comparisons (the only place the parser admits them).
  BaseType type_expr(const ExprPtr& e, CEnv& env) {
    if (std::holds_alternative<Expr::IntLit>(e->node)) return BaseType::Int;
    if (std::holds_alternative<Expr::BoolLit>(e->node)) return BaseType::Bool;
    if (auto* v = std::get_if<Expr::Var>(&e->node)) {
      constrain_int(v->name, env);
      return BaseType::Int;
    }
    auto& eq = std::get<Expr::Eq>(e->node);
    if (auto* v = std::get_if<Expr::Var>(&eq.lhs->node)) {
      constrain_int(v->name, env);
    } else if (!std::holds_alternative<Expr::IntLit>(eq.lhs->node)) {
      fail("protocol mismatch: comparison of a non-integer");
    }
    return BaseType::Bool;
  }

  void constrain_int(const std::string& name, CEnv& env) {
    CBinding* b = env.lookup(name, Polarity::None);
    if (!b) fail(polarity_clash_msg(env, name, Polarity::None, "variable"));
    CellRef g = fresh_cell();
    g->shape = Shape{Shape::Base, BaseType::Int, {}, {}, {}};
    unify(b->entry.cell, g);
  }
};

} // namespace

std::string render_derivation(const Derivation& d) {
  std::string out;
  std::function<void(const Derivation&, int)> walk = [&](const Derivation& n,
                                                         int depth) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += n.rule + "  " + n.judgment + "\n";
    for (const auto& p : n.premises) walk(p, depth + 1);
  };
  walk(d, 0);
  return out;
}

TypeCheckResult typecheck_session(const TypeEnv& env, const SessionProcPtr& p) {
  TypeCheckResult result;
  Checker ck;
  for (const auto& n : all_names(p)) ck.fs.observe(n);
  CEnv cenv;
  for (const auto& e : env.entries()) {
    ck.fs.observe(e.name);
    cenv.items.push_back({e.name, e.pol, CEntry{ground_cell(e.type), false}});
  }
  try {
    ProtoNode root = ck.check(std::move(cenv), p);
    ck.settle_pending();
    result.ok = true;
    result.derivation = finalize(root);
    for (const auto& [node, entry] : ck.res_cells)
      result.res_types[node] = read_or_end(entry);
  } catch (const CheckFail& f) {
    result.ok = false;
    result.error = f.msg;
  }
  return result;
}

std::pair<TypeEnv, TypeEnv> env_split(const TypeEnv& env,
                                      const SessionProcPtr& left,
                                      const SessionProcPtr& right) {
  TypeEnv l, r;
  for (const auto& e : env.entries()) {
    if (std::holds_alternative<SessionType::Base>(e.type->node)) {
      l.set(e.name, e.pol, e.type);
      r.set(e.name, e.pol, e.type);
      continue;
    }
    bool in_l = free_polarities(left, e.name).count(e.pol) > 0;
    bool in_r = free_polarities(right, e.name).count(e.pol) > 0;
    if (in_r && !in_l) r.set(e.name, e.pol, e.type);
    else l.set(e.name, e.pol, e.type); // ties and leftovers default left
  }
  return {std::move(l), std::move(r)};
}

} // namespace sess2gts
