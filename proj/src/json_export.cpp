#include "sess2gts/json_export.hpp"

#include "json.hpp"

namespace sess2gts {

namespace {

using nlohmann::json;

json pol_json(Polarity p) {
  switch (p) {
    case Polarity::Plus: return "+";
    case Polarity::Minus: return "-";
    default: return nullptr;
  }
}

json chan_json(const Chan& c) {
  return {{"name", c.name}, {"polarity", pol_json(c.pol)}};
}

json expr_json(const ExprPtr& e) {
  if (auto* i = std::get_if<Expr::IntLit>(&e->node))
    return {{"kind", "int"}, {"value", i->value}};
  if (auto* b = std::get_if<Expr::BoolLit>(&e->node))
    return {{"kind", "bool"}, {"value", b->value}};
  if (auto* v = std::get_if<Expr::Var>(&e->node))
    return {{"kind", "var"}, {"name", v->name}};
  auto& q = std::get<Expr::Eq>(e->node);
  return {{"kind", "eq"}, {"lhs", expr_json(q.lhs)}, {"rhs", q.rhs}};
}

json stype_json(const SessionTypePtr& t) {
  if (std::holds_alternative<SessionType::End>(t->node)) return {{"kind", "end"}};
  if (auto* b = std::get_if<SessionType::Base>(&t->node))
    return {{"kind", "base"}, {"base", b->base == BaseType::Int ? "int" : "bool"}};
  if (auto* i = std::get_if<SessionType::In>(&t->node))
    return {{"kind", "in"}, {"payload", stype_json(i->payload)}, {"cont", stype_json(i->cont)}};
  if (auto* o = std::get_if<SessionType::Out>(&t->node))
    return {{"kind", "out"}, {"payload", stype_json(o->payload)}, {"cont", stype_json(o->cont)}};
  const char* kind = std::holds_alternative<SessionType::Branch>(t->node) ? "branch" : "choice";
  const auto& arms = std::holds_alternative<SessionType::Branch>(t->node)
                         ? std::get<SessionType::Branch>(t->node).arms
                         : std::get<SessionType::Choice>(t->node).arms;
  json ja = json::array();
  for (const auto& [l, s] : arms) ja.push_back({{"label", l}, {"type", stype_json(s)}});
  return {{"kind", kind}, {"arms", ja}};
}

json payload_json(const Payload& p) {
  if (auto* c = std::get_if<Chan>(&p)) {
    json j = chan_json(*c);
    j["kind"] = "chan";
    return j;
  }
  return expr_json(std::get<ExprPtr>(p));
}

json sp_json(const SessionProcPtr& p) {
  if (std::holds_alternative<SessionProc::Nil>(p->node)) return {{"kind", "nil"}};
  if (auto* par = std::get_if<SessionProc::Par>(&p->node))
    return {{"kind", "par"}, {"left", sp_json(par->left)}, {"right", sp_json(par->right)}};
  if (auto* res = std::get_if<SessionProc::Res>(&p->node))
    return {{"kind", "res"},
            {"name", res->name},
            {"annotation", res->ann ? stype_json(*res->ann) : json(nullptr)},
            {"body", sp_json(res->body)}};
  if (auto* rep = std::get_if<SessionProc::Repl>(&p->node))
    return {{"kind", "repl"}, {"body", sp_json(rep->body)}};
  if (auto* o = std::get_if<SessionProc::Out>(&p->node))
    return {{"kind", "out"},
            {"chan", chan_json(o->subj)},
            {"payload", payload_json(o->payload)},
            {"cont", sp_json(o->cont)}};
  if (auto* i = std::get_if<SessionProc::In>(&p->node))
    return {{"kind", "in"},
            {"chan", chan_json(i->subj)},
            {"binder", i->bound},
            {"cont", sp_json(i->cont)}};
  if (auto* br = std::get_if<SessionProc::Branch>(&p->node)) {
    json ja = json::array();
    for (const auto& [l, body] : br->arms)
      ja.push_back({{"label", l}, {"body", sp_json(body)}});
    return {{"kind", "branch"}, {"chan", chan_json(br->subj)}, {"arms", ja}};
  }
  auto& sel = std::get<SessionProc::Select>(p->node);
  return {{"kind", "select"},
          {"chan", chan_json(sel.subj)},
          {"label", sel.label},
          {"cont", sp_json(sel.cont)}};
}

json garm_json(const GuardedArm& arm) {
  if (arm.input) {
    return {{"kind", "in"},
            {"chan", arm.chan},
            {"binders", arm.binders},
            {"cont", nullptr}}; // cont filled by caller
  }
  json args = json::array();
  for (const auto& a : arm.args) {
    if (auto* n = std::get_if<std::string>(&a))
      args.push_back({{"kind", "name"}, {"name", *n}});
    else
      args.push_back(expr_json(std::get<ExprPtr>(a)));
  }
  return {{"kind", "out"}, {"chan", arm.chan}, {"args", args}, {"cont", nullptr}};
}

json gp_json(const GenericProcPtr& p) {
  if (std::holds_alternative<GenericProc::Nil>(p->node)) return {{"kind", "nil"}};
  if (auto* par = std::get_if<GenericProc::Par>(&p->node))
    return {{"kind", "par"}, {"left", gp_json(par->left)}, {"right", gp_json(par->right)}};
  if (auto* res = std::get_if<GenericProc::Res>(&p->node))
    return {{"kind", "res"}, {"names", res->names}, {"body", gp_json(res->body)}};
  if (auto* rep = std::get_if<GenericProc::Repl>(&p->node))
    return {{"kind", "repl"}, {"body", gp_json(rep->body)}};
  auto& sum = std::get<GenericProc::Sum>(p->node);
  json arms = json::array();
  for (const auto& arm : sum.arms) {
    json j = garm_json(arm);
    j["cont"] = gp_json(arm.cont);
    arms.push_back(std::move(j));
  }
  if (arms.size() == 1) return arms[0]; // a bare prefix is a one-arm sum
  return {{"kind", "sum"}, {"arms", arms}};
}

json pt_json(const ProcessTypePtr& t);

json tpayload_json(const TypePayload& p) {
  if (auto* tup = std::get_if<TupleType>(&p))
    return {{"kind", "tuple"}, {"binders", tup->binders}, {"body", pt_json(tup->body)}};
  json bases = json::array();
  for (BaseType b : std::get<std::vector<BaseType>>(p))
    bases.push_back(b == BaseType::Int ? "int" : "bool");
  return {{"kind", "bases"}, {"bases", bases}};
}

json pt_json(const ProcessTypePtr& t) {
  if (std::holds_alternative<ProcessType::Zero>(t->node)) return {{"kind", "zero"}};
  if (auto* par = std::get_if<ProcessType::Par>(&t->node))
    return {{"kind", "par"}, {"left", pt_json(par->left)}, {"right", pt_json(par->right)}};
  if (auto* o = std::get_if<ProcessType::OutPfx>(&t->node))
    return {{"kind", "out"},
            {"chan", o->chan},
            {"payload", tpayload_json(o->payload)},
            {"cont", pt_json(o->cont)}};
  if (auto* i = std::get_if<ProcessType::InPfx>(&t->node))
    return {{"kind", "in"},
            {"chan", i->chan},
            {"payload", tpayload_json(i->payload)},
            {"cont", pt_json(i->cont)}};
  if (auto* tau = std::get_if<ProcessType::TauPfx>(&t->node))
    return {{"kind", "tau"}, {"cont", pt_json(tau->cont)}};
  if (auto* c = std::get_if<ProcessType::IntChoice>(&t->node))
    return {{"kind", "and"}, {"left", pt_json(c->left)}, {"right", pt_json(c->right)}};
  if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    json arms = json::array();
    for (const auto& arm : e->arms) arms.push_back(pt_json(arm));
    return {{"kind", "plus"}, {"arms", arms}};
  }
  auto& r = std::get<ProcessType::Repl>(t->node);
  return {{"kind", "repl"}, {"body", pt_json(r.body)}};
}

std::string dump(const json& j, int indent) {
  return indent < 0 ? j.dump() : j.dump(indent);
}

} // namespace

std::string to_json(const SessionProcPtr& p, int indent) { return dump(sp_json(p), indent); }
std::string to_json(const GenericProcPtr& p, int indent) { return dump(gp_json(p), indent); }
std::string to_json(const SessionTypePtr& t, int indent) { return dump(stype_json(t), indent); }
std::string to_json(const ProcessTypePtr& t, int indent) { return dump(pt_json(t), indent); }

std::string to_json(const TypeEnv& env, int indent) {
  json ja = json::array();
  for (const auto& e : env.entries())
    ja.push_back({{"name", e.name}, {"polarity", pol_json(e.pol)}, {"type", stype_json(e.type)}});
  return dump(ja, indent);
}

} // namespace sess2gts
