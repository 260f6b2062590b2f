#include "sess2gts/ast.hpp"

#include <algorithm>

namespace sess2gts {

Polarity complement(Polarity p) {
  switch (p) {
    case Polarity::Plus: return Polarity::Minus;
    case Polarity::Minus: return Polarity::Plus;
    case Polarity::None: return Polarity::None;
  }
  return Polarity::None;
}

const char* polarity_suffix(Polarity p) {
  switch (p) {
    case Polarity::Plus: return "+";
    case Polarity::Minus: return "-";
    case Polarity::None: return "";
  }
  return "";
}

std::string chan_str(const Chan& c) { return c.name + polarity_suffix(c.pol); }

ExprPtr mk_int(long long v) { return std::make_shared<const Expr>(Expr{Expr::IntLit{v}}); }
ExprPtr mk_bool(bool v) { return std::make_shared<const Expr>(Expr{Expr::BoolLit{v}}); }
ExprPtr mk_var(std::string n) { return std::make_shared<const Expr>(Expr{Expr::Var{std::move(n)}}); }
ExprPtr mk_eq(ExprPtr lhs, long long rhs) {
  return std::make_shared<const Expr>(Expr{Expr::Eq{std::move(lhs), rhs}});
}

SessionTypePtr st_end() {
  static const SessionTypePtr e = std::make_shared<const SessionType>(SessionType{SessionType::End{}});
  return e;
}
SessionTypePtr st_base(BaseType b) {
  return std::make_shared<const SessionType>(SessionType{SessionType::Base{b}});
}
SessionTypePtr st_in(SessionTypePtr payload, SessionTypePtr cont) {
  return std::make_shared<const SessionType>(SessionType{SessionType::In{std::move(payload), std::move(cont)}});
}
SessionTypePtr st_out(SessionTypePtr payload, SessionTypePtr cont) {
  return std::make_shared<const SessionType>(SessionType{SessionType::Out{std::move(payload), std::move(cont)}});
}
SessionTypePtr st_branch(std::vector<LabelArm> arms) {
  return std::make_shared<const SessionType>(SessionType{SessionType::Branch{std::move(arms)}});
}
SessionTypePtr st_choice(std::vector<LabelArm> arms) {
  return std::make_shared<const SessionType>(SessionType{SessionType::Choice{std::move(arms)}});
}

bool is_end(const SessionTypePtr& s) {
  return std::holds_alternative<SessionType::End>(s->node);
}
bool is_base(const SessionTypePtr& s) {
  return std::holds_alternative<SessionType::Base>(s->node);
}

bool st_eq(const SessionTypePtr& a, const SessionTypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<SessionType::End>(a->node)) return true;
  if (auto* ab = std::get_if<SessionType::Base>(&a->node))
    return ab->base == std::get<SessionType::Base>(b->node).base;
  if (auto* ai = std::get_if<SessionType::In>(&a->node)) {
    auto& bi = std::get<SessionType::In>(b->node);
    return st_eq(ai->payload, bi.payload) && st_eq(ai->cont, bi.cont);
  }
  if (auto* ao = std::get_if<SessionType::Out>(&a->node)) {
    auto& bo = std::get<SessionType::Out>(b->node);
    return st_eq(ao->payload, bo.payload) && st_eq(ao->cont, bo.cont);
  }
  auto arm_eq = [](const std::vector<LabelArm>& x, const std::vector<LabelArm>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].first != y[i].first || !st_eq(x[i].second, y[i].second)) return false;
    return true;
  };
  if (auto* abr = std::get_if<SessionType::Branch>(&a->node))
    return arm_eq(abr->arms, std::get<SessionType::Branch>(b->node).arms);
  if (auto* ach = std::get_if<SessionType::Choice>(&a->node))
    return arm_eq(ach->arms, std::get<SessionType::Choice>(b->node).arms);
  return false;
}

SessionProcPtr sp_nil() {
  static const SessionProcPtr n = std::make_shared<const SessionProc>(SessionProc{SessionProc::Nil{}});
  return n;
}
SessionProcPtr sp_par(SessionProcPtr l, SessionProcPtr r) {
  return std::make_shared<const SessionProc>(SessionProc{SessionProc::Par{std::move(l), std::move(r)}});
}
SessionProcPtr sp_res(std::string name, std::optional<SessionTypePtr> ann, SessionProcPtr body) {
  return std::make_shared<const SessionProc>(
      SessionProc{SessionProc::Res{std::move(name), std::move(ann), std::move(body)}});
}
SessionProcPtr sp_repl(SessionProcPtr body) {
  return std::make_shared<const SessionProc>(SessionProc{SessionProc::Repl{std::move(body)}});
}
SessionProcPtr sp_out(Chan subj, Payload payload, SessionProcPtr cont) {
  return std::make_shared<const SessionProc>(
      SessionProc{SessionProc::Out{std::move(subj), std::move(payload), std::move(cont)}});
}
SessionProcPtr sp_in(Chan subj, std::string bound, SessionProcPtr cont) {
  return std::make_shared<const SessionProc>(
      SessionProc{SessionProc::In{std::move(subj), std::move(bound), std::move(cont)}});
}
SessionProcPtr sp_branch(Chan subj, std::vector<std::pair<std::string, SessionProcPtr>> arms) {
  return std::make_shared<const SessionProc>(
      SessionProc{SessionProc::Branch{std::move(subj), std::move(arms)}});
}
SessionProcPtr sp_select(Chan subj, std::string label, SessionProcPtr cont) {
  return std::make_shared<const SessionProc>(
      SessionProc{SessionProc::Select{std::move(subj), std::move(label), std::move(cont)}});
}

GenericProcPtr gp_nil() {
  static const GenericProcPtr n = std::make_shared<const GenericProc>(GenericProc{GenericProc::Nil{}});
  return n;
}
GenericProcPtr gp_par(GenericProcPtr l, GenericProcPtr r) {
  return std::make_shared<const GenericProc>(GenericProc{GenericProc::Par{std::move(l), std::move(r)}});
}
GenericProcPtr gp_res(std::vector<std::string> names, GenericProcPtr body) {
  return std::make_shared<const GenericProc>(GenericProc{GenericProc::Res{std::move(names), std::move(body)}});
}
GenericProcPtr gp_repl(GenericProcPtr body) {
  return std::make_shared<const GenericProc>(GenericProc{GenericProc::Repl{std::move(body)}});
}
GenericProcPtr gp_sum(std::vector<GuardedArm> arms) {
  return std::make_shared<const GenericProc>(GenericProc{GenericProc::Sum{std::move(arms)}});
}
GenericProcPtr gp_in(std::string chan, std::vector<std::string> binders, GenericProcPtr cont) {
  GuardedArm arm;
  arm.input = true;
  arm.chan = std::move(chan);
  arm.binders = std::move(binders);
  arm.cont = std::move(cont);
  return gp_sum({std::move(arm)});
}
GenericProcPtr gp_out(std::string chan, std::vector<GArg> args, GenericProcPtr cont) {
  GuardedArm arm;
  arm.input = false;
  arm.chan = std::move(chan);
  arm.args = std::move(args);
  arm.cont = std::move(cont);
  return gp_sum({std::move(arm)});
}

ProcessTypePtr pt_zero() {
  static const ProcessTypePtr z = std::make_shared<const ProcessType>(ProcessType{ProcessType::Zero{}});
  return z;
}
ProcessTypePtr pt_par(ProcessTypePtr l, ProcessTypePtr r) {
  return std::make_shared<const ProcessType>(ProcessType{ProcessType::Par{std::move(l), std::move(r)}});
}
ProcessTypePtr pt_out(std::string chan, TypePayload payload, ProcessTypePtr cont) {
  return std::make_shared<const ProcessType>(
      ProcessType{ProcessType::OutPfx{std::move(chan), std::move(payload), std::move(cont)}});
}
ProcessTypePtr pt_in(std::string chan, TypePayload payload, ProcessTypePtr cont) {
  return std::make_shared<const ProcessType>(
      ProcessType{ProcessType::InPfx{std::move(chan), std::move(payload), std::move(cont)}});
}
ProcessTypePtr pt_tau(ProcessTypePtr cont) {
  return std::make_shared<const ProcessType>(ProcessType{ProcessType::TauPfx{std::move(cont)}});
}
ProcessTypePtr pt_and(ProcessTypePtr l, ProcessTypePtr r) {
  return std::make_shared<const ProcessType>(ProcessType{ProcessType::IntChoice{std::move(l), std::move(r)}});
}
ProcessTypePtr pt_ext(std::vector<ProcessTypePtr> arms) {
  return std::make_shared<const ProcessType>(ProcessType{ProcessType::ExtChoice{std::move(arms)}});
}
ProcessTypePtr pt_repl(ProcessTypePtr body) {
  return std::make_shared<const ProcessType>(ProcessType{ProcessType::Repl{std::move(body)}});
}

TypePayload empty_payload() { return std::vector<BaseType>{}; }

std::size_t payload_arity(const TypePayload& p) {
  if (auto* t = std::get_if<TupleType>(&p)) return t->binders.size();
  return std::get<std::vector<BaseType>>(p).size();
}

bool TypeEnv::contains(const std::string& name, Polarity pol) const {
  return lookup(name, pol) != nullptr;
}

const SessionTypePtr* TypeEnv::lookup(const std::string& name, Polarity pol) const {
  for (const auto& e : entries_)
    if (e.name == name && e.pol == pol) return &e.type;
  return nullptr;
}

bool TypeEnv::mentions_name(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const EnvEntry& e) { return e.name == name; });
}

void TypeEnv::set(const std::string& name, Polarity pol, SessionTypePtr t) {
  for (auto& e : entries_) {
    if (e.name == name && e.pol == pol) {
      e.type = std::move(t);
      return;
    }
  }
  entries_.push_back(EnvEntry{name, pol, std::move(t)});
}

void TypeEnv::erase(const std::string& name, Polarity pol) {
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                [&](const EnvEntry& e) {
                                  return e.name == name && e.pol == pol;
                                }),
                 entries_.end());
}

bool is_machine_name(const std::string& name) {
  return !name.empty() && name[0] == '%';
}

std::string FreshSupply::fresh(const std::string& hint) {
  std::string h = hint.empty() ? "n" : hint;
  if (is_machine_name(h)) {
    // Re-freshening an already machine-generated name: keep the stem.
    auto cut = h.find_last_of('_');
    h = (cut == std::string::npos || cut == 0) ? h.substr(1) : h.substr(1, cut - 1);
    if (h.empty()) h = "n";
  }
  return "%" + h + "_" + std::to_string(next_++);
}

void FreshSupply::observe(const std::string& name) {
  if (!is_machine_name(name)) return;
  auto cut = name.find_last_of('_');
  if (cut == std::string::npos) return;
  uint64_t idx = 0;
  bool any = false;
  for (std::size_t i = cut + 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return;
    idx = idx * 10 + static_cast<uint64_t>(name[i] - '0');
    any = true;
  }
  if (any && idx >= next_) next_ = idx + 1;
}

} // namespace sess2gts
