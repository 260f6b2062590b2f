#include "sess2gts/print.hpp"

#include <sstream>

namespace sess2gts {

namespace {

void render_expr(std::ostringstream& os, const ExprPtr& e) {
  if (auto* i = std::get_if<Expr::IntLit>(&e->node)) {
    os << i->value;
  } else if (auto* b = std::get_if<Expr::BoolLit>(&e->node)) {
    os << (b->value ? "true" : "false");
  } else if (auto* v = std::get_if<Expr::Var>(&e->node)) {
    os << v->name;
  } else {
    auto& q = std::get<Expr::Eq>(e->node);
    render_expr(os, q.lhs);
    os << "==" << q.rhs;
  }
}

void render_stype(std::ostringstream& os, const SessionTypePtr& t) {
  if (std::holds_alternative<SessionType::End>(t->node)) {
    os << "end";
  } else if (auto* b = std::get_if<SessionType::Base>(&t->node)) {
    os << (b->base == BaseType::Int ? "int" : "bool");
  } else if (auto* i = std::get_if<SessionType::In>(&t->node)) {
    os << "?<";
    render_stype(os, i->payload);
    os << ">.";
    render_stype(os, i->cont);
  } else if (auto* o = std::get_if<SessionType::Out>(&t->node)) {
    os << "!<";
    render_stype(os, o->payload);
    os << ">.";
    render_stype(os, o->cont);
  } else {
    const std::vector<LabelArm>* arms;
    if (auto* br = std::get_if<SessionType::Branch>(&t->node)) {
      os << "&{";
      arms = &br->arms;
    } else {
      os << "(+){";
      arms = &std::get<SessionType::Choice>(t->node).arms;
    }
    bool first = true;
    for (const auto& [l, s] : *arms) {
      if (!first) os << ", ";
      first = false;
      os << l << ": ";
      render_stype(os, s);
    }
    os << "}";
  }
}

void render_payload(std::ostringstream& os, const Payload& p) {
  if (auto* c = std::get_if<Chan>(&p)) {
    os << chan_str(*c);
  } else {
    render_expr(os, std::get<ExprPtr>(p));
  }
}

// Session processes. Prefix continuations, restriction bodies and replication
// bodies sit at prefix level; a parallel child there needs parens.
void render_sp(std::ostringstream& os, const SessionProcPtr& p, bool at_prefix_level);

void render_sp_tight(std::ostringstream& os, const SessionProcPtr& p) {
  render_sp(os, p, true);
}

void render_sp(std::ostringstream& os, const SessionProcPtr& p, bool at_prefix_level) {
  if (std::holds_alternative<SessionProc::Nil>(p->node)) {
    os << "0";
  } else if (auto* par = std::get_if<SessionProc::Par>(&p->node)) {
    if (at_prefix_level) {
      os << "(";
      render_sp(os, p, false);
      os << ")";
      return;
    }
    render_sp(os, par->left, false);
    os << " | ";
    // keep the tree left-associated on reparse
    if (std::holds_alternative<SessionProc::Par>(par->right->node)) {
      os << "(";
      render_sp(os, par->right, false);
      os << ")";
    } else {
      render_sp(os, par->right, false);
    }
  } else if (auto* res = std::get_if<SessionProc::Res>(&p->node)) {
    os << "(new " << res->name;
    if (res->ann) {
      os << ": ";
      render_stype(os, *res->ann);
    }
    os << ")";
    render_sp_tight(os, res->body);
  } else if (auto* rep = std::get_if<SessionProc::Repl>(&p->node)) {
    os << "!";
    render_sp_tight(os, rep->body);
  } else if (auto* out = std::get_if<SessionProc::Out>(&p->node)) {
    os << chan_str(out->subj) << "!<";
    render_payload(os, out->payload);
    os << ">.";
    render_sp_tight(os, out->cont);
  } else if (auto* in = std::get_if<SessionProc::In>(&p->node)) {
    os << chan_str(in->subj) << "?(" << in->bound << ").";
    render_sp_tight(os, in->cont);
  } else if (auto* br = std::get_if<SessionProc::Branch>(&p->node)) {
    os << chan_str(br->subj) << " >>{";
    bool first = true;
    for (const auto& [l, body] : br->arms) {
      if (!first) os << ", ";
      first = false;
      os << l << ": ";
      render_sp(os, body, false);
    }
    os << "}";
  } else {
    auto& sel = std::get<SessionProc::Select>(p->node);
    os << chan_str(sel.subj) << " <<" << sel.label << ".";
    render_sp_tight(os, sel.cont);
  }
}

// Generic processes. Levels: par(0) < sum(1) < prefix(2).
int glevel(const GenericProcPtr& p) {
  if (std::holds_alternative<GenericProc::Par>(p->node)) return 0;
  if (auto* s = std::get_if<GenericProc::Sum>(&p->node))
    return s->arms.size() > 1 ? 1 : 2;
  return 2;
}

void render_gp(std::ostringstream& os, const GenericProcPtr& p, int min_level) {
  if (glevel(p) < min_level) {
    os << "(";
    render_gp(os, p, 0);
    os << ")";
    return;
  }
  if (std::holds_alternative<GenericProc::Nil>(p->node)) {
    os << "0";
  } else if (auto* par = std::get_if<GenericProc::Par>(&p->node)) {
    render_gp(os, par->left, 0);
    os << " | ";
    render_gp(os, par->right, 1); // keep the tree left-associated on reparse
  } else if (auto* res = std::get_if<GenericProc::Res>(&p->node)) {
    os << "(new ";
    for (std::size_t i = 0; i < res->names.size(); ++i) {
      if (i) os << ",";
      os << res->names[i];
    }
    os << ")";
    render_gp(os, res->body, 2);
  } else if (auto* rep = std::get_if<GenericProc::Repl>(&p->node)) {
    os << "!";
    render_gp(os, rep->body, 2);
  } else {
    auto& sum = std::get<GenericProc::Sum>(p->node);
    bool first_arm = true;
    for (const auto& arm : sum.arms) {
      if (!first_arm) os << " + ";
      first_arm = false;
      os << arm.chan;
      if (arm.input) {
        os << "?(";
        for (std::size_t i = 0; i < arm.binders.size(); ++i) {
          if (i) os << ",";
          os << arm.binders[i];
        }
        os << ")";
      } else {
        os << "!<";
        for (std::size_t i = 0; i < arm.args.size(); ++i) {
          if (i) os << ",";
          if (auto* n = std::get_if<std::string>(&arm.args[i]))
            os << *n;
          else
            render_expr(os, std::get<ExprPtr>(arm.args[i]));
        }
        os << ">";
      }
      os << ".";
      render_gp(os, arm.cont, 2);
    }
  }
}

// Process types. Levels: par(0) < and(1) < sum(2) < prefix/unary(3).
int tlevel(const ProcessTypePtr& t) {
  if (std::holds_alternative<ProcessType::Par>(t->node)) return 0;
  if (std::holds_alternative<ProcessType::IntChoice>(t->node)) return 1;
  if (auto* e = std::get_if<ProcessType::ExtChoice>(&t->node))
    return e->arms.size() > 1 ? 2 : 3;
  return 3;
}

void render_pt(std::ostringstream& os, const ProcessTypePtr& t, int min_level);

void render_tpayload(std::ostringstream& os, const TypePayload& p) {
  if (auto* tup = std::get_if<TupleType>(&p)) {
    os << "(";
    for (std::size_t i = 0; i < tup->binders.size(); ++i) {
      if (i) os << ",";
      os << tup->binders[i];
    }
    os << ")";
    render_pt(os, tup->body, 3);
  } else {
    auto& bases = std::get<std::vector<BaseType>>(p);
    for (std::size_t i = 0; i < bases.size(); ++i) {
      if (i) os << ",";
      os << (bases[i] == BaseType::Int ? "int" : "bool");
    }
  }
}

void render_pt(std::ostringstream& os, const ProcessTypePtr& t, int min_level) {
  if (tlevel(t) < min_level) {
    os << "(";
    render_pt(os, t, 0);
    os << ")";
    return;
  }
  if (std::holds_alternative<ProcessType::Zero>(t->node)) {
    os << "0";
  } else if (auto* par = std::get_if<ProcessType::Par>(&t->node)) {
    render_pt(os, par->left, 0);
    os << " | ";
    render_pt(os, par->right, 1); // keep the tree left-associated on reparse
  } else if (auto* ic = std::get_if<ProcessType::IntChoice>(&t->node)) {
    render_pt(os, ic->left, 1);
    os << " & ";
    render_pt(os, ic->right, 2); // right-nested & needs parens
  } else if (auto* ec = std::get_if<ProcessType::ExtChoice>(&t->node)) {
    bool first = true;
    for (const auto& arm : ec->arms) {
      if (!first) os << " + ";
      first = false;
      render_pt(os, arm, 3);
    }
  } else if (auto* rep = std::get_if<ProcessType::Repl>(&t->node)) {
    os << "*";
    render_pt(os, rep->body, 3);
  } else if (auto* tau = std::get_if<ProcessType::TauPfx>(&t->node)) {
    os << "tau.";
    render_pt(os, tau->cont, 3);
  } else if (auto* out = std::get_if<ProcessType::OutPfx>(&t->node)) {
    os << out->chan << "!<";
    render_tpayload(os, out->payload);
    os << ">.";
    render_pt(os, out->cont, 3);
  } else {
    auto& in = std::get<ProcessType::InPfx>(t->node);
    os << in.chan << "?<";
    render_tpayload(os, in.payload);
    os << ">.";
    render_pt(os, in.cont, 3);
  }
}

} // namespace

std::string render(const SessionProcPtr& p) {
  std::ostringstream os;
  render_sp(os, p, false);
  return os.str();
}

std::string render(const GenericProcPtr& p) {
  std::ostringstream os;
  render_gp(os, p, 0);
  return os.str();
}

std::string render(const SessionTypePtr& t) {
  std::ostringstream os;
  render_stype(os, t);
  return os.str();
}

std::string render(const ProcessTypePtr& t) {
  std::ostringstream os;
  render_pt(os, t, 0);
  return os.str();
}

std::string render(const TypeEnv& env) {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : env.entries()) {
    if (!first) os << ", ";
    first = false;
    os << e.name << polarity_suffix(e.pol) << ": ";
    render_stype(os, e.type);
  }
  return os.str();
}

std::string render(const ExprPtr& e) {
  std::ostringstream os;
  render_expr(os, e);
  return os.str();
}

std::string render(const Payload& p) {
  std::ostringstream os;
  render_payload(os, p);
  return os.str();
}

std::string render(const TypePayload& p) {
  std::ostringstream os;
  render_tpayload(os, p);
  return os.str();
}

} // namespace sess2gts
