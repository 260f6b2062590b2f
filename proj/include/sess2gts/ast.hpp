#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sess2gts {

// ---------------------------------------------------------------------------
// Names and polarities
// ---------------------------------------------------------------------------

enum class Polarity : uint8_t { Plus, Minus, None };

// Complement: + <-> -, unpolarized stays unpolarized.
Polarity complement(Polarity p);

const char* polarity_suffix(Polarity p); // "+", "-", ""

// A channel occurrence: name plus the polarity at the use site.
struct Chan {
  std::string name;
  Polarity pol = Polarity::None;

  bool operator==(const Chan& o) const { return name == o.name && pol == o.pol; }
  bool operator<(const Chan& o) const {
    if (name != o.name) return name < o.name;
    return static_cast<int>(pol) < static_cast<int>(o.pol);
  }
};

std::string chan_str(const Chan& c);

// ---------------------------------------------------------------------------
// Value expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct IntLit { long long value; };
  struct BoolLit { bool value; };
  struct Var { std::string name; };
  struct Eq { ExprPtr lhs; long long rhs; }; // int expression compared to an int literal

  std::variant<IntLit, BoolLit, Var, Eq> node;
};

ExprPtr mk_int(long long v);
ExprPtr mk_bool(bool v);
ExprPtr mk_var(std::string n);
ExprPtr mk_eq(ExprPtr lhs, long long rhs);

// ---------------------------------------------------------------------------
// Session types
// ---------------------------------------------------------------------------

enum class BaseType : uint8_t { Int, Bool };

struct SessionType;
using SessionTypePtr = std::shared_ptr<const SessionType>;

using LabelArm = std::pair<std::string, SessionTypePtr>;

struct SessionType {
  struct End {};
  struct Base { BaseType base; };
  struct In { SessionTypePtr payload; SessionTypePtr cont; };
  struct Out { SessionTypePtr payload; SessionTypePtr cont; };
  struct Branch { std::vector<LabelArm> arms; };  // &{l:S,...}, order preserved
  struct Choice { std::vector<LabelArm> arms; };  // (+){l:S,...}, order preserved

  std::variant<End, Base, In, Out, Branch, Choice> node;
};

SessionTypePtr st_end();
SessionTypePtr st_base(BaseType b);
SessionTypePtr st_in(SessionTypePtr payload, SessionTypePtr cont);
SessionTypePtr st_out(SessionTypePtr payload, SessionTypePtr cont);
SessionTypePtr st_branch(std::vector<LabelArm> arms);
SessionTypePtr st_choice(std::vector<LabelArm> arms);

bool is_end(const SessionTypePtr& s);
bool is_base(const SessionTypePtr& s);

// Structural (syntactic) equality of session types.
bool st_eq(const SessionTypePtr& a, const SessionTypePtr& b);

// ---------------------------------------------------------------------------
// Session processes
// ---------------------------------------------------------------------------

struct SessionProc;
using SessionProcPtr = std::shared_ptr<const SessionProc>;

// Output payload: a polarized channel or a value expression. Bare identifiers
// parse as channels; the typed encoder reinterprets base-typed ones as values.
using Payload = std::variant<Chan, ExprPtr>;

struct SessionProc {
  struct Nil {};
  struct Par { SessionProcPtr left, right; };
  struct Res { std::string name; std::optional<SessionTypePtr> ann; SessionProcPtr body; };
  struct Repl { SessionProcPtr body; };
  struct Out { Chan subj; Payload payload; SessionProcPtr cont; };
  struct In { Chan subj; std::string bound; SessionProcPtr cont; };
  struct Branch { Chan subj; std::vector<std::pair<std::string, SessionProcPtr>> arms; };
  struct Select { Chan subj; std::string label; SessionProcPtr cont; };

  std::variant<Nil, Par, Res, Repl, Out, In, Branch, Select> node;
};

SessionProcPtr sp_nil();
SessionProcPtr sp_par(SessionProcPtr l, SessionProcPtr r);
SessionProcPtr sp_res(std::string name, std::optional<SessionTypePtr> ann, SessionProcPtr body);
SessionProcPtr sp_repl(SessionProcPtr body);
SessionProcPtr sp_out(Chan subj, Payload payload, SessionProcPtr cont);
SessionProcPtr sp_in(Chan subj, std::string bound, SessionProcPtr cont);
SessionProcPtr sp_branch(Chan subj, std::vector<std::pair<std::string, SessionProcPtr>> arms);
SessionProcPtr sp_select(Chan subj, std::string label, SessionProcPtr cont);

// ---------------------------------------------------------------------------
// Generic processes (polyadic, mixed guarded sums)
// ---------------------------------------------------------------------------

struct GenericProc;
using GenericProcPtr = std::shared_ptr<const GenericProc>;

// Output argument: a channel name or a value expression.
using GArg = std::variant<std::string, ExprPtr>;

struct GuardedArm {
  bool input = false;
  std::string chan;
  std::vector<std::string> binders; // input form
  std::vector<GArg> args;           // output form
  GenericProcPtr cont;
};

struct GenericProc {
  struct Nil {};
  struct Par { GenericProcPtr left, right; };
  struct Res { std::vector<std::string> names; GenericProcPtr body; };
  struct Repl { GenericProcPtr body; };
  // Non-empty guarded sum; a bare prefix is a one-arm sum.
  struct Sum { std::vector<GuardedArm> arms; };

  std::variant<Nil, Par, Res, Repl, Sum> node;
};

GenericProcPtr gp_nil();
GenericProcPtr gp_par(GenericProcPtr l, GenericProcPtr r);
GenericProcPtr gp_res(std::vector<std::string> names, GenericProcPtr body);
GenericProcPtr gp_repl(GenericProcPtr body);
GenericProcPtr gp_sum(std::vector<GuardedArm> arms);
GenericProcPtr gp_in(std::string chan, std::vector<std::string> binders, GenericProcPtr cont);
GenericProcPtr gp_out(std::string chan, std::vector<GArg> args, GenericProcPtr cont);

// ---------------------------------------------------------------------------
// Process types (generic type system)
// ---------------------------------------------------------------------------

struct ProcessType;
using ProcessTypePtr = std::shared_ptr<const ProcessType>;

struct TupleType {
  std::vector<std::string> binders; // bound within body only
  ProcessTypePtr body;
};

// Payload of a type-level prefix: a tuple type or a list of base sorts.
using TypePayload = std::variant<TupleType, std::vector<BaseType>>;

struct ProcessType {
  struct Zero {};
  struct Par { ProcessTypePtr left, right; };
  struct OutPfx { std::string chan; TypePayload payload; ProcessTypePtr cont; };
  struct InPfx { std::string chan; TypePayload payload; ProcessTypePtr cont; };
  struct TauPfx { ProcessTypePtr cont; };
  struct IntChoice { ProcessTypePtr left, right; };        // &
  struct ExtChoice { std::vector<ProcessTypePtr> arms; };  // +, arms prefix-guarded
  struct Repl { ProcessTypePtr body; };

  std::variant<Zero, Par, OutPfx, InPfx, TauPfx, IntChoice, ExtChoice, Repl> node;
};

ProcessTypePtr pt_zero();
ProcessTypePtr pt_par(ProcessTypePtr l, ProcessTypePtr r);
ProcessTypePtr pt_out(std::string chan, TypePayload payload, ProcessTypePtr cont);
ProcessTypePtr pt_in(std::string chan, TypePayload payload, ProcessTypePtr cont);
ProcessTypePtr pt_tau(ProcessTypePtr cont);
ProcessTypePtr pt_and(ProcessTypePtr l, ProcessTypePtr r);
ProcessTypePtr pt_ext(std::vector<ProcessTypePtr> arms);
ProcessTypePtr pt_repl(ProcessTypePtr body);

TypePayload empty_payload(); // <> : zero-length base list

std::size_t payload_arity(const TypePayload& p);

// ---------------------------------------------------------------------------
// Type environments (ordered)
// ---------------------------------------------------------------------------

struct EnvEntry {
  std::string name;
  Polarity pol = Polarity::None;
  SessionTypePtr type;
};

// Insertion-ordered map from polarized names to session types.
class TypeEnv {
 public:
  TypeEnv() = default;

  bool contains(const std::string& name, Polarity pol) const;
  const SessionTypePtr* lookup(const std::string& name, Polarity pol) const;
  // Any binding of the given bare name, regardless of polarity?
  bool mentions_name(const std::string& name) const;

  // Unconditional insert/overwrite, preserving first-insertion order.
  void set(const std::string& name, Polarity pol, SessionTypePtr t);
  void erase(const std::string& name, Polarity pol);

  const std::vector<EnvEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<EnvEntry> entries_;
};

// ---------------------------------------------------------------------------
// Fresh name supply
// ---------------------------------------------------------------------------

// Machine-generated names live in the '%' namespace: "%hint_k". The grammar
// accepts them, so rendered terms round-trip; seeding past the highest index
// present in a term keeps generated names collision-free.
class FreshSupply {
 public:
  std::string fresh(const std::string& hint);
  // Bump the counter past every %-name occurring in the given name.
  void observe(const std::string& name);

 private:
  uint64_t next_ = 0;
};

bool is_machine_name(const std::string& name);

} // namespace sess2gts
