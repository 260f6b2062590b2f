#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sess2gts/ast.hpp"

namespace sess2gts {

// ---------------------------------------------------------------------------
// Session types: duality, subtyping, environment algebra
// ---------------------------------------------------------------------------

// Swaps In/Out and Branch/Choice recursively; payloads are untouched.
// Throws std::invalid_argument on a bare base type, which has no dual.
SessionTypePtr dual(const SessionTypePtr& s);

// The preorder generated by: end <= end, bases by equality, covariant
// input, output contravariant in the payload, branch widens the label
// set, choice narrows it. Continuations pointwise.
bool subtype_session(const SessionTypePtr& a, const SessionTypePtr& b);

// Both polarities present implies their types are exact duals.
bool is_balanced(const TypeEnv& env);

// The two partial environment operations; nullopt means undefined.
// Comma absorbs an identical binding and otherwise requires the key to
// be absent (and never mixes x with both a bare and a polarized entry).
std::optional<TypeEnv> env_extend(TypeEnv env, const std::string& name,
                                  Polarity pol, const SessionTypePtr& s);
// Plus insists on exclusivity: a polarized binding requires both the
// same key and the bare key absent; a bare binding requires all three.
std::optional<TypeEnv> env_plus(TypeEnv env, const std::string& name,
                                Polarity pol, const SessionTypePtr& s);

// Replace a branch/choice binding by the continuation of the given arm.
std::optional<TypeEnv> env_advance(const TypeEnv& env, const std::string& name,
                                   Polarity pol, const std::string& label);

// ---------------------------------------------------------------------------
// Typechecking
// ---------------------------------------------------------------------------

struct Derivation {
  std::string rule;
  std::string judgment; // "Δ |- P" rendered at the node
  std::vector<Derivation> premises;
};

// Indented premise tree, one judgment per line.
std::string render_derivation(const Derivation& d);

struct TypeCheckResult {
  bool ok = false;
  Derivation derivation; // valid when ok
  std::string error;     // valid when !ok
  // Session type of the positive endpoint for every restriction node,
  // keyed by its address within the checked term; annotations are
  // echoed, unannotated restrictions carry the inferred type.
  std::map<const void*, SessionTypePtr> res_types;
};

// Checks env |- p. Restriction annotations are honored and verified;
// unannotated restrictions get their type inferred by first-order
// unification (equality constraints only: inference never exploits
// subtyping slack, annotated programs do).
TypeCheckResult typecheck_session(const TypeEnv& env, const SessionProcPtr& p);

// The parallel split used by the typing rule: base entries are copied,
// each session entry follows the side where its endpoint occurs free,
// and unused ones default left.
std::pair<TypeEnv, TypeEnv> env_split(const TypeEnv& env,
                                      const SessionProcPtr& left,
                                      const SessionProcPtr& right);

} // namespace sess2gts
