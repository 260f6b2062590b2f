#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sess2gts/ast.hpp"
#include "sess2gts/session_dynamics.hpp"

namespace sess2gts {

// ---------------------------------------------------------------------------
// Subtyping on process types
// ---------------------------------------------------------------------------

// The least preorder closed under the structural laws (parallel is a
// commutative monoid with 0 as unit, *0 = 0, *G below *G|G), congruence for
// every constructor, the internal-choice axioms G1 & G2 below each Gi, and
// external-choice congruence at equal arm count. Prefix payloads are
// invariant (compared up to alpha); continuations are covariant. The search
// is budgeted like struct_leq; a blown budget reports false.
bool subtype_generic(const ProcessTypePtr& a, const ProcessTypePtr& b);

// Both directions.
bool equiv_generic(const ProcessTypePtr& a, const ProcessTypePtr& b);

// Payloads: base lists must match exactly; tuple payloads need equal arity,
// bodies compared under binder alignment. A base list never relates to a
// tuple.
bool subtype_payload(const TypePayload& a, const TypePayload& b);

// ---------------------------------------------------------------------------
// Substitution on process types
// ---------------------------------------------------------------------------

// Simultaneous capture-avoiding channel renaming; tuple binders shadow.
// Throws std::invalid_argument on a length mismatch.
ProcessTypePtr subst_ptype(const ProcessTypePtr& t,
                           const std::vector<std::string>& from,
                           const std::vector<std::string>& to);

// ---------------------------------------------------------------------------
// Reduction on process types
// ---------------------------------------------------------------------------

// One-step reducts modulo the structural laws, canonicalized (threads
// flattened and sorted) and deduplicated, in deterministic order. Steps:
//   - a communication joins an exposed output and input on one channel from
//     two distinct threads (sum arms participate, discarding their
//     siblings); payloads are dropped, well-formedness checks them apart;
//   - an internal choice commits to either arm;
//   - a tau prefix fires unilaterally (also as a sum arm);
//   - replicated threads contribute one unfolded copy per step.
std::vector<ProcessTypePtr> type_reduce(const ProcessTypePtr& t);

// No input or output prefix anywhere in the term. Tau prefixes are fine.
bool is_null(const ProcessTypePtr& t);

// ---------------------------------------------------------------------------
// Bounded state-space exploration: WF and LIN
// ---------------------------------------------------------------------------

struct ExplorationBound {
  int max_depth = 64;     // reduction steps along a path
  int max_states = 4096;  // distinct canonical states per exploration
  int unfold_limit = 4096; // replication unfoldings across the exploration
};

// Parses "depth=N,states=M,unfold=K"; any subset, any order, remaining
// fields keep their defaults. Throws std::invalid_argument on junk.
ExplorationBound parse_bound(const std::string& s);

struct TypeVerdict {
  Verdict v = Verdict::Unknown;
  bool bound_hit = false;   // some exploration bound was reached
  bool used_unfold = false; // replication unfolding participated
  std::vector<std::string> witness; // trace lines, nonempty iff v == No
};

// "true" / "false" / "unknown(bound)", with witness lines appended on false
// and an unfolding note on a true that needed replication unfolding.
std::string verdict_str(const TypeVerdict& tv);

// Well-formedness: every reachable state that exposes an output and an
// input on one channel in parallel has subtype-compatible payloads (equal
// arity included). Yes means the exploration was exhaustive.
TypeVerdict is_wf(const ProcessTypePtr& t, const ExplorationBound& b = {});

// Linearity: well-formed, and no reachable state exposes a send on some
// channel whose residual can again expose a send on that channel
// (symmetrically for receives). Exposed positions include sum arms and one
// unfolded copy per replicated thread; the residual of a sum arm drops its
// sibling arms.
TypeVerdict is_lin(const ProcessTypePtr& t, const ExplorationBound& b = {});

// ---------------------------------------------------------------------------
// Typing generic processes against process types
// ---------------------------------------------------------------------------

// Annotations map restriction groups of the checked process to the process
// type assumed for the bound names, keyed by node identity.
using GtsAnnotations = std::map<const GenericProc*, ProcessTypePtr>;

// Sidecar format, one line per restriction group in preorder occurrence
// order: "new a,b: <process type>". Blank lines and '#' comments allowed.
// Throws std::invalid_argument on malformed lines, count or name mismatch.
GtsAnnotations parse_annotations(const GenericProcPtr& p, const std::string& text);

struct GtsCheckResult {
  bool ok = false;
  bool bound_hit = false; // search or LIN budget exhausted, result inconclusive
  std::string error;      // first failure when !ok
};

// Checking judgment by structural recursion over the process:
//   0 needs a null environment (internal choices may commit);
//   P|Q splits the parallel threads (replicated threads may contribute
//     bounded copies to both sides);
//   !P needs the whole environment to be a single replicated thread (or
//     null, as *0 = 0) and checks the body against its unfolding;
//   an input consumes a matching input thread and gains the instantiated
//     payload body; an output consumes an output thread and surrenders a
//     sub-environment below the instantiated payload;
//   a sum matches an external-choice thread arm by arm, in order;
//   an internal-choice thread may commit, a replicated thread may unfold,
//     both on demand;
//   a restriction extends the environment with its annotation, which must
//     be linear (missing annotations fall back to 0: names unused).
GtsCheckResult typecheck_generic(const ProcessTypePtr& env, const GenericProcPtr& p,
                                 const GtsAnnotations& ann = {},
                                 const ExplorationBound& b = {});

} // namespace sess2gts
