#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sess2gts/ast.hpp"

namespace sess2gts {

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

// Capture-avoiding substitution of a payload (polarized channel or value)
// for a variable. An occurrence that carries its own polarity keeps it; a
// bare occurrence inherits the payload's polarity. Substituting a value
// where a channel is required leaves the occurrence untouched (such terms
// are ill-typed and merely stay stuck). Closed comparisons evaluate.
SessionProcPtr subst_session(const SessionProcPtr& p, const std::string& var,
                             const Payload& val);

// Simultaneous vector form; throws std::invalid_argument on length mismatch.
SessionProcPtr subst_session(const SessionProcPtr& p,
                             const std::vector<std::string>& vars,
                             const std::vector<Payload>& vals);

// ---------------------------------------------------------------------------
// Structural preorder
// ---------------------------------------------------------------------------

enum class Verdict { Yes, No, Unknown };

struct StructOptions {
  // Copies a single replicated thread may contribute on the smaller side.
  int repl_budget = 2;
  // Backtracking safety valve; exceeding it yields Unknown.
  int max_search_nodes = 50000;
};

// Normal form under the preorder's invertible rules: restrictions pulled to
// the front (alpha-freshly), parallel flattened, inert components dropped,
// and replicated-nil erased. Nothing is rewritten under a prefix or inside
// a replication body.
struct PrenexBinder {
  std::string name;
  std::optional<SessionTypePtr> ann;
};

struct SessionPrenex {
  std::vector<PrenexBinder> binders;
  std::vector<SessionProcPtr> threads;
};

SessionPrenex session_prenex(const SessionProcPtr& p);
SessionProcPtr rebuild(const SessionPrenex& f);

// P is below Q in the structural preorder: Q is P with zero or more
// replication copies spawned, up to the invertible rearrangement rules.
// Restriction annotations are bookkeeping and are ignored here. Yes and No
// are definitive; Unknown means a budget stopped the search.
Verdict struct_leq(const SessionProcPtr& a, const SessionProcPtr& b,
                   const StructOptions& opts = {});

// Mutual struct_leq.
Verdict struct_equiv(const SessionProcPtr& a, const SessionProcPtr& b,
                     const StructOptions& opts = {});

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

struct SessionRedex {
  enum class Kind { Com, BranchSel };
  Kind kind = Kind::Com;
  std::string subject;          // bare channel name
  Polarity input_pol = Polarity::None; // polarity on the input/branch side
  std::string label;            // BranchSel only
  bool subject_bound = false;   // subject is restriction-bound at the top
  // Positions of the two prefixes in the exposed thread listing (replicated
  // threads contribute one unfolded copy each).
  std::size_t pos_in = 0, pos_out = 0;
};

std::string redex_str(const SessionRedex& r); // "com x" / "sel x l"

// All one-step reducts up to the structural preorder, deterministically
// ordered, each canonicalized to prenex parallel form. Restriction
// annotations on the subject advance with the step.
std::vector<std::pair<SessionRedex, SessionProcPtr>> reduce_session(
    const SessionProcPtr& p, const StructOptions& opts = {});

// A communication or branch/select pair on a polarized channel whose
// remaining parallel context still uses either endpoint of that channel,
// or a select whose label the branch does not offer.
bool is_session_error(const SessionProcPtr& p, const StructOptions& opts = {});

} // namespace sess2gts
