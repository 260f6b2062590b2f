#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sess2gts/ast.hpp"
#include "sess2gts/session_dynamics.hpp"

namespace sess2gts {

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

// Simultaneous capture-avoiding substitution of output arguments for input
// binders. A channel argument renames every occurrence; a value argument
// replaces variable occurrences inside expressions and leaves subject
// positions untouched (such terms are ill-typed and merely stay stuck).
// Closed comparisons evaluate. Throws std::invalid_argument on a length
// mismatch.
GenericProcPtr subst_generic(const GenericProcPtr& p,
                             const std::vector<std::string>& binders,
                             const std::vector<GArg>& args);

// ---------------------------------------------------------------------------
// Structural preorder
// ---------------------------------------------------------------------------

// Prenex parallel form: restrictions pulled to the front (alpha-freshly),
// parallel flattened, nil threads dropped, replicated nil erased. Nothing
// moves across a prefix, a sum, or into a replication body.
struct GenericPrenex {
  std::vector<std::string> binders;
  std::vector<GenericProcPtr> threads;
};

GenericPrenex generic_prenex(const GenericProcPtr& p);
GenericProcPtr rebuild(const GenericPrenex& f);

Verdict struct_leq(const GenericProcPtr& a, const GenericProcPtr& b,
                   const StructOptions& opts = {});
Verdict struct_equiv(const GenericProcPtr& a, const GenericProcPtr& b,
                     const StructOptions& opts = {});

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

struct GenericRedex {
  std::string chan;
  std::size_t arity = 0;
  bool chan_bound = false; // channel is restriction-bound at the top
  // Positions of the two sums in the exposed thread listing (replicated
  // threads contribute one unfolded copy each).
  std::size_t pos_in = 0, pos_out = 0;
};

std::string redex_str(const GenericRedex& r); // "com x /n"

// All one-step reducts up to the structural preorder, deterministically
// ordered and canonicalized to prenex parallel form. A communication joins
// an input arm and an output arm on the same channel from two distinct
// parallel sums, discarding the remaining arms of both; arity-mismatched
// pairs produce no step.
std::vector<std::pair<GenericRedex, GenericProcPtr>> reduce_generic(
    const GenericProcPtr& p, const StructOptions& opts = {});

// An exposed same-channel input/output pair whose arities differ, or two
// parallel sums exposing outputs (or inputs) on one channel: a race.
// Exposure unfolds every replication twice per level, three levels deep,
// which covers any race reachable by unfolding alone unless replications
// nest more than three deep with no other threads in between.
bool is_generic_error(const GenericProcPtr& p);

} // namespace sess2gts
