#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "sess2gts/ast.hpp"

namespace sess2gts {

// Partial bijection between designated "flexible" free names of two terms.
// Used by the structural matchers to align restriction-bound names that were
// pulled to the top by normalization.
struct NameBij {
  std::map<std::string, std::string> fwd;
  std::map<std::string, std::string> bwd;
  std::set<std::string> flex_left;
  std::set<std::string> flex_right;

  // Attempt to relate a to b; true if consistent with the bijection so far.
  bool relate(const std::string& a, const std::string& b);
  bool flexible_left(const std::string& a) const { return flex_left.count(a) > 0; }
};

// Equality up to consistent renaming of bound names.
bool alpha_eq(const SessionProcPtr& a, const SessionProcPtr& b);
bool alpha_eq(const GenericProcPtr& a, const GenericProcPtr& b);
bool alpha_eq(const ProcessTypePtr& a, const ProcessTypePtr& b);
bool alpha_eq(const TypePayload& a, const TypePayload& b);

// As above, but free names listed in the bijection's flex sets may be renamed
// left-to-right as long as the mapping stays consistent; the bijection is
// extended in place. On failure the bijection may hold partial garbage and the
// caller is expected to discard it.
bool alpha_eq_flex(const SessionProcPtr& a, const SessionProcPtr& b, NameBij& bij);
bool alpha_eq_flex(const GenericProcPtr& a, const GenericProcPtr& b, NameBij& bij);
bool alpha_eq_flex(const ProcessTypePtr& a, const ProcessTypePtr& b, NameBij& bij);

// Free channel names. Session processes report bare names (a name is free if
// any polarized or unpolarized use of it is free); value variables count.
std::set<std::string> free_names(const SessionProcPtr& p);
std::set<std::string> free_names(const GenericProcPtr& p);
std::set<std::string> free_names(const ProcessTypePtr& t);

// Free uses of a session name split by polarity.
std::set<Polarity> free_polarities(const SessionProcPtr& p, const std::string& name);

// Every name token in the term, bound or free. Used to seed fresh-name
// supplies so generated names collide with nothing.
std::set<std::string> all_names(const SessionProcPtr& p);
std::set<std::string> all_names(const GenericProcPtr& p);
std::set<std::string> all_names(const ProcessTypePtr& t);

} // namespace sess2gts
