#pragma once

// Bounded decision procedure for the structural preorder, shared by the two
// calculi. The search spawns replication copies on the smaller side until the
// thread counts agree, then looks for a bijective alpha-matching of threads.
// The calculus plugs in two callbacks: an is-replication test and a copy
// factory producing one freshly renamed unfolding of a replication body.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sess2gts/alpha.hpp"
#include "sess2gts/session_dynamics.hpp"

namespace sess2gts {

template <class Proc>
struct EngCopy {
  std::vector<std::string> binders; // fresh names of the pulled restrictions
  std::vector<Proc> threads;
};

template <class Proc>
struct LeqEngine {
  const StructOptions& opts;
  // Returns one unfolded copy, or nothing when the body contributes no
  // threads (a copy that adds nothing never helps the search).
  std::function<std::optional<EngCopy<Proc>>(const Proc&)> copy;
  std::function<bool(const Proc&)> is_repl;

  int nodes = 0;
  bool budget_hit = false;
  bool exhausted = false;

  bool tick() {
    if (++nodes > opts.max_search_nodes) {
      exhausted = true;
      return false;
    }
    return true;
  }

  bool match_threads(const std::vector<Proc>& av, const std::vector<Proc>& bv,
                     std::vector<bool>& used, std::size_t k,
                     const NameBij& bij) {
    if (!tick()) return false;
    if (k == bv.size()) return true;
    for (std::size_t i = 0; i < av.size(); ++i) {
      if (used[i]) continue;
      NameBij b2 = bij;
      if (alpha_eq_flex(av[i], bv[k], b2)) {
        used[i] = true;
        if (match_threads(av, bv, used, k + 1, b2)) return true;
        used[i] = false;
      }
    }
    return false;
  }

  // Spawn copies in nondecreasing thread order (each multiset of copies is
  // tried once), budgeted per replicated thread.
  bool search(std::vector<Proc> a, const std::vector<Proc>& b, NameBij bij,
              std::map<const void*, int> spawns, std::size_t min_spawn) {
    if (!tick()) return false;
    if (a.size() == b.size()) {
      std::vector<bool> used(a.size(), false);
      return match_threads(a, b, used, 0, bij);
    }
    if (a.size() > b.size()) return false;
    for (std::size_t i = min_spawn; i < a.size(); ++i) {
      if (!is_repl(a[i])) continue;
      auto cp = copy(a[i]);
      if (!cp) continue;
      if (a.size() + cp->threads.size() > b.size()) continue;
      const void* key = a[i].get();
      if (spawns[key] >= opts.repl_budget) {
        budget_hit = true;
        continue;
      }
      NameBij b2 = bij;
      for (const auto& nm : cp->binders) b2.flex_left.insert(nm);
      std::vector<Proc> a2 = a;
      a2.insert(a2.end(), cp->threads.begin(), cp->threads.end());
      auto spawns2 = spawns;
      ++spawns2[key];
      if (search(std::move(a2), b, std::move(b2), std::move(spawns2), i))
        return true;
    }
    return false;
  }
};

} // namespace sess2gts
