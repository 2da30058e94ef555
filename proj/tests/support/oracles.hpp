#pragma once

#include "gsn/composer.hpp"
#include "gsn/core.hpp"
#include "gsn/pattern.hpp"
#include "gsn/trace.hpp"

#include <set>
#include <string>
#include <vector>

namespace gsn::testing {

// Brute-force implementations kept independent of the library code paths
// they check: adjacency-matrix reachability instead of worklist BFS, and a
// from-scratch coverage recomputation.

std::set<std::string> oracle_roots(const ArgumentGraph &g);

std::set<std::string> oracle_ancestors(const ArgumentGraph &g, const std::string &id);

// All elementary cycles of the SupportedBy subgraph (use on graphs <= 20
// nodes). Each cycle is normalized to start at its smallest node id and is
// returned without the repeated endpoint.
std::vector<std::vector<std::string>> oracle_elementary_cycles(const ArgumentGraph &g);

struct OracleCounts {
  int nodes = 0;
  int edges = 0;
};

// Expected node/edge counts after instantiation, computed by independent
// subtree-copy accounting (assumes surviving multiplicity subtrees are
// disjoint, which the pattern generator guarantees).
OracleCounts oracle_instance_counts(const ArgumentGraph &pattern, const BindingSet &bindings);

struct OracleImpact {
  std::set<std::string> affected_requirements;
  std::set<std::string> affected_hazards;
  std::set<std::string> challenged_claims;
};

// Full recomputation: coverage before/after invalidation plus matrix
// reachability for challenged claims over the single-module archive.
OracleImpact oracle_impact(const TraceModel &model, const CaseArchive &archive,
                           const std::string &evidence_id);

} // namespace gsn::testing
