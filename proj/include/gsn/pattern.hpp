#pragma once

#include "gsn/core.hpp"
#include "gsn/diagnostics.hpp"

#include <map>
#include <string>
#include <vector>

namespace gsn {

/// Everything needed to turn one pattern into a concrete argument:
/// role texts, replication counts for multiplicity edges, selected members
/// per choice group and inclusion flags for optional edges. Optional edges
/// default to excluded; replication counts default to the declared minimum;
/// choice groups must be selected explicitly (their minimum is never zero).
struct BindingSet {
  std::map<std::string, std::string> roles;
  std::map<std::pair<std::string, int>, std::string> indexed_roles;
  std::map<EdgeRef, int> counts;
  std::map<std::string, std::vector<std::string>> choices; // group -> member targets
  std::map<EdgeRef, bool> includes;
};

/// Bindings file: `role "Name" = "text"`, `role "Name"[i] = "text"`,
/// `count SRC -> DST [: kind] = k`, `choose GROUP = ID, ID`,
/// `include SRC -> DST [: kind] = true|false`, `#` comments.
/// Throws Error on the first malformed line (code B001 in the message).
BindingSet parse_bindings(std::string_view text, const std::string &file);

struct InstantiationReport {
  std::vector<std::pair<std::string, std::string>> remaining_placeholders; // (node, role)
  std::vector<std::string> remaining_undeveloped;
  bool fully_instantiated = false;
};

struct InstantiationResult {
  ArgumentGraph graph;
  InstantiationReport report;
};

/// Instantiates a pattern:
///   1. drops unselected choice members and excluded optional edges, then
///      prunes everything that is no longer reachable from the pattern's
///      original sources;
///   2. replicates the target subtree of every multiplicity edge k times,
///      suffixing replica ids `_1..k` (an existing id with that spelling is
///      an error);
///   3. substitutes bound roles -- an indexed binding wins inside the
///      matching replica -- and clears the uninstantiated flag on nodes
///      whose placeholders are all bound (module references keep theirs);
///   4. drops all decorations and choice groups from the result.
/// Unbound roles simply remain in place and are listed in the report.
/// Throws Error on bindings that do not match the pattern, violate a
/// declared cardinality, or bind a role to the empty string.
InstantiationResult instantiate(const ArgumentGraph &pattern, const BindingSet &bindings);

/// Remaining placeholder occurrences and undeveloped nodes; pure.
InstantiationReport completeness(const ArgumentGraph &graph);

} // namespace gsn
