#pragma once

#include "gsn/core.hpp"
#include "gsn/dsl.hpp"

#include <string>
#include <vector>

namespace gsn {

/// Structural rules. One Diagnostic per violation, each citing exactly one
/// code. V011 is an Error for a module with no root goal and a Warning for
/// more than one (pattern fragments are individually rooted). Unresolved
/// cross-module references are reported as W001 Warnings here; composition
/// turns them into Errors.
///
/// Consequential codes: some seeded violations necessarily trip a second
/// rule. The documented pairs are:
///   V005 (solution with outgoing SupportedBy) also raises V001, because a
///        Solution is never a legal SupportedBy source;
///   V004 back-edges that consume a module's only root goal also raise V011.
/// All other rules can be violated in isolation.
struct Rule {
  std::string code;
  std::string description;
};

/// The rule table, V001..V012 in order.
const std::vector<Rule> &validation_rules();

/// Runs V001..V012 (plus W001 cross-module warnings) over every module.
/// Total: never throws on malformed structure. Deterministic: diagnostics
/// ordered by span then code.
std::vector<Diagnostic> validate(const dsl::Document &doc);
std::vector<Diagnostic> validate(const ArgumentGraph &graph);

/// Cycles in the SupportedBy subgraph, each as a node sequence that starts
/// and ends on the same node and repeats no other node. Empty iff acyclic.
/// One witness cycle is reported per back edge found.
std::vector<std::vector<std::string>> check_acyclic(const ArgumentGraph &graph);

} // namespace gsn
