#pragma once

#include "gsn/diagnostics.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gsn {

enum class NodeKind {
  Goal,
  Strategy,
  Solution,
  Context,
  Assumption,
  Justification,
  ModuleRef,
  AwayGoal,
};

enum class EdgeKind { SupportedBy, InContextOf };

std::string to_string(NodeKind k);
std::string to_string(EdgeKind k);
std::optional<NodeKind> node_kind_from(std::string_view name);

/// Local ids match [A-Za-z][A-Za-z0-9_.-]*; cross-module references use the
/// qualified form `module::id`.
bool is_valid_id(std::string_view id);
bool is_qualified(std::string_view id);
std::pair<std::string, std::string> split_qualified(std::string_view id);
std::string qualify(std::string_view module, std::string_view id);

/// Replication range on an edge. max == nullopt means unbounded (`n..*`).
struct Multiplicity {
  int min = 1;
  std::optional<int> max = 1;
  friend bool operator==(const Multiplicity &, const Multiplicity &) = default;
};

struct OptionalLink {
  friend bool operator==(const OptionalLink &, const OptionalLink &) = default;
};

struct ChoiceMember {
  std::string group;
  friend bool operator==(const ChoiceMember &, const ChoiceMember &) = default;
};

/// None | Multiplicity | Optional | ChoiceMember. A (1,1) multiplicity is
/// the same thing as no decoration; make_multiplicity normalizes it away.
using EdgeDecoration = std::variant<std::monostate, Multiplicity, OptionalLink, ChoiceMember>;

EdgeDecoration make_multiplicity(int min, std::optional<int> max);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Goal;
  std::string statement;
  bool undeveloped = false;
  bool uninstantiated = false;
  /// ModuleRef: the referenced module name. AwayGoal: the referenced
  /// `module::goal`. Empty for all other kinds.
  std::string ref;
  SourceSpan span;

  friend bool operator==(const Node &a, const Node &b) {
    return a.id == b.id && a.kind == b.kind && a.statement == b.statement &&
           a.undeveloped == b.undeveloped && a.uninstantiated == b.uninstantiated &&
           a.ref == b.ref;
  }
};

struct EdgeRef {
  std::string source;
  std::string target;
  EdgeKind kind = EdgeKind::SupportedBy;

  friend bool operator==(const EdgeRef &, const EdgeRef &) = default;
  friend auto operator<=>(const EdgeRef &, const EdgeRef &) = default;
};

std::string to_string(const EdgeRef &ref);

struct Edge {
  std::string source;
  std::string target; // possibly qualified
  EdgeKind kind = EdgeKind::SupportedBy;
  EdgeDecoration decoration;
  SourceSpan span;

  EdgeRef ref() const { return {source, target, kind}; }

  friend bool operator==(const Edge &a, const Edge &b) {
    return a.source == b.source && a.target == b.target && a.kind == b.kind &&
           a.decoration == b.decoration;
  }
};

/// m-of-n selection over the edges tagged `choice <group>`. Members are the
/// tagged edges themselves; they must all leave `source`.
struct ChoiceGroup {
  std::string group;
  std::string source;
  int min = 1;
  int max = 1;
  SourceSpan span;

  friend bool operator==(const ChoiceGroup &a, const ChoiceGroup &b) {
    return a.group == b.group && a.source == b.source && a.min == b.min && a.max == b.max;
  }
};

/// Assurance claim point: a pointer from one edge to a confidence module.
struct Acp {
  std::string id;
  EdgeRef attached;
  std::string confidence_module;
  SourceSpan span;

  friend bool operator==(const Acp &a, const Acp &b) {
    return a.id == b.id && a.attached == b.attached &&
           a.confidence_module == b.confidence_module;
  }
};

/// One GSN module. Immutable by convention: operations take it by const
/// reference and return new values.
struct ArgumentGraph {
  std::string module_name;
  std::vector<Node> nodes; // declaration order
  std::vector<Edge> edges;
  std::vector<ChoiceGroup> choice_groups;
  std::vector<Acp> acps;
  std::vector<std::string> public_ids;
  SourceSpan span;

  const Node *find_node(std::string_view id) const;
  const Edge *find_edge(const EdgeRef &ref) const;
  const ChoiceGroup *find_choice_group(std::string_view group) const;
  bool has_edge(const EdgeRef &ref) const { return find_edge(ref) != nullptr; }

  /// Member edges of a choice group, in declaration order.
  std::vector<EdgeRef> choice_members(std::string_view group) const;

  friend bool operator==(const ArgumentGraph &a, const ArgumentGraph &b) {
    return a.module_name == b.module_name && a.nodes == b.nodes && a.edges == b.edges &&
           a.choice_groups == b.choice_groups && a.acps == b.acps &&
           a.public_ids == b.public_ids;
  }
};

/// Goal nodes with no incoming SupportedBy edge, in declaration order.
std::vector<std::string> roots(const ArgumentGraph &graph);

/// Every node from which `id` is reachable over SupportedBy edges, i.e. the
/// claims whose support (transitively) includes `id`. Excludes `id` itself.
/// Throws Error if `id` is not a node of the graph.
std::set<std::string> ancestors(const ArgumentGraph &graph, const std::string &id);

/// Role names inside `{...}` spans, in first-occurrence order, deduplicated.
/// `\{` and `\}` are literal braces, not placeholder delimiters. Throws
/// Error on unbalanced or nested braces.
std::vector<std::string> placeholders(std::string_view statement);
std::vector<std::string> placeholders(const Node &node);

/// Non-throwing variant used by the validator; nullopt on malformed text.
std::optional<std::vector<std::string>> try_placeholders(std::string_view statement);

/// True if the graph still carries pattern abstractions (placeholders,
/// decorations, choice groups or uninstantiated flags).
bool is_pattern(const ArgumentGraph &graph);

} // namespace gsn
