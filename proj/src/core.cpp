#include "gsn/core.hpp"

#include "placeholder_scan.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <sstream>

namespace gsn {

std::string to_string(NodeKind k) {
  switch (k) {
  case NodeKind::Goal:
    return "goal";
  case NodeKind::Strategy:
    return "strategy";
  case NodeKind::Solution:
    return "solution";
  case NodeKind::Context:
    return "context";
  case NodeKind::Assumption:
    return "assumption";
  case NodeKind::Justification:
    return "justification";
  case NodeKind::ModuleRef:
    return "moduleref";
  case NodeKind::AwayGoal:
    return "awaygoal";
  }
  return "goal";
}

std::string to_string(EdgeKind k) {
  return k == EdgeKind::SupportedBy ? "supported_by" : "in_context_of";
}

std::optional<NodeKind> node_kind_from(std::string_view name) {
  static const std::map<std::string_view, NodeKind> table = {
      {"goal", NodeKind::Goal},
      {"strategy", NodeKind::Strategy},
      {"solution", NodeKind::Solution},
      {"context", NodeKind::Context},
      {"assumption", NodeKind::Assumption},
      {"justification", NodeKind::Justification},
      {"moduleref", NodeKind::ModuleRef},
      {"awaygoal", NodeKind::AwayGoal},
  };
  auto it = table.find(name);
  if (it == table.end())
    return std::nullopt;
  return it->second;
}

bool is_valid_id(std::string_view id) {
  if (id.empty() || !std::isalpha(static_cast<unsigned char>(id.front())))
    return false;
  return std::all_of(id.begin() + 1, id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

bool is_qualified(std::string_view id) { return id.find("::") != std::string_view::npos; }

std::pair<std::string, std::string> split_qualified(std::string_view id) {
  auto pos = id.find("::");
  if (pos == std::string_view::npos)
    return {"", std::string(id)};
  return {std::string(id.substr(0, pos)), std::string(id.substr(pos + 2))};
}

std::string qualify(std::string_view module, std::string_view id) {
  std::string out(module);
  out += "::";
  out += id;
  return out;
}

EdgeDecoration make_multiplicity(int min, std::optional<int> max) {
  if (min == 1 && max && *max == 1)
    return std::monostate{};
  return Multiplicity{min, max};
}

std::string to_string(const EdgeRef &ref) {
  std::ostringstream out;
  out << ref.source << " -> " << ref.target << " : " << to_string(ref.kind);
  return out.str();
}

const Node *ArgumentGraph::find_node(std::string_view id) const {
  for (const auto &n : nodes)
    if (n.id == id)
      return &n;
  return nullptr;
}

const Edge *ArgumentGraph::find_edge(const EdgeRef &ref) const {
  for (const auto &e : edges)
    if (e.ref() == ref)
      return &e;
  return nullptr;
}

const ChoiceGroup *ArgumentGraph::find_choice_group(std::string_view group) const {
  for (const auto &g : choice_groups)
    if (g.group == group)
      return &g;
  return nullptr;
}

std::vector<EdgeRef> ArgumentGraph::choice_members(std::string_view group) const {
  std::vector<EdgeRef> members;
  for (const auto &e : edges)
    if (const auto *cm = std::get_if<ChoiceMember>(&e.decoration); cm && cm->group == group)
      members.push_back(e.ref());
  return members;
}

std::vector<std::string> roots(const ArgumentGraph &graph) {
  std::set<std::string> supported;
  for (const auto &e : graph.edges)
    if (e.kind == EdgeKind::SupportedBy)
      supported.insert(e.target);
  std::vector<std::string> out;
  for (const auto &n : graph.nodes)
    if (n.kind == NodeKind::Goal && !supported.count(n.id))
      out.push_back(n.id);
  return out;
}

std::set<std::string> ancestors(const ArgumentGraph &graph, const std::string &id) {
  if (!graph.find_node(id))
    throw Error("unknown node id '" + id + "' in module '" + graph.module_name + "'");
  // Reverse adjacency over SupportedBy: target -> sources.
  std::multimap<std::string, std::string> rev;
  for (const auto &e : graph.edges)
    if (e.kind == EdgeKind::SupportedBy)
      rev.emplace(e.target, e.source);
  std::set<std::string> seen;
  std::deque<std::string> work{id};
  while (!work.empty()) {
    auto cur = work.front();
    work.pop_front();
    auto [lo, hi] = rev.equal_range(cur);
    for (auto it = lo; it != hi; ++it) {
      if (seen.insert(it->second).second)
        work.push_back(it->second);
    }
  }
  seen.erase(id);
  return seen;
}

std::optional<std::vector<std::string>> try_placeholders(std::string_view statement) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  auto err = detail::scan_placeholders(
      statement,
      [&](std::string_view role) {
        if (seen.insert(std::string(role)).second)
          out.emplace_back(role);
      },
      [](std::string_view) {});
  if (!err.empty())
    return std::nullopt;
  return out;
}

std::vector<std::string> placeholders(std::string_view statement) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  auto err = detail::scan_placeholders(
      statement,
      [&](std::string_view role) {
        if (seen.insert(std::string(role)).second)
          out.emplace_back(role);
      },
      [](std::string_view) {});
  if (!err.empty())
    throw Error("malformed placeholder: " + err);
  return out;
}

std::vector<std::string> placeholders(const Node &node) { return placeholders(node.statement); }

bool is_pattern(const ArgumentGraph &graph) {
  if (!graph.choice_groups.empty())
    return true;
  for (const auto &n : graph.nodes) {
    if (n.uninstantiated)
      return true;
    auto roles = try_placeholders(n.statement);
    if (roles && !roles->empty())
      return true;
  }
  for (const auto &e : graph.edges)
    if (!std::holds_alternative<std::monostate>(e.decoration))
      return true;
  return false;
}

} // namespace gsn
