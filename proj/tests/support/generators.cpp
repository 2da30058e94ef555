#include "support/generators.hpp"

#include <algorithm>
#include <set>

namespace gsn::testing {

namespace {

int pick(Rng &rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(Rng &rng, double p) { return std::uniform_real_distribution<>(0.0, 1.0)(rng) < p; }

std::string word(Rng &rng) {
  static const char *words[] = {"system", "risk",  "hazard", "claim",  "safe",
                                "context", "model", "review", "assure", "operate"};
  return words[pick(rng, 0, 9)];
}

std::string random_statement(Rng &rng, std::vector<std::string> *roles_out) {
  std::string out;
  int segments = pick(rng, 1, 6);
  for (int i = 0; i < segments; ++i) {
    if (!out.empty())
      out += ' ';
    int kind = pick(rng, 0, 9);
    if (kind == 0 && roles_out) {
      std::string role = "Role " + std::to_string(pick(rng, 0, 3));
      out += '{' + role + '}';
      roles_out->push_back(role);
    } else if (kind == 1) {
      out += "\\{" + word(rng) + "\\}"; // literal braces
    } else if (kind == 2) {
      out += '"' + word(rng) + '"';
    } else if (kind == 3) {
      out += word(rng) + "\\" + "\\"; // lone backslash (escaped)
    } else {
      out += word(rng);
    }
  }
  return out;
}

NodeKind random_kind(Rng &rng) {
  static const NodeKind kinds[] = {NodeKind::Goal,        NodeKind::Strategy,
                                   NodeKind::Solution,    NodeKind::Context,
                                   NodeKind::Assumption,  NodeKind::Justification,
                                   NodeKind::ModuleRef,   NodeKind::AwayGoal};
  return kinds[pick(rng, 0, 7)];
}

} // namespace

dsl::Document random_document(Rng &rng, int max_nodes) {
  dsl::Document doc;
  int module_count = pick(rng, 1, 3);
  int budget = std::max(1, max_nodes);
  for (int m = 0; m < module_count; ++m) {
    dsl::Document::Entry entry;
    auto &g = entry.graph;
    g.module_name = "m" + std::to_string(m);
    int node_count = std::min(budget, pick(rng, 1, std::max(1, max_nodes / module_count)));
    budget -= node_count;

    for (int i = 0; i < node_count; ++i) {
      Node n;
      n.id = "n" + std::to_string(i);
      if (chance(rng, 0.1))
        n.id += chance(rng, 0.5) ? ".x" : "-y";
      n.kind = random_kind(rng);
      std::vector<std::string> roles;
      n.statement = random_statement(rng, &roles);
      n.undeveloped = chance(rng, 0.2);
      n.uninstantiated = chance(rng, 0.2) || !roles.empty();
      if (n.kind == NodeKind::ModuleRef)
        n.ref = chance(rng, 0.5) ? "ext" + std::to_string(pick(rng, 0, 2)) : n.id;
      if (n.kind == NodeKind::AwayGoal)
        n.ref = "ext" + std::to_string(pick(rng, 0, 2)) + "::g" + std::to_string(pick(rng, 0, 5));
      g.nodes.push_back(std::move(n));
    }

    std::set<std::pair<std::pair<std::string, std::string>, EdgeKind>> seen;
    int edge_count = pick(rng, 0, node_count * 2);
    for (int i = 0; i < edge_count; ++i) {
      Edge e;
      e.source = g.nodes[pick(rng, 0, node_count - 1)].id;
      if (chance(rng, 0.1)) {
        e.target = "ext" + std::to_string(pick(rng, 0, 2)) + "::g" + std::to_string(i);
      } else {
        e.target = g.nodes[pick(rng, 0, node_count - 1)].id;
      }
      if (e.source == e.target)
        continue;
      e.kind = chance(rng, 0.7) ? EdgeKind::SupportedBy : EdgeKind::InContextOf;
      if (!seen.insert({{e.source, e.target}, e.kind}).second)
        continue;
      if (chance(rng, 0.15)) {
        int min = pick(rng, 0, 3);
        std::optional<int> max;
        if (chance(rng, 0.7))
          max = min + pick(rng, 0, 2);
        e.decoration = make_multiplicity(min, max);
      } else if (chance(rng, 0.1)) {
        e.decoration = OptionalLink{};
      }
      g.edges.push_back(std::move(e));
    }

    // Choice groups over nodes with several undecorated outgoing edges.
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::map<std::string, std::vector<size_t>> candidates;
      for (size_t i = 0; i < g.edges.size(); ++i)
        if (std::holds_alternative<std::monostate>(g.edges[i].decoration))
          candidates[g.edges[i].source].push_back(i);
      std::vector<std::string> sources;
      for (const auto &[source, idxs] : candidates)
        if (idxs.size() >= 2)
          sources.push_back(source);
      if (sources.empty())
        break;
      std::string source = sources[pick(rng, 0, static_cast<int>(sources.size()) - 1)];
      std::string group = "cg" + std::to_string(attempt);
      if (g.find_choice_group(group))
        break;
      const auto &idxs = candidates[source];
      for (size_t idx : idxs)
        g.edges[idx].decoration = ChoiceMember{group};
      ChoiceGroup cg;
      cg.group = group;
      cg.source = source;
      cg.min = 1;
      cg.max = pick(rng, 1, static_cast<int>(idxs.size()));
      g.choice_groups.push_back(std::move(cg));
    }

    for (int i = 0; i < 2 && !g.edges.empty(); ++i) {
      if (!chance(rng, 0.4))
        continue;
      const Edge &e = g.edges[pick(rng, 0, static_cast<int>(g.edges.size()) - 1)];
      std::string id = "ACP" + std::to_string(i);
      bool dup = std::any_of(g.acps.begin(), g.acps.end(),
                             [&](const Acp &a) { return a.id == id; });
      if (dup)
        continue;
      g.acps.push_back({id, e.ref(), "conf" + std::to_string(i), {}});
    }

    for (const auto &n : g.nodes)
      if (chance(rng, 0.2))
        g.public_ids.push_back(n.id);

    doc.modules.push_back(std::move(entry));
    if (budget <= 0)
      break;
  }
  return doc;
}

ArgumentGraph random_dag(Rng &rng, int nodes, double edge_density) {
  ArgumentGraph g;
  g.module_name = "dag";
  for (int i = 0; i < nodes; ++i) {
    Node n;
    n.id = "d" + std::to_string(i);
    int kind = pick(rng, 0, 9);
    n.kind = kind < 6 ? NodeKind::Goal : (kind < 9 ? NodeKind::Strategy : NodeKind::Solution);
    n.statement = word(rng);
    g.nodes.push_back(std::move(n));
  }
  // Edges only from lower to higher index: acyclic by construction.
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j)
      if (chance(rng, edge_density) && g.nodes[i].kind != NodeKind::Solution)
        g.edges.push_back({g.nodes[i].id, g.nodes[j].id, EdgeKind::SupportedBy, {}, {}});
  return g;
}

// ---------------------------------------------------------------------------
// Valid patterns
// ---------------------------------------------------------------------------

ArgumentGraph random_pattern(Rng &rng, int max_nodes) {
  ArgumentGraph g;
  g.module_name = "pat";
  int counter = 0;
  std::set<std::string> roles_used;

  auto fresh = [&](const char *prefix) { return std::string(prefix) + std::to_string(counter++); };

  auto add_node = [&](NodeKind kind, bool leaf) {
    Node n;
    n.id = fresh(kind == NodeKind::Goal       ? "G"
                 : kind == NodeKind::Strategy ? "S"
                 : kind == NodeKind::Solution ? "Sn"
                                              : "C");
    n.kind = kind;
    std::vector<std::string> roles;
    std::string statement = word(rng) + " " + word(rng);
    if (chance(rng, 0.4)) {
      std::string role = "Role " + std::to_string(pick(rng, 0, 4));
      statement += " {" + role + "}";
      roles.push_back(role);
      roles_used.insert(role);
    }
    n.statement = statement;
    n.uninstantiated = !roles.empty();
    n.undeveloped = leaf && kind == NodeKind::Goal && chance(rng, 0.5);
    g.nodes.push_back(n);
    return g.nodes.back().id;
  };

  // Grow a tree of goals and strategies breadth-first.
  std::vector<std::string> frontier;
  frontier.push_back(add_node(NodeKind::Goal, false));
  while (!frontier.empty() && static_cast<int>(g.nodes.size()) < max_nodes) {
    std::string parent = frontier.front();
    frontier.erase(frontier.begin());
    const Node *parent_node = g.find_node(parent);
    bool parent_is_strategy = parent_node->kind == NodeKind::Strategy;
    int children = pick(rng, parent_is_strategy ? 1 : 0, 3);
    if (static_cast<int>(g.nodes.size()) + children > max_nodes)
      children = std::max(parent_is_strategy ? 1 : 0, max_nodes - static_cast<int>(g.nodes.size()));
    bool any_child = false;
    for (int c = 0; c < children; ++c) {
      int kind_pick = pick(rng, 0, 9);
      NodeKind kind = parent_is_strategy
                          ? NodeKind::Goal
                          : (kind_pick < 6 ? NodeKind::Goal
                                           : (kind_pick < 8 ? NodeKind::Strategy
                                                            : NodeKind::Solution));
      bool leaf = kind != NodeKind::Strategy && chance(rng, 0.5);
      std::string child = add_node(kind, leaf);
      g.edges.push_back({parent, child, EdgeKind::SupportedBy, {}, {}});
      if (!leaf && kind != NodeKind::Solution)
        frontier.push_back(child);
      any_child = true;
    }
    // Context-side attachments.
    if (chance(rng, 0.3) && static_cast<int>(g.nodes.size()) < max_nodes) {
      NodeKind kind = chance(rng, 0.6)   ? NodeKind::Context
                      : chance(rng, 0.5) ? NodeKind::Assumption
                                         : NodeKind::Justification;
      std::string ctx = add_node(kind, true);
      g.edges.push_back({parent, ctx, EdgeKind::InContextOf, {}, {}});
    }
    if (!any_child && !parent_is_strategy) {
      // Childless goal: mark undeveloped unless it stays a bare root.
      for (auto &n : g.nodes)
        if (n.id == parent && chance(rng, 0.5))
          n.undeveloped = true;
    }
  }
  // Strategies queued but left childless when the budget ran out get a goal.
  std::vector<std::string> bare_strategies;
  for (const auto &n : g.nodes) {
    if (n.kind != NodeKind::Strategy)
      continue;
    bool has_child = std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge &e) {
      return e.source == n.id && e.kind == EdgeKind::SupportedBy;
    });
    if (!has_child)
      bare_strategies.push_back(n.id);
  }
  for (const auto &strategy : bare_strategies) {
    Node leaf;
    leaf.id = fresh("G");
    leaf.kind = NodeKind::Goal;
    leaf.statement = word(rng);
    leaf.undeveloped = true;
    g.nodes.push_back(leaf);
    g.edges.push_back({strategy, leaf.id, EdgeKind::SupportedBy, {}, {}});
  }
  // Undeveloped goals must not have SupportedBy children; the tree growth
  // above only marks leaves, so just assert-fix any stragglers.
  for (auto &n : g.nodes) {
    if (!n.undeveloped)
      continue;
    bool has_child = std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge &e) {
      return e.source == n.id && e.kind == EdgeKind::SupportedBy;
    });
    if (has_child)
      n.undeveloped = false;
  }

  // In-tree descendant test: target subtrees are disjoint iff neither edge's
  // target reaches the other's source.
  auto reaches = [&](const std::string &from, const std::string &to) {
    std::set<std::string> seen{from};
    std::vector<std::string> work{from};
    while (!work.empty()) {
      auto cur = work.back();
      work.pop_back();
      if (cur == to)
        return true;
      for (const auto &e : g.edges)
        if (e.source == cur && seen.insert(e.target).second)
          work.push_back(e.target);
    }
    return from == to;
  };

  // Multiplicity on a few SupportedBy edges with pairwise disjoint subtrees.
  std::vector<size_t> mult_edges;
  for (size_t i = 0; i < g.edges.size() && mult_edges.size() < 3; ++i) {
    if (!chance(rng, 0.3))
      continue;
    auto &e = g.edges[i];
    if (e.kind != EdgeKind::SupportedBy ||
        !std::holds_alternative<std::monostate>(e.decoration))
      continue;
    bool nested = std::any_of(mult_edges.begin(), mult_edges.end(), [&](size_t j) {
      const auto &other = g.edges[j];
      return reaches(e.target, other.source) || reaches(other.target, e.source) ||
             e.target == other.source || other.target == e.source;
    });
    if (nested)
      continue;
    int min = pick(rng, 1, 2);
    std::optional<int> max;
    if (chance(rng, 0.6))
      max = min + pick(rng, 0, 2);
    if (min == 1 && max && *max == 1)
      max = 3;
    e.decoration = make_multiplicity(min, max);
    mult_edges.push_back(i);
  }

  // One choice group over an eligible fan-out.
  std::map<std::string, std::vector<size_t>> fanout;
  for (size_t i = 0; i < g.edges.size(); ++i)
    if (g.edges[i].kind == EdgeKind::SupportedBy &&
        std::holds_alternative<std::monostate>(g.edges[i].decoration))
      fanout[g.edges[i].source].push_back(i);
  for (auto &[source, idxs] : fanout) {
    if (idxs.size() < 2 || !chance(rng, 0.6))
      continue;
    ChoiceGroup cg;
    cg.group = "alt";
    cg.source = source;
    cg.min = 1;
    cg.max = pick(rng, 1, static_cast<int>(idxs.size()));
    for (size_t idx : idxs)
      g.edges[idx].decoration = ChoiceMember{"alt"};
    g.choice_groups.push_back(cg);
    break;
  }

  // Optional context links, plus optional support branches where a goal
  // keeps at least one mandatory child (strategies must not end up bare).
  std::map<std::string, int> goal_fanout;
  for (const auto &e : g.edges)
    if (e.kind == EdgeKind::SupportedBy &&
        g.find_node(e.source)->kind == NodeKind::Goal &&
        std::holds_alternative<std::monostate>(e.decoration))
      ++goal_fanout[e.source];
  for (auto &e : g.edges) {
    if (e.kind == EdgeKind::InContextOf && chance(rng, 0.3)) {
      e.decoration = OptionalLink{};
    } else if (e.kind == EdgeKind::SupportedBy && chance(rng, 0.2) &&
               std::holds_alternative<std::monostate>(e.decoration) &&
               g.find_node(e.source)->kind == NodeKind::Goal &&
               goal_fanout[e.source] >= 2) {
      e.decoration = OptionalLink{};
      --goal_fanout[e.source];
    }
  }

  return g;
}

BindingSet random_bindings(Rng &rng, const ArgumentGraph &pattern) {
  BindingSet b;
  std::set<std::string> roles;
  for (const auto &n : pattern.nodes) {
    auto found = try_placeholders(n.statement);
    if (found)
      roles.insert(found->begin(), found->end());
  }
  for (const auto &role : roles)
    if (chance(rng, 0.7))
      b.roles[role] = word(rng) + " " + word(rng);

  for (const auto &e : pattern.edges) {
    if (const auto *m = std::get_if<Multiplicity>(&e.decoration)) {
      int hi = m->max ? std::min(*m->max, 3) : 3;
      int lo = std::min(m->min, hi);
      if (chance(rng, 0.8))
        b.counts[e.ref()] = pick(rng, lo, hi);
    } else if (std::holds_alternative<OptionalLink>(e.decoration)) {
      if (chance(rng, 0.7))
        b.includes[e.ref()] = chance(rng, 0.5);
    }
  }
  for (const auto &cg : pattern.choice_groups) {
    auto members = pattern.choice_members(cg.group);
    std::vector<std::string> targets;
    for (const auto &m : members)
      targets.push_back(m.target);
    std::shuffle(targets.begin(), targets.end(), rng);
    int n = pick(rng, cg.min, std::min<int>(cg.max, static_cast<int>(targets.size())));
    targets.resize(n);
    std::sort(targets.begin(), targets.end());
    b.choices[cg.group] = targets;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Trace cases
// ---------------------------------------------------------------------------

RandomTraceCase random_trace_case(Rng &rng, int max_entities) {
  RandomTraceCase out;

  ArgumentGraph module = random_pattern(rng, 12);
  module.module_name = "m";
  // Strip pattern abstractions: bind nothing, keep the shape concrete.
  for (auto &e : module.edges)
    e.decoration = std::monostate{};
  module.choice_groups.clear();
  for (auto &n : module.nodes) {
    n.uninstantiated = false;
    std::string cleaned;
    for (size_t i = 0; i < n.statement.size(); ++i)
      if (n.statement[i] != '{' && n.statement[i] != '}')
        cleaned.push_back(n.statement[i]);
    n.statement = cleaned;
  }
  out.archive.modules.emplace("m", module);
  out.archive.tags.emplace("m", ModuleTag::System);

  std::vector<std::string> goals, contexts, solutions;
  for (const auto &n : module.nodes) {
    if (n.kind == NodeKind::Goal)
      goals.push_back(n.id);
    else if (n.kind == NodeKind::Context)
      contexts.push_back(n.id);
    else if (n.kind == NodeKind::Solution)
      solutions.push_back(n.id);
  }

  auto &model = out.model;
  int budget = std::max(4, max_entities);
  int hazard_count = pick(rng, 1, std::max(1, budget / 8));
  int req_count = pick(rng, 1, std::max(1, budget / 4));
  int ml_count = pick(rng, 0, std::max(0, budget / 6));
  int ev_count = pick(rng, 1, budget - hazard_count - req_count - ml_count);

  for (int i = 0; i < hazard_count; ++i)
    model.hazards.push_back({"H" + std::to_string(i), word(rng), ""});
  for (int i = 0; i < req_count; ++i) {
    SafetyRequirement r;
    r.id = "R" + std::to_string(i);
    r.text = word(rng);
    int mitigations = pick(rng, 1, hazard_count);
    std::set<std::string> picked;
    for (int j = 0; j < mitigations; ++j)
      picked.insert("H" + std::to_string(pick(rng, 0, hazard_count - 1)));
    r.mitigates.assign(picked.begin(), picked.end());
    model.requirements.push_back(std::move(r));
  }
  for (int i = 0; i < ml_count; ++i) {
    MlSafetyRequirement m;
    m.id = "M" + std::to_string(i);
    m.text = word(rng);
    int parents = pick(rng, 1, std::min(2, req_count));
    std::set<std::string> picked;
    for (int j = 0; j < parents; ++j)
      picked.insert("R" + std::to_string(pick(rng, 0, req_count - 1)));
    m.derived_from.assign(picked.begin(), picked.end());
    m.metric = {"metric", 0.5, MetricDirection::AtLeast};
    model.ml_requirements.push_back(std::move(m));
  }
  for (int i = 0; i < ev_count; ++i) {
    EvidenceItem e;
    e.id = "E" + std::to_string(i);
    e.kind = "test_result";
    int supports = pick(rng, 1, 2);
    std::set<std::string> picked;
    for (int j = 0; j < supports; ++j) {
      if (ml_count > 0 && chance(rng, 0.4))
        picked.insert("M" + std::to_string(pick(rng, 0, ml_count - 1)));
      else
        picked.insert("R" + std::to_string(pick(rng, 0, req_count - 1)));
    }
    e.supports.assign(picked.begin(), picked.end());
    e.valid = chance(rng, 0.85);
    model.evidence.push_back(std::move(e));
  }

  auto bind_claim = [&](const std::string &entity) {
    if (!chance(rng, 0.6))
      return;
    bool use_context = !contexts.empty() && chance(rng, 0.4);
    const auto &pool = use_context ? contexts : goals;
    if (pool.empty())
      return;
    model.gsn_bindings[entity] = qualify("m", pool[pick(rng, 0, static_cast<int>(pool.size()) - 1)]);
  };
  for (const auto &h : model.hazards)
    bind_claim(h.id);
  for (const auto &r : model.requirements)
    bind_claim(r.id);
  for (const auto &m : model.ml_requirements)
    bind_claim(m.id);
  for (const auto &e : model.evidence)
    if (!solutions.empty() && chance(rng, 0.5))
      model.gsn_bindings[e.id] =
          qualify("m", solutions[pick(rng, 0, static_cast<int>(solutions.size()) - 1)]);

  return out;
}

} // namespace gsn::testing
