#include "gsn/validator.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace gsn {

namespace {

bool is_context_kind(NodeKind k) {
  return k == NodeKind::Context || k == NodeKind::Assumption || k == NodeKind::Justification;
}

bool legal_supported_by_target(NodeKind k) {
  switch (k) {
  case NodeKind::Goal:
  case NodeKind::Strategy:
  case NodeKind::Solution:
  case NodeKind::ModuleRef:
  case NodeKind::AwayGoal:
    return true;
  default:
    return false;
  }
}

class ModuleValidator {
public:
  ModuleValidator(const ArgumentGraph &graph, const dsl::Document *doc,
                  std::vector<Diagnostic> &out)
      : graph_(graph), doc_(doc), out_(out) {}

  void run() {
    edge_rules();      // V001 V002 V003
    cycles();          // V004
    node_edge_rules(); // V005 V006 V012
    placeholder_rules(); // V007 V008
    choice_rules();    // V009
    acp_rules();       // V010
    root_rule();       // V011
  }

private:
  const ArgumentGraph &graph_;
  const dsl::Document *doc_;
  std::vector<Diagnostic> &out_;

  void emit(Severity sev, const std::string &code, const std::string &message,
            const SourceSpan &span) {
    SourceSpan where = span.valid() ? span : graph_.span;
    out_.push_back({sev, code, message, where});
  }

  // Resolves an edge target: local node, or a node in another module of the
  // document. Emits W001 for qualified targets that do not resolve. Composed
  // graphs carry qualified ids as plain node ids, so the literal lookup runs
  // first.
  const Node *resolve_target(const Edge &e) {
    if (const Node *local = graph_.find_node(e.target))
      return local;
    if (!is_qualified(e.target))
      return nullptr;
    auto [module, id] = split_qualified(e.target);
    const ArgumentGraph *other = doc_ ? doc_->find_module(module) : nullptr;
    if (!other) {
      emit(Severity::Warning, "W001",
           "reference to module '" + module + "' cannot be resolved here", e.span);
      return nullptr;
    }
    const Node *node = other->find_node(id);
    if (!node)
      emit(Severity::Warning, "W001",
           "node '" + id + "' not found in module '" + module + "'", e.span);
    return node;
  }

  void edge_rules() {
    for (const auto &e : graph_.edges) {
      const Node *source = graph_.find_node(e.source);
      const Node *target = resolve_target(e);
      if (e.kind == EdgeKind::SupportedBy) {
        if (source && source->kind != NodeKind::Goal && source->kind != NodeKind::Strategy)
          emit(Severity::Error, "V001",
               "SupportedBy source '" + e.source + "' must be a goal or strategy, got " +
                   to_string(source->kind),
               e.span);
        if (target && !legal_supported_by_target(target->kind))
          emit(Severity::Error, "V002",
               "SupportedBy target '" + e.target + "' must be a goal, strategy, solution, "
               "moduleref or awaygoal, got " +
                   to_string(target->kind),
               e.span);
      } else {
        if (source && source->kind != NodeKind::Goal && source->kind != NodeKind::Strategy)
          emit(Severity::Error, "V003",
               "InContextOf source '" + e.source + "' must be a goal or strategy, got " +
                   to_string(source->kind),
               e.span);
        if (target && !is_context_kind(target->kind))
          emit(Severity::Error, "V003",
               "InContextOf target '" + e.target + "' must be a context, assumption or "
               "justification, got " +
                   to_string(target->kind),
               e.span);
      }
    }
  }

  void cycles() {
    for (const auto &cycle : check_acyclic(graph_)) {
      std::string path;
      for (size_t i = 0; i < cycle.size(); ++i) {
        if (i)
          path += " -> ";
        path += cycle[i];
      }
      const Node *head = graph_.find_node(cycle.front());
      emit(Severity::Error, "V004", "SupportedBy cycle: " + path,
           head ? head->span : graph_.span);
    }
  }

  void node_edge_rules() {
    std::map<std::string, int> outgoing_sb;
    for (const auto &e : graph_.edges)
      if (e.kind == EdgeKind::SupportedBy)
        ++outgoing_sb[e.source];
    for (const auto &n : graph_.nodes) {
      int out = outgoing_sb.count(n.id) ? outgoing_sb[n.id] : 0;
      if (n.kind == NodeKind::Solution && out > 0)
        emit(Severity::Error, "V005",
             "solution '" + n.id + "' must not have outgoing SupportedBy edges", n.span);
      if (n.undeveloped && out > 0)
        emit(Severity::Error, "V006",
             "undeveloped node '" + n.id + "' must not have outgoing SupportedBy edges",
             n.span);
      if (n.kind == NodeKind::Strategy && out == 0 && !n.undeveloped)
        emit(Severity::Error, "V012",
             "strategy '" + n.id + "' has no outgoing SupportedBy edge and is not undeveloped",
             n.span);
    }
  }

  void placeholder_rules() {
    for (const auto &n : graph_.nodes) {
      auto roles = try_placeholders(n.statement);
      if (!roles) {
        emit(Severity::Error, "P004",
             "malformed placeholder in statement of '" + n.id + "'", n.span);
        continue;
      }
      if (n.uninstantiated && roles->empty() && n.kind != NodeKind::ModuleRef)
        emit(Severity::Error, "V007",
             "node '" + n.id + "' is flagged uninstantiated but carries no placeholder",
             n.span);
      if (!n.uninstantiated && !roles->empty())
        emit(Severity::Error, "V008",
             "node '" + n.id + "' carries placeholders but is not flagged uninstantiated",
             n.span);
    }
  }

  void choice_rules() {
    for (const auto &g : graph_.choice_groups) {
      auto members = graph_.choice_members(g.group);
      if (g.min > static_cast<int>(members.size()))
        emit(Severity::Error, "V009",
             "choice group '" + g.group + "' requires at least " + std::to_string(g.min) +
                 " members but has " + std::to_string(members.size()),
             g.span);
    }
  }

  void acp_rules() {
    for (const auto &a : graph_.acps) {
      if (!graph_.has_edge(a.attached))
        emit(Severity::Error, "V010",
             "ACP '" + a.id + "' is attached to missing edge " + to_string(a.attached),
             a.span);
    }
  }

  void root_rule() {
    auto root_goals = roots(graph_);
    if (root_goals.empty()) {
      emit(Severity::Error, "V011",
           "module '" + graph_.module_name + "' has no root goal", graph_.span);
    } else if (root_goals.size() > 1) {
      std::string list;
      for (size_t i = 0; i < root_goals.size(); ++i) {
        if (i)
          list += ", ";
        list += root_goals[i];
      }
      emit(Severity::Warning, "V011",
           "module '" + graph_.module_name + "' has multiple root goals: " + list, graph_.span);
    }
  }
};

} // namespace

const std::vector<Rule> &validation_rules() {
  static const std::vector<Rule> rules = {
      {"V001", "SupportedBy source must be a goal or strategy"},
      {"V002", "SupportedBy target must be a goal, strategy, solution, moduleref or awaygoal"},
      {"V003", "InContextOf must link a goal or strategy to a context, assumption or "
               "justification"},
      {"V004", "the SupportedBy subgraph must be acyclic"},
      {"V005", "solutions have no outgoing SupportedBy edges"},
      {"V006", "undeveloped nodes have no outgoing SupportedBy edges"},
      {"V007", "uninstantiated nodes carry at least one placeholder unless they are module "
               "references"},
      {"V008", "nodes not flagged uninstantiated carry no placeholders"},
      {"V009", "choice group cardinality must be satisfiable"},
      {"V010", "every ACP is attached to an existing edge"},
      {"V011", "each module has exactly one root goal (warning when more)"},
      {"V012", "strategies have at least one outgoing SupportedBy edge unless undeveloped"},
  };
  return rules;
}

std::vector<Diagnostic> validate(const dsl::Document &doc) {
  std::vector<Diagnostic> out;
  for (const auto &entry : doc.modules)
    ModuleValidator(entry.graph, &doc, out).run();
  sort_diagnostics(out);
  return out;
}

std::vector<Diagnostic> validate(const ArgumentGraph &graph) {
  std::vector<Diagnostic> out;
  ModuleValidator(graph, nullptr, out).run();
  sort_diagnostics(out);
  return out;
}

std::vector<std::vector<std::string>> check_acyclic(const ArgumentGraph &graph) {
  // Iterative DFS over the SupportedBy subgraph in declaration order; every
  // back edge yields one witness cycle from the DFS stack.
  std::map<std::string, std::vector<std::string>> adjacency;
  for (const auto &e : graph.edges)
    if (e.kind == EdgeKind::SupportedBy && graph.find_node(e.source) &&
        !is_qualified(e.target) && graph.find_node(e.target))
      adjacency[e.source].push_back(e.target);

  std::vector<std::vector<std::string>> cycles;
  std::set<std::string> done;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;

  struct Frame {
    std::string node;
    size_t next = 0;
  };

  for (const auto &start : graph.nodes) {
    if (done.count(start.id))
      continue;
    std::vector<Frame> frames;
    frames.push_back({start.id});
    stack.push_back(start.id);
    on_stack.insert(start.id);
    while (!frames.empty()) {
      Frame &f = frames.back();
      auto it = adjacency.find(f.node);
      if (it != adjacency.end() && f.next < it->second.size()) {
        const std::string &next = it->second[f.next++];
        if (on_stack.count(next)) {
          // Back edge: slice the stack from `next` to the top.
          auto begin = std::find(stack.begin(), stack.end(), next);
          std::vector<std::string> cycle(begin, stack.end());
          cycle.push_back(next);
          cycles.push_back(std::move(cycle));
          continue;
        }
        if (done.count(next))
          continue;
        frames.push_back({next});
        stack.push_back(next);
        on_stack.insert(next);
      } else {
        done.insert(f.node);
        on_stack.erase(f.node);
        stack.pop_back();
        frames.pop_back();
      }
    }
  }
  return cycles;
}

} // namespace gsn
