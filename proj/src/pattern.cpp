#include "gsn/pattern.hpp"

#include "lexer.hpp"
#include "placeholder_scan.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace gsn {

namespace {

using detail::Lexer;
using detail::normalize_newlines;
using detail::Tok;
using detail::Token;

[[noreturn]] void reject(const std::string &code, const std::string &message) {
  throw Error(code + ": " + message);
}

// ---------------------------------------------------------------------------
// Bindings file
// ---------------------------------------------------------------------------

class BindingsParser {
public:
  BindingsParser(std::vector<Token> tokens, std::string file)
      : tokens_(std::move(tokens)), file_(std::move(file)) {}

  BindingSet run() {
    BindingSet out;
    while (!at(Tok::End)) {
      if (at(Tok::Comment)) {
        advance();
        continue;
      }
      if (!at(Tok::Ident))
        fail("expected 'role', 'count', 'choose' or 'include'");
      const std::string &kw = cur().text;
      if (kw == "role")
        parse_role(out);
      else if (kw == "count")
        parse_count(out);
      else if (kw == "choose")
        parse_choose(out);
      else if (kw == "include")
        parse_include(out);
      else
        fail("unknown binding keyword '" + kw + "'");
    }
    return out;
  }

private:
  std::vector<Token> tokens_;
  std::string file_;
  size_t pos_ = 0;

  const Token &cur() const { return tokens_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  void advance() {
    if (!at(Tok::End))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string &message) {
    reject("B001", file_ + ":" + std::to_string(cur().line) + ": " + message);
  }

  std::string expect_string(const std::string &what) {
    if (!at(Tok::String))
      fail("expected " + what);
    std::string value = cur().text;
    advance();
    return value;
  }

  std::string expect_ident(const std::string &what) {
    if (!at(Tok::Ident))
      fail("expected " + what);
    std::string value = cur().text;
    advance();
    return value;
  }

  int expect_int(const std::string &what) {
    if (!at(Tok::Number) || cur().text.find('.') != std::string::npos)
      fail("expected " + what);
    int value = 0;
    try {
      value = std::stoi(cur().text);
    } catch (const std::exception &) {
      fail(what + " out of range");
    }
    advance();
    return value;
  }

  void expect(Tok k, const std::string &what) {
    if (!at(k))
      fail("expected " + what);
    advance();
  }

  // SRC -> DST [: kind]; kind defaults to SupportedBy.
  EdgeRef parse_edge_ref() {
    EdgeRef ref;
    ref.source = expect_ident("edge source");
    expect(Tok::Arrow, "'->'");
    ref.target = expect_ident("edge target");
    if (at(Tok::ColonColon)) {
      advance();
      ref.target = qualify(ref.target, expect_ident("id after '::'"));
    }
    ref.kind = EdgeKind::SupportedBy;
    if (at(Tok::Colon)) {
      advance();
      auto kind = expect_ident("edge kind");
      if (kind == "supported_by")
        ref.kind = EdgeKind::SupportedBy;
      else if (kind == "in_context_of")
        ref.kind = EdgeKind::InContextOf;
      else
        fail("unknown edge kind '" + kind + "'");
    }
    return ref;
  }

  void parse_role(BindingSet &out) {
    advance();
    std::string name = expect_string("role name string");
    std::optional<int> index;
    if (at(Tok::LBracket)) {
      advance();
      index = expect_int("role instance index");
      expect(Tok::RBracket, "']'");
    }
    expect(Tok::Eq, "'='");
    std::string value = expect_string("binding text string");
    if (index) {
      if (!out.indexed_roles.emplace(std::make_pair(name, *index), value).second)
        fail("duplicate binding for role \"" + name + "\"[" + std::to_string(*index) + "]");
    } else {
      if (!out.roles.emplace(name, value).second)
        fail("duplicate binding for role \"" + name + "\"");
    }
  }

  void parse_count(BindingSet &out) {
    advance();
    EdgeRef ref = parse_edge_ref();
    expect(Tok::Eq, "'='");
    int k = expect_int("replication count");
    if (!out.counts.emplace(ref, k).second)
      fail("duplicate count for edge " + to_string(ref));
  }

  void parse_choose(BindingSet &out) {
    advance();
    std::string group = expect_ident("choice group name");
    expect(Tok::Eq, "'='");
    std::vector<std::string> targets;
    targets.push_back(expect_ident("member target id"));
    while (at(Tok::Comma)) {
      advance();
      targets.push_back(expect_ident("member target id"));
    }
    if (!out.choices.emplace(group, std::move(targets)).second)
      fail("duplicate selection for choice group '" + group + "'");
  }

  void parse_include(BindingSet &out) {
    advance();
    EdgeRef ref = parse_edge_ref();
    expect(Tok::Eq, "'='");
    std::string flag = expect_ident("'true' or 'false'");
    if (flag != "true" && flag != "false")
      fail("expected 'true' or 'false'");
    if (!out.includes.emplace(ref, flag == "true").second)
      fail("duplicate include flag for edge " + to_string(ref));
  }
};

// ---------------------------------------------------------------------------
// Instantiation
// ---------------------------------------------------------------------------

// Nodes with no incoming edge of any kind: the reachability sources used
// when pruning deselected branches.
std::set<std::string> source_nodes(const ArgumentGraph &g) {
  std::set<std::string> has_incoming;
  for (const auto &e : g.edges)
    has_incoming.insert(e.target);
  std::set<std::string> out;
  for (const auto &n : g.nodes)
    if (!has_incoming.count(n.id))
      out.insert(n.id);
  return out;
}

std::set<std::string> reachable_from(const std::set<std::string> &sources,
                                     const std::vector<Edge> &edges) {
  std::multimap<std::string, std::string> adjacency;
  for (const auto &e : edges)
    adjacency.emplace(e.source, e.target);
  std::set<std::string> seen = sources;
  std::deque<std::string> work(sources.begin(), sources.end());
  while (!work.empty()) {
    auto cur = work.front();
    work.pop_front();
    auto [lo, hi] = adjacency.equal_range(cur);
    for (auto it = lo; it != hi; ++it)
      if (seen.insert(it->second).second)
        work.push_back(it->second);
  }
  return seen;
}

void erase_nodes(ArgumentGraph &g, const std::set<std::string> &victims) {
  if (victims.empty())
    return;
  std::erase_if(g.nodes, [&](const Node &n) { return victims.count(n.id) > 0; });
  std::erase_if(g.edges, [&](const Edge &e) {
    return victims.count(e.source) || victims.count(e.target);
  });
  std::erase_if(g.acps, [&](const Acp &a) {
    return victims.count(a.attached.source) || victims.count(a.attached.target);
  });
  std::erase_if(g.public_ids, [&](const std::string &id) { return victims.count(id) > 0; });
}

class Instantiator {
public:
  Instantiator(const ArgumentGraph &pattern, const BindingSet &bindings)
      : pattern_(pattern), bindings_(bindings), graph_(pattern) {}

  InstantiationResult run() {
    validate_bindings();
    resolve_choices_and_optionals();
    expand_multiplicities();
    substitute_roles();
    strip_decorations();
    InstantiationResult result;
    result.report = completeness(graph_);
    result.graph = std::move(graph_);
    return result;
  }

private:
  const ArgumentGraph &pattern_;
  const BindingSet &bindings_;
  ArgumentGraph graph_;
  std::map<std::string, int> replica_index_; // node id -> index of the replica it sits in
  std::set<std::string> roles_in_pattern_;

  void validate_bindings() {
    for (const auto &n : pattern_.nodes) {
      auto roles = try_placeholders(n.statement);
      if (!roles)
        reject("B002", "pattern node '" + n.id + "' has a malformed placeholder");
      roles_in_pattern_.insert(roles->begin(), roles->end());
    }
    auto check_role = [&](const std::string &name, const std::string &value) {
      if (value.empty())
        reject("B003", "role \"" + name + "\" is bound to the empty string");
      auto spans = try_placeholders(value);
      if (!spans || !spans->empty())
        reject("B003", "binding for role \"" + name + "\" must not contain placeholder braces");
      if (!roles_in_pattern_.count(name))
        reject("B004", "role \"" + name + "\" does not occur in pattern '" +
                           pattern_.module_name + "'");
    };
    for (const auto &[name, value] : bindings_.roles)
      check_role(name, value);
    for (const auto &[key, value] : bindings_.indexed_roles) {
      check_role(key.first, value);
      if (key.second < 1)
        reject("B004", "role \"" + key.first + "\" instance index must be >= 1");
    }
    for (const auto &[ref, k] : bindings_.counts) {
      const Edge *edge = pattern_.find_edge(ref);
      if (!edge)
        reject("B004", "count bound to unknown edge " + to_string(ref));
      const auto *mult = std::get_if<Multiplicity>(&edge->decoration);
      if (!mult)
        reject("B004", "count bound to edge without multiplicity: " + to_string(ref));
      if (k < mult->min || (mult->max && k > *mult->max))
        reject("B005", "count " + std::to_string(k) + " for " + to_string(ref) +
                           " violates declared multiplicity " + std::to_string(mult->min) +
                           ".." + (mult->max ? std::to_string(*mult->max) : "*"));
    }
    for (const auto &[group, selected] : bindings_.choices) {
      const ChoiceGroup *decl = pattern_.find_choice_group(group);
      if (!decl)
        reject("B004", "selection for unknown choice group '" + group + "'");
      auto members = pattern_.choice_members(group);
      std::set<std::string> member_targets;
      for (const auto &m : members)
        member_targets.insert(m.target);
      std::set<std::string> unique(selected.begin(), selected.end());
      if (unique.size() != selected.size())
        reject("B004", "choice group '" + group + "' selection repeats a member");
      for (const auto &target : selected)
        if (!member_targets.count(target))
          reject("B004", "'" + target + "' is not a member of choice group '" + group + "'");
      int n = static_cast<int>(selected.size());
      if (n < decl->min || n > decl->max)
        reject("B005", "choice group '" + group + "' requires " + std::to_string(decl->min) +
                           ".." + std::to_string(decl->max) + " selections, got " +
                           std::to_string(n));
    }
    for (const auto &group : pattern_.choice_groups) {
      if (!bindings_.choices.count(group.group))
        reject("B005", "choice group '" + group.group + "' requires " +
                           std::to_string(group.min) + ".." + std::to_string(group.max) +
                           " selections, got 0");
    }
    for (const auto &[ref, included] : bindings_.includes) {
      const Edge *edge = pattern_.find_edge(ref);
      if (!edge)
        reject("B004", "include flag bound to unknown edge " + to_string(ref));
      if (!std::holds_alternative<OptionalLink>(edge->decoration))
        reject("B004", "include flag bound to non-optional edge " + to_string(ref));
    }
  }

  void resolve_choices_and_optionals() {
    std::set<std::string> originally_reachable =
        reachable_from(source_nodes(graph_), graph_.edges);

    std::vector<Edge> kept;
    for (const auto &e : graph_.edges) {
      if (const auto *cm = std::get_if<ChoiceMember>(&e.decoration)) {
        const auto &selected = bindings_.choices.at(cm->group);
        if (std::find(selected.begin(), selected.end(), e.target) == selected.end())
          continue;
      } else if (std::holds_alternative<OptionalLink>(e.decoration)) {
        auto it = bindings_.includes.find(e.ref());
        if (it == bindings_.includes.end() || !it->second)
          continue; // excluded by default
      }
      kept.push_back(e);
    }
    std::erase_if(graph_.acps, [&](const Acp &a) {
      return std::none_of(kept.begin(), kept.end(),
                          [&](const Edge &e) { return e.ref() == a.attached; });
    });
    graph_.edges = std::move(kept);

    // Prune exclusive subtrees: anything that was reachable from the
    // pattern's sources and no longer is.
    std::set<std::string> still_reachable =
        reachable_from(source_nodes(pattern_), graph_.edges);
    std::set<std::string> victims;
    for (const auto &n : graph_.nodes)
      if (originally_reachable.count(n.id) && !still_reachable.count(n.id))
        victims.insert(n.id);
    erase_nodes(graph_, victims);
  }

  int chosen_count(const EdgeRef &original, const Multiplicity &mult) const {
    auto it = bindings_.counts.find(original);
    if (it != bindings_.counts.end())
      return it->second;
    return mult.min; // defaults to the mandatory minimum
  }

  // Expands one multiplicity edge at a time until none remain. Replicated
  // inner multiplicity edges keep the count bound to their original edge.
  void expand_multiplicities() {
    std::map<EdgeRef, EdgeRef> origin; // current edge -> pattern edge it copies
    for (const auto &e : graph_.edges)
      origin[e.ref()] = e.ref();

    while (true) {
      auto it = std::find_if(graph_.edges.begin(), graph_.edges.end(), [](const Edge &e) {
        return std::holds_alternative<Multiplicity>(e.decoration);
      });
      if (it == graph_.edges.end())
        break;
      Edge decorated = *it;
      const auto &mult = std::get<Multiplicity>(decorated.decoration);
      int count = chosen_count(origin.at(decorated.ref()), mult);
      expand_edge(decorated, count, origin);
    }
  }

  void expand_edge(const Edge &decorated, int count, std::map<EdgeRef, EdgeRef> &origin) {
    // Subtree = everything reachable from the target over any edge kind. By
    // construction no edge leaves this set; an extra edge entering it from
    // outside makes the copy ambiguous and is rejected.
    std::set<std::string> subtree = reachable_from({decorated.target}, graph_.edges);
    for (const auto &e : graph_.edges) {
      if (e.ref() == decorated.ref())
        continue;
      if (subtree.count(e.target) && !subtree.count(e.source))
        reject("B006", "cannot replicate subtree under " + to_string(decorated.ref()) +
                           ": node '" + e.target + "' is also referenced from outside it");
    }

    auto replica_id = [&](const std::string &id, int i) {
      return id + "_" + std::to_string(i);
    };
    for (int i = 1; i <= count; ++i)
      for (const auto &id : subtree)
        if (graph_.find_node(replica_id(id, i)))
          reject("B006", "replica id '" + replica_id(id, i) + "' already exists in pattern '" +
                             pattern_.module_name + "'");

    ArgumentGraph next;
    next.module_name = graph_.module_name;
    next.span = graph_.span;

    // Keep everything outside the subtree, dropping the decorated edge.
    for (const auto &n : graph_.nodes)
      if (!subtree.count(n.id))
        next.nodes.push_back(n);
    for (const auto &e : graph_.edges)
      if (!(e.ref() == decorated.ref()) && !subtree.count(e.source))
        next.edges.push_back(e);
    for (const auto &a : graph_.acps)
      if (!subtree.count(a.attached.source) && !(a.attached == decorated.ref()))
        next.acps.push_back(a);
    next.choice_groups = graph_.choice_groups;

    std::map<EdgeRef, EdgeRef> next_origin;
    for (const auto &e : next.edges)
      next_origin[e.ref()] = origin.at(e.ref());

    auto rename = [&](const std::string &id, int i) {
      return subtree.count(id) ? replica_id(id, i) : id;
    };

    for (int i = 1; i <= count; ++i) {
      for (const auto &n : graph_.nodes) {
        if (!subtree.count(n.id))
          continue;
        Node copy = n;
        copy.id = replica_id(n.id, i);
        replica_index_[copy.id] = i;
        next.nodes.push_back(std::move(copy));
      }
      for (const auto &e : graph_.edges) {
        if (!subtree.count(e.source))
          continue;
        Edge copy = e;
        copy.source = rename(e.source, i);
        copy.target = rename(e.target, i);
        next.edges.push_back(copy);
        next_origin[copy.ref()] = origin.at(e.ref());
      }
      // The connecting edge replaces the decorated one, now concrete.
      Edge link = decorated;
      link.target = replica_id(decorated.target, i);
      link.decoration = std::monostate{};
      next.edges.push_back(link);
      next_origin[link.ref()] = origin.at(decorated.ref());
      for (const auto &a : graph_.acps) {
        bool on_decorated = a.attached == decorated.ref();
        bool inside = subtree.count(a.attached.source) > 0;
        if (!on_decorated && !inside)
          continue;
        Acp copy = a;
        copy.id = replica_id(a.id, i);
        copy.attached.source = rename(a.attached.source, i);
        copy.attached.target =
            on_decorated ? replica_id(a.attached.target, i) : rename(a.attached.target, i);
        next.acps.push_back(std::move(copy));
      }
    }

    // Public ids inside the subtree follow their replicas.
    for (const auto &id : graph_.public_ids) {
      if (!subtree.count(id)) {
        next.public_ids.push_back(id);
      } else {
        for (int i = 1; i <= count; ++i)
          next.public_ids.push_back(replica_id(id, i));
      }
    }

    graph_ = std::move(next);
    origin = std::move(next_origin);
  }

  std::optional<std::string> lookup_role(const std::string &node_id,
                                         std::string_view role) const {
    std::string key(role);
    auto idx = replica_index_.find(node_id);
    if (idx != replica_index_.end()) {
      auto it = bindings_.indexed_roles.find({key, idx->second});
      if (it != bindings_.indexed_roles.end())
        return it->second;
    }
    auto it = bindings_.roles.find(key);
    if (it != bindings_.roles.end())
      return it->second;
    return std::nullopt;
  }

  void substitute_roles() {
    for (auto &n : graph_.nodes) {
      std::string rebuilt;
      bool all_bound = true;
      auto err = detail::scan_placeholders(
          n.statement,
          [&](std::string_view role) {
            if (auto value = lookup_role(n.id, role)) {
              rebuilt += *value;
            } else {
              all_bound = false;
              rebuilt += '{';
              rebuilt += role;
              rebuilt += '}';
            }
          },
          [&](std::string_view literal) { rebuilt += literal; });
      if (!err.empty())
        reject("B002", "node '" + n.id + "' has a malformed placeholder");
      n.statement = std::move(rebuilt);
      if (all_bound && n.kind != NodeKind::ModuleRef)
        n.uninstantiated = false;
    }
  }

  void strip_decorations() {
    for (auto &e : graph_.edges)
      e.decoration = std::monostate{};
    graph_.choice_groups.clear();
  }
};

} // namespace

BindingSet parse_bindings(std::string_view text, const std::string &file) {
  std::vector<Diagnostic> diags;
  Lexer lexer(normalize_newlines(text), file);
  auto tokens = lexer.run(diags);
  if (has_errors(diags))
    throw Error("B001: " + render(diags.front()));
  return BindingsParser(std::move(tokens), file).run();
}

InstantiationResult instantiate(const ArgumentGraph &pattern, const BindingSet &bindings) {
  return Instantiator(pattern, bindings).run();
}

InstantiationReport completeness(const ArgumentGraph &graph) {
  InstantiationReport report;
  for (const auto &n : graph.nodes) {
    auto roles = try_placeholders(n.statement);
    if (roles)
      for (const auto &role : *roles)
        report.remaining_placeholders.emplace_back(n.id, role);
    if (n.undeveloped)
      report.remaining_undeveloped.push_back(n.id);
  }
  report.fully_instantiated = report.remaining_placeholders.empty();
  return report;
}

} // namespace gsn
