#include "gsn/composer.hpp"

#include "gsn/dsl.hpp"
#include "gsn/validator.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <set>

namespace gsn {

namespace {

using detail::Lexer;
using detail::normalize_newlines;
using detail::Tok;
using detail::Token;

struct TagName {
  ModuleTag tag;
  std::string_view name;
};

constexpr TagName kTagNames[] = {
    {ModuleTag::Ethics, "ethics"},
    {ModuleTag::System, "system"},
    {ModuleTag::PurposeSpecificModel, "purpose_specific_model"},
    {ModuleTag::GeneralPurposeModel, "general_purpose_model"},
    {ModuleTag::Confidence, "confidence"},
    {ModuleTag::Other, "other"},
};

} // namespace

std::string to_string(ModuleTag tag) {
  for (const auto &entry : kTagNames)
    if (entry.tag == tag)
      return std::string(entry.name);
  return "other";
}

std::optional<ModuleTag> module_tag_from(std::string_view name) {
  for (const auto &entry : kTagNames)
    if (entry.name == name)
      return entry.tag;
  return std::nullopt;
}

CaseArchive CaseArchive::merged_with(const CaseArchive &other) const {
  CaseArchive out = *this;
  for (const auto &[name, graph] : other.modules)
    out.modules.emplace(name, graph);
  for (const auto &[name, tag] : other.tags)
    out.tags.emplace(name, tag);
  out.links.insert(out.links.end(), other.links.begin(), other.links.end());
  if (out.trace_path.empty())
    out.trace_path = other.trace_path;
  return out;
}

CaseArchive CaseArchive::without_module(const std::string &name) const {
  CaseArchive out = *this;
  out.modules.erase(name);
  out.tags.erase(name);
  std::erase_if(out.links, [&](const CompositionLink &l) {
    return l.from_module == name || l.to_module == name;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

namespace {

class ManifestParser {
public:
  ManifestParser(std::vector<Token> tokens, std::string file,
                 const std::function<std::optional<std::string>(const std::string &)> &read_file,
                 std::vector<Diagnostic> &diags)
      : tokens_(std::move(tokens)), file_(std::move(file)), read_file_(read_file),
        diags_(diags) {}

  CaseArchive run() {
    while (!at(Tok::End)) {
      if (at(Tok::Comment)) {
        advance();
        continue;
      }
      if (at_keyword("module"))
        parse_module();
      else if (at_keyword("link"))
        parse_link();
      else if (at_keyword("trace"))
        parse_trace();
      else {
        error("C007", "expected 'module', 'link' or 'trace'");
        sync_line();
      }
    }
    return std::move(archive_);
  }

private:
  std::vector<Token> tokens_;
  std::string file_;
  const std::function<std::optional<std::string>(const std::string &)> &read_file_;
  std::vector<Diagnostic> &diags_;
  CaseArchive archive_;
  size_t pos_ = 0;

  const Token &cur() const { return tokens_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && cur().text == kw; }
  void advance() {
    if (!at(Tok::End))
      ++pos_;
  }
  void error(const std::string &code, const std::string &message) {
    diags_.push_back({Severity::Error, code, message, cur().span(file_)});
  }
  void sync_line() {
    int line = cur().line;
    while (!at(Tok::End) && cur().line <= line)
      advance();
  }

  std::optional<std::string> ident(const std::string &what) {
    if (!at(Tok::Ident)) {
      error("C007", "expected " + what);
      return std::nullopt;
    }
    std::string value = cur().text;
    advance();
    return value;
  }

  std::optional<std::pair<std::string, std::string>> qualified(const std::string &what) {
    auto module = ident(what);
    if (!module)
      return std::nullopt;
    if (!at(Tok::ColonColon)) {
      error("C007", "expected '::' in " + what);
      return std::nullopt;
    }
    advance();
    auto id = ident("node id in " + what);
    if (!id)
      return std::nullopt;
    return std::make_pair(*module, *id);
  }

  void parse_module() {
    Token module_tok = cur();
    advance();
    auto name = ident("module name");
    if (!name) {
      sync_line();
      return;
    }
    if (!at(Tok::Eq)) {
      error("C007", "expected '='");
      sync_line();
      return;
    }
    advance();
    if (!at(Tok::String)) {
      error("C007", "expected module file path string");
      sync_line();
      return;
    }
    std::string path = cur().text;
    advance();
    ModuleTag tag = ModuleTag::Other;
    if (at_keyword("tag")) {
      advance();
      auto tag_name = ident("architecture tag");
      if (!tag_name) {
        sync_line();
        return;
      }
      auto parsed = module_tag_from(*tag_name);
      if (!parsed) {
        error("C007", "unknown architecture tag '" + *tag_name + "'");
        sync_line();
        return;
      }
      tag = *parsed;
    }
    if (archive_.modules.count(*name)) {
      diags_.push_back({Severity::Error, "C003", "duplicate module name '" + *name + "'",
                        module_tok.span(file_)});
      return;
    }
    auto content = read_file_(path);
    if (!content) {
      diags_.push_back({Severity::Error, "C008", "cannot read module file '" + path + "'",
                        module_tok.span(file_)});
      return;
    }
    auto parsed = dsl::parse(*content, path);
    diags_.insert(diags_.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
    if (parsed.document.modules.size() != 1) {
      diags_.push_back({Severity::Error, "C008",
                        "module file '" + path + "' must declare exactly one module",
                        module_tok.span(file_)});
      return;
    }
    const auto &graph = parsed.document.modules.front().graph;
    if (graph.module_name != *name) {
      diags_.push_back({Severity::Error, "C008",
                        "manifest names module '" + *name + "' but '" + path + "' declares '" +
                            graph.module_name + "'",
                        module_tok.span(file_)});
      return;
    }
    auto validation = validate(graph);
    diags_.insert(diags_.end(), validation.begin(), validation.end());
    archive_.modules.emplace(*name, graph);
    archive_.tags.emplace(*name, tag);
  }

  void parse_link() {
    Token link_tok = cur();
    advance();
    auto from = qualified("link source");
    if (!from) {
      sync_line();
      return;
    }
    if (!at(Tok::Arrow)) {
      error("C007", "expected '->'");
      sync_line();
      return;
    }
    advance();
    auto to = qualified("link target");
    if (!to) {
      sync_line();
      return;
    }
    if (!at(Tok::Colon)) {
      error("C007", "expected ': supported_by' or ': optional'");
      sync_line();
      return;
    }
    advance();
    auto kind = ident("link kind");
    if (!kind) {
      sync_line();
      return;
    }
    bool optional = false;
    if (*kind == "optional") {
      optional = true;
    } else if (*kind != "supported_by") {
      error("C007", "link kind must be 'supported_by' or 'optional', got '" + *kind + "'");
      sync_line();
      return;
    }
    archive_.links.push_back(
        {from->first, from->second, to->first, to->second, optional, link_tok.span(file_)});
  }

  void parse_trace() {
    advance();
    if (!at(Tok::String)) {
      error("C007", "expected trace file path string");
      sync_line();
      return;
    }
    archive_.trace_path = cur().text;
    advance();
  }
};

} // namespace

CaseArchive load_manifest(
    std::string_view text, const std::string &file,
    const std::function<std::optional<std::string>(const std::string &)> &read_file,
    std::vector<Diagnostic> &diags) {
  std::vector<Diagnostic> lex_diags;
  Lexer lexer(normalize_newlines(text), file);
  auto tokens = lexer.run(lex_diags);
  diags.insert(diags.end(), lex_diags.begin(), lex_diags.end());
  ManifestParser parser(std::move(tokens), file, read_file, diags);
  auto archive = parser.run();
  sort_diagnostics(diags);
  return archive;
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

namespace {

class Composer {
public:
  explicit Composer(const CaseArchive &archive) : archive_(archive) {}

  ComposeResult run() {
    merged_.module_name = "case";
    for (const auto &[name, graph] : archive_.modules)
      merge_module(name, graph);
    resolve_away_goals();
    resolve_module_refs();
    add_links();
    check_acps();
    sort_diagnostics(diags_);
    return {std::move(merged_), std::move(diags_)};
  }

private:
  const CaseArchive &archive_;
  ArgumentGraph merged_;
  std::vector<Diagnostic> diags_;

  void error(const std::string &code, const std::string &message, const SourceSpan &span) {
    diags_.push_back({Severity::Error, code, message, span});
  }

  // Looks up `module::id`, requiring the id to be public in its module.
  bool check_public_target(const std::string &module, const std::string &id,
                           const std::string &context, const SourceSpan &span) {
    auto it = archive_.modules.find(module);
    if (it == archive_.modules.end()) {
      error("C001", context + " references unknown module '" + module + "'", span);
      return false;
    }
    const auto &target = it->second;
    if (!target.find_node(id)) {
      error("C005", context + " references unknown node '" + id + "' in module '" + module + "'",
            span);
      return false;
    }
    if (std::find(target.public_ids.begin(), target.public_ids.end(), id) ==
        target.public_ids.end()) {
      error("C002",
            context + " targets '" + id + "' which is not public in module '" + module + "'",
            span);
      return false;
    }
    return true;
  }

  void merge_module(const std::string &name, const ArgumentGraph &graph) {
    auto qualify_target = [&](const std::string &target) {
      return is_qualified(target) ? target : qualify(name, target);
    };
    for (const auto &n : graph.nodes) {
      Node copy = n;
      copy.id = qualify(name, n.id);
      merged_.nodes.push_back(std::move(copy));
    }
    for (const auto &e : graph.edges) {
      Edge copy = e;
      copy.source = qualify(name, e.source);
      copy.target = qualify_target(e.target);
      if (is_qualified(e.target)) {
        auto [module, id] = split_qualified(e.target);
        check_public_target(module, id, "edge " + to_string(e.ref()) + " in module '" + name + "'",
                            e.span);
      }
      merged_.edges.push_back(std::move(copy));
    }
    for (const auto &g : graph.choice_groups) {
      ChoiceGroup copy = g;
      copy.group = qualify(name, g.group);
      copy.source = qualify(name, g.source);
      merged_.choice_groups.push_back(std::move(copy));
    }
    for (const auto &a : graph.acps) {
      Acp copy = a;
      copy.id = qualify(name, a.id);
      copy.attached.source = qualify(name, a.attached.source);
      copy.attached.target = qualify_target(a.attached.target);
      merged_.acps.push_back(std::move(copy));
    }
    for (const auto &p : graph.public_ids)
      merged_.public_ids.push_back(qualify(name, p));
  }

  // Qualified ids of nodes of `kind` across the merged graph.
  std::vector<std::string> nodes_of_kind(NodeKind kind) const {
    std::vector<std::string> out;
    for (const auto &n : merged_.nodes)
      if (n.kind == kind)
        out.push_back(n.id);
    return out;
  }

  void redirect_edges(const std::string &old_target, const std::string &new_target) {
    std::vector<Edge> kept;
    kept.reserve(merged_.edges.size());
    std::set<EdgeRef> seen;
    for (auto &e : merged_.edges) {
      if (e.target == old_target)
        e.target = new_target;
      if (seen.insert(e.ref()).second) // drop duplicates created by the redirect
        kept.push_back(std::move(e));
    }
    merged_.edges = std::move(kept);
    for (auto &a : merged_.acps)
      if (a.attached.target == old_target)
        a.attached.target = new_target;
  }

  void remove_node(const std::string &id) {
    std::erase_if(merged_.nodes, [&](const Node &n) { return n.id == id; });
    std::erase_if(merged_.public_ids, [&](const std::string &p) { return p == id; });
  }

  void resolve_away_goals() {
    for (const auto &id : nodes_of_kind(NodeKind::AwayGoal)) {
      const Node *node = merged_.find_node(id);
      auto [module, local] = split_qualified(node->ref);
      auto [own_module, own_id] = split_qualified(id);
      if (module.empty() || local.empty()) {
        error("C001", "away goal '" + id + "' has malformed reference '" + node->ref + "'",
              node->span);
        continue;
      }
      if (!check_public_target(module, local, "away goal '" + own_id + "' in module '" +
                                                  own_module + "'",
                               node->span))
        continue;
      redirect_edges(id, qualify(module, local));
      remove_node(id);
    }
  }

  void resolve_module_refs() {
    for (const auto &id : nodes_of_kind(NodeKind::ModuleRef)) {
      const Node *node = merged_.find_node(id);
      auto [own_module, own_id] = split_qualified(id);
      const std::string &target_module = node->ref;
      auto it = archive_.modules.find(target_module);
      if (it == archive_.modules.end()) {
        error("C001",
              "module reference '" + own_id + "' in module '" + own_module +
                  "' references unknown module '" + target_module + "'",
              node->span);
        continue;
      }
      auto target_roots = roots(it->second);
      if (target_roots.size() != 1) {
        error("C006",
              "module reference '" + own_id + "' needs module '" + target_module +
                  "' to have exactly one root goal, found " +
                  std::to_string(target_roots.size()),
              node->span);
        continue;
      }
      redirect_edges(id, qualify(target_module, target_roots.front()));
      remove_node(id);
    }
  }

  void add_links() {
    for (const auto &link : archive_.links) {
      std::string from = qualify(link.from_module, link.from_id);
      std::string to = qualify(link.to_module, link.to_id);
      auto from_it = archive_.modules.find(link.from_module);
      if (from_it == archive_.modules.end()) {
        error("C001", "link references unknown module '" + link.from_module + "'", link.span);
        continue;
      }
      if (!from_it->second.find_node(link.from_id)) {
        error("C005",
              "link references unknown node '" + link.from_id + "' in module '" +
                  link.from_module + "'",
              link.span);
        continue;
      }
      if (!check_public_target(link.to_module, link.to_id, "link from '" + from + "'", link.span))
        continue;
      Edge edge;
      edge.source = from;
      edge.target = to;
      edge.kind = EdgeKind::SupportedBy;
      if (link.optional)
        edge.decoration = OptionalLink{};
      edge.span = link.span;
      if (!merged_.has_edge(edge.ref()))
        merged_.edges.push_back(std::move(edge));
    }
  }

  void check_acps() {
    for (const auto &a : merged_.acps) {
      if (!archive_.modules.count(a.confidence_module))
        error("C004",
              "ACP '" + a.id + "' points at missing confidence module '" + a.confidence_module +
                  "'",
              a.span);
    }
  }
};

} // namespace

ComposeResult compose(const CaseArchive &archive) { return Composer(archive).run(); }

// ---------------------------------------------------------------------------
// Architecture shape
// ---------------------------------------------------------------------------

namespace {

// Module-level support relation: manifest links plus module references and
// away goals inside the source module.
struct ModuleSupport {
  std::string from, to;
  bool optional = false;
  bool targets_public = true;
};

std::vector<ModuleSupport> module_supports(const CaseArchive &archive) {
  std::vector<ModuleSupport> out;
  for (const auto &link : archive.links) {
    bool is_public = false;
    auto it = archive.modules.find(link.to_module);
    if (it != archive.modules.end())
      is_public = std::find(it->second.public_ids.begin(), it->second.public_ids.end(),
                            link.to_id) != it->second.public_ids.end();
    out.push_back({link.from_module, link.to_module, link.optional, is_public});
  }
  for (const auto &[name, graph] : archive.modules) {
    for (const auto &n : graph.nodes) {
      if (n.kind == NodeKind::ModuleRef && !n.ref.empty()) {
        out.push_back({name, n.ref, false, true});
      } else if (n.kind == NodeKind::AwayGoal && !n.ref.empty()) {
        auto [module, id] = split_qualified(n.ref);
        bool is_public = false;
        auto it = archive.modules.find(module);
        if (it != archive.modules.end())
          is_public = std::find(it->second.public_ids.begin(), it->second.public_ids.end(), id) !=
                      it->second.public_ids.end();
        out.push_back({name, module, false, is_public});
      }
    }
  }
  return out;
}

} // namespace

ArchitectureReport check_architecture(const CaseArchive &archive) {
  ArchitectureReport report;
  auto finding = [&](const std::string &code, const std::string &message) {
    report.findings.push_back({Severity::Error, code, message, SourceSpan{}});
  };

  auto tagged = [&](ModuleTag tag) {
    std::vector<std::string> out;
    for (const auto &[name, t] : archive.tags)
      if (t == tag)
        out.push_back(name);
    return out;
  };

  auto supports = module_supports(archive);
  auto supported_by_tag = [&](const std::string &module, ModuleTag tag) {
    return std::any_of(supports.begin(), supports.end(), [&](const ModuleSupport &s) {
      if (s.from != module)
        return false;
      auto it = archive.tags.find(s.to);
      return it != archive.tags.end() && it->second == tag;
    });
  };

  auto ethics = tagged(ModuleTag::Ethics);
  bool a1_ok = ethics.size() == 1;
  if (!a1_ok)
    finding("A1", "expected exactly one ethics module, found " +
                      std::to_string(ethics.size()));

  if (a1_ok && !supported_by_tag(ethics.front(), ModuleTag::System))
    finding("A2", "ethics module '" + ethics.front() +
                      "' is not supported by any system module");

  for (const auto &system : tagged(ModuleTag::System)) {
    if (!supported_by_tag(system, ModuleTag::PurposeSpecificModel) &&
        !supported_by_tag(system, ModuleTag::GeneralPurposeModel))
      finding("A3", "system module '" + system +
                        "' is not supported by any model-argument module");
  }

  for (const auto &s : supports) {
    auto from_tag = archive.tags.find(s.from);
    auto to_tag = archive.tags.find(s.to);
    if (from_tag == archive.tags.end() || to_tag == archive.tags.end())
      continue;
    if (from_tag->second == ModuleTag::PurposeSpecificModel &&
        to_tag->second == ModuleTag::GeneralPurposeModel) {
      if (!s.optional)
        finding("A4", "link from '" + s.from + "' to general-purpose module '" + s.to +
                          "' must be optional");
      else if (!s.targets_public)
        finding("A4", "optional link from '" + s.from + "' to '" + s.to +
                          "' must target a public goal");
    }
  }

  if (a1_ok) {
    const auto &graph = archive.modules.at(ethics.front());
    bool expanded = std::any_of(graph.nodes.begin(), graph.nodes.end(), [](const Node &n) {
      return n.kind == NodeKind::ModuleRef || n.kind == NodeKind::AwayGoal;
    });
    if (expanded) {
      for (const char *principle :
           {"justice", "beneficence", "non_maleficence", "human_autonomy"}) {
        if (!archive.modules.count(principle))
          finding("A5", "expanded ethics argument is missing the '" + std::string(principle) +
                            "' module");
      }
    }
  }

  report.shape_ok = !has_errors(report.findings);
  return report;
}

} // namespace gsn
