#include "gsn/dsl.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace gsn::dsl {

namespace {

using detail::Lexer;
using detail::normalize_newlines;
using detail::Tok;
using detail::Token;

const std::set<std::string_view> kReserved = {
    "module",      "goal",        "strategy",      "solution",       "context",
    "assumption",  "justification", "moduleref",   "awaygoal",       "undeveloped",
    "uninstantiated", "ref",      "mult",          "optional",       "choice",
    "at",          "pick",        "acp",           "on",             "confidence",
    "public",      "supported_by", "in_context_of",
};

class Parser {
public:
  Parser(std::vector<Token> tokens, std::string file)
      : tokens_(std::move(tokens)), file_(std::move(file)) {}

  ParseResult run() {
    while (!at(Tok::End)) {
      auto leading = drain_comments();
      if (at(Tok::End)) {
        append(result_.document.trailing_comments, leading);
        break;
      }
      if (at_keyword("module")) {
        parse_module(std::move(leading));
      } else {
        error("P002", "expected 'module'", cur());
        advance();
        sync_to_module();
      }
    }
    sort_diagnostics(result_.diagnostics);
    return std::move(result_);
  }

private:
  std::vector<Token> tokens_;
  std::string file_;
  size_t pos_ = 0;
  ParseResult result_;

  const Token &cur() const { return tokens_[pos_]; }
  const Token &prev() const { return tokens_[pos_ > 0 ? pos_ - 1 : 0]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && cur().text == kw; }
  void advance() {
    if (!at(Tok::End))
      ++pos_;
  }

  void error(const std::string &code, const std::string &message, const Token &tok) {
    result_.diagnostics.push_back({Severity::Error, code, message, tok.span(file_)});
  }

  static void append(std::vector<std::string> &dst, const std::vector<std::string> &src) {
    dst.insert(dst.end(), src.begin(), src.end());
  }

  std::vector<std::string> drain_comments() {
    std::vector<std::string> out;
    while (at(Tok::Comment)) {
      out.push_back(cur().text);
      advance();
    }
    return out;
  }

  // A comment on the same line as the token just consumed.
  std::string take_trailing_comment() {
    if (at(Tok::Comment) && cur().line == prev().end_line) {
      std::string body = cur().text;
      advance();
      return body;
    }
    return "";
  }

  void sync_to_module() {
    while (!at(Tok::End) && !at_keyword("module"))
      advance();
  }

  // Skips the rest of the offending line inside a module body.
  void sync_line() {
    int line = cur().line;
    while (!at(Tok::End) && !at(Tok::RBrace) && cur().line <= line)
      advance();
  }

  bool expect(Tok k, const std::string &what) {
    if (at(k))
      return true;
    error("P002", "expected " + what, cur());
    return false;
  }

  std::optional<std::string> parse_ident(const std::string &what) {
    if (!at(Tok::Ident)) {
      error("P002", "expected " + what, cur());
      return std::nullopt;
    }
    if (kReserved.count(cur().text)) {
      error("P002", "'" + cur().text + "' is a reserved word and cannot be used as " + what,
            cur());
      advance();
      return std::nullopt;
    }
    std::string id = cur().text;
    advance();
    return id;
  }

  // IDENT or IDENT::IDENT
  std::optional<std::string> parse_qref(const std::string &what) {
    auto first = parse_ident(what);
    if (!first)
      return std::nullopt;
    if (at(Tok::ColonColon)) {
      advance();
      auto second = parse_ident("identifier after '::'");
      if (!second)
        return std::nullopt;
      return qualify(*first, *second);
    }
    return first;
  }

  std::optional<int> parse_int(const std::string &what) {
    if (!at(Tok::Number) || cur().text.find('.') != std::string::npos) {
      error("P002", "expected " + what, cur());
      return std::nullopt;
    }
    int value = 0;
    try {
      value = std::stoi(cur().text);
    } catch (const std::exception &) {
      error("P002", what + " out of range", cur());
      advance();
      return std::nullopt;
    }
    advance();
    return value;
  }

  std::optional<EdgeKind> parse_edge_kind() {
    if (at_keyword("supported_by")) {
      advance();
      return EdgeKind::SupportedBy;
    }
    if (at_keyword("in_context_of")) {
      advance();
      return EdgeKind::InContextOf;
    }
    error("P002", "expected 'supported_by' or 'in_context_of'", cur());
    return std::nullopt;
  }

  void parse_module(std::vector<std::string> header_comments) {
    Token module_tok = cur();
    advance(); // 'module'
    Document::Entry entry;
    entry.trivia.header.leading = std::move(header_comments);
    auto name = parse_ident("module name");
    if (!name) {
      sync_to_module();
      return;
    }
    entry.graph.module_name = *name;
    entry.graph.span = module_tok.span(file_);
    if (!expect(Tok::LBrace, "'{'")) {
      sync_to_module();
      return;
    }
    advance();
    entry.trivia.header.trailing = take_trailing_comment();

    if (result_.document.find_module(*name)) {
      error("P003", "duplicate module name '" + *name + "'", module_tok);
    }

    std::map<std::string, SourceSpan> node_spans;
    bool closed = false;
    while (!at(Tok::End)) {
      auto leading = drain_comments();
      if (at(Tok::RBrace)) {
        advance();
        append(entry.trivia.footer, leading);
        closed = true;
        break;
      }
      if (at(Tok::End)) {
        append(entry.trivia.footer, leading);
        break;
      }
      Comments comments;
      comments.leading = std::move(leading);
      parse_item(entry, node_spans, std::move(comments));
    }
    if (!closed)
      error("P002", "missing '}' at end of module '" + *name + "'", cur());

    finish_module(entry, node_spans);
    result_.document.modules.push_back(std::move(entry));
  }

  void parse_item(Document::Entry &entry, std::map<std::string, SourceSpan> &node_spans,
                  Comments comments) {
    if (!at(Tok::Ident)) {
      error("P002", "expected a declaration", cur());
      sync_line();
      return;
    }
    const std::string &kw = cur().text;
    if (auto kind = node_kind_from(kw)) {
      parse_node(entry, node_spans, *kind, std::move(comments));
    } else if (kw == "choice") {
      parse_choice(entry, std::move(comments));
    } else if (kw == "acp") {
      parse_acp(entry, std::move(comments));
    } else if (kw == "public") {
      parse_public(entry, std::move(comments));
    } else if (kReserved.count(kw) && kw != "module") {
      error("P002", "unexpected '" + kw + "'", cur());
      sync_line();
    } else {
      parse_edge(entry, std::move(comments));
    }
  }

  void attach(Document::Entry &entry, Section section, int index, Comments comments) {
    comments.trailing = take_trailing_comment();
    if (!comments.empty())
      entry.trivia.items[{section, index}] = std::move(comments);
  }

  void parse_node(Document::Entry &entry, std::map<std::string, SourceSpan> &node_spans,
                  NodeKind kind, Comments comments) {
    Token kind_tok = cur();
    advance();
    Node node;
    node.kind = kind;
    auto id = parse_ident("node id");
    if (!id) {
      sync_line();
      return;
    }
    node.id = *id;
    node.span = kind_tok.span(file_);
    if (!at(Tok::String)) {
      error("P002", "expected statement string for node '" + node.id + "'", cur());
      sync_line();
      return;
    }
    Token stmt_tok = cur();
    node.statement = cur().text;
    advance();
    if (!try_placeholders(node.statement)) {
      error("P004", "malformed placeholder in statement of '" + node.id + "'", stmt_tok);
    }
    // Declarations are line-oriented: clauses bind only on the same line.
    while (at(Tok::Ident) && cur().line == kind_tok.line &&
           (cur().text == "ref" || cur().text == "undeveloped" || cur().text == "uninstantiated")) {
      if (cur().text == "ref") {
        Token ref_tok = cur();
        advance();
        auto target = parse_qref("reference target");
        if (!target) {
          sync_line();
          return;
        }
        if (kind == NodeKind::ModuleRef && is_qualified(*target)) {
          error("P010", "moduleref '" + node.id + "' must reference a module, not a node",
                ref_tok);
        } else if (kind == NodeKind::AwayGoal && !is_qualified(*target)) {
          error("P010", "awaygoal '" + node.id + "' must reference a qualified 'module::goal'",
                ref_tok);
        } else if (kind != NodeKind::ModuleRef && kind != NodeKind::AwayGoal) {
          error("P010", "'ref' is only valid on moduleref and awaygoal declarations", ref_tok);
        } else {
          node.ref = *target;
        }
      } else if (cur().text == "undeveloped") {
        node.undeveloped = true;
        advance();
      } else {
        node.uninstantiated = true;
        advance();
      }
    }
    if (kind == NodeKind::ModuleRef && node.ref.empty())
      node.ref = node.id; // the id names the referenced module by default
    if (kind == NodeKind::AwayGoal && node.ref.empty())
      error("P010", "awaygoal '" + node.id + "' is missing its 'ref module::goal' clause",
            kind_tok);

    auto existing = node_spans.find(node.id);
    if (existing != node_spans.end()) {
      auto &first = existing->second;
      error("P003",
            "duplicate node id '" + node.id + "' (first declared at " + first.file + ":" +
                std::to_string(first.start_line) + ":" + std::to_string(first.start_col) + ")",
            kind_tok);
      take_trailing_comment();
      return;
    }
    node_spans.emplace(node.id, node.span);
    entry.graph.nodes.push_back(std::move(node));
    attach(entry, Section::Node, static_cast<int>(entry.graph.nodes.size()) - 1,
           std::move(comments));
  }

  void parse_edge(Document::Entry &entry, Comments comments) {
    Token first_tok = cur();
    auto source = parse_qref("edge source");
    if (!source) {
      sync_line();
      return;
    }
    if (is_qualified(*source)) {
      error("P002", "edge source must be a local node, got '" + *source + "'", first_tok);
      sync_line();
      return;
    }
    if (!expect(Tok::Arrow, "'->'")) {
      sync_line();
      return;
    }
    advance();
    auto target = parse_qref("edge target");
    if (!target) {
      sync_line();
      return;
    }
    if (!expect(Tok::Colon, "':' and an edge kind")) {
      sync_line();
      return;
    }
    advance();
    auto kind = parse_edge_kind();
    if (!kind) {
      sync_line();
      return;
    }
    Edge edge;
    edge.source = *source;
    edge.target = *target;
    edge.kind = *kind;
    edge.span = first_tok.span(file_);

    int decorations = 0;
    while (at(Tok::Ident) && cur().line == first_tok.line &&
           (cur().text == "mult" || cur().text == "optional" || cur().text == "choice")) {
      Token deco_tok = cur();
      if (cur().text == "mult") {
        advance();
        auto min = parse_int("multiplicity minimum");
        if (!min || !expect(Tok::DotDot, "'..'")) {
          sync_line();
          return;
        }
        advance();
        std::optional<int> max;
        if (at(Tok::Star)) {
          advance();
        } else {
          auto bounded = parse_int("multiplicity maximum or '*'");
          if (!bounded) {
            sync_line();
            return;
          }
          max = *bounded;
        }
        if (max && *min > *max) {
          error("P006", "multiplicity minimum exceeds maximum", deco_tok);
        } else {
          edge.decoration = make_multiplicity(*min, max);
        }
      } else if (cur().text == "optional") {
        advance();
        edge.decoration = OptionalLink{};
      } else {
        advance();
        auto group = parse_ident("choice group name");
        if (!group) {
          sync_line();
          return;
        }
        edge.decoration = ChoiceMember{*group};
      }
      ++decorations;
    }
    if (decorations > 1) {
      error("P006", "an edge carries at most one decoration", first_tok);
      edge.decoration = std::monostate{};
    }

    if (edge.source == edge.target) {
      error("P009", "self-loop edge on '" + edge.source + "'", first_tok);
      take_trailing_comment();
      return;
    }
    if (entry.graph.has_edge(edge.ref())) {
      error("P007", "duplicate edge " + to_string(edge.ref()), first_tok);
      take_trailing_comment();
      return;
    }
    entry.graph.edges.push_back(std::move(edge));
    attach(entry, Section::Edge, static_cast<int>(entry.graph.edges.size()) - 1,
           std::move(comments));
  }

  void parse_choice(Document::Entry &entry, Comments comments) {
    Token choice_tok = cur();
    advance();
    ChoiceGroup group;
    group.span = choice_tok.span(file_);
    auto name = parse_ident("choice group name");
    if (!name) {
      sync_line();
      return;
    }
    group.group = *name;
    if (!at_keyword("at")) {
      error("P002", "expected 'at'", cur());
      sync_line();
      return;
    }
    advance();
    auto source = parse_ident("choice source node");
    if (!source) {
      sync_line();
      return;
    }
    group.source = *source;
    if (!at_keyword("pick")) {
      error("P002", "expected 'pick'", cur());
      sync_line();
      return;
    }
    advance();
    auto min = parse_int("choice minimum");
    if (!min || !expect(Tok::DotDot, "'..'")) {
      sync_line();
      return;
    }
    advance();
    auto max = parse_int("choice maximum");
    if (!max) {
      sync_line();
      return;
    }
    group.min = *min;
    group.max = *max;
    if (group.min < 1 || group.min > group.max) {
      error("P006", "choice group '" + group.group + "' requires 1 <= min <= max", choice_tok);
      take_trailing_comment();
      return;
    }
    if (entry.graph.find_choice_group(group.group)) {
      error("P003", "duplicate choice group '" + group.group + "'", choice_tok);
      take_trailing_comment();
      return;
    }
    entry.graph.choice_groups.push_back(std::move(group));
    attach(entry, Section::Choice, static_cast<int>(entry.graph.choice_groups.size()) - 1,
           std::move(comments));
  }

  void parse_acp(Document::Entry &entry, Comments comments) {
    Token acp_tok = cur();
    advance();
    Acp acp;
    acp.span = acp_tok.span(file_);
    auto id = parse_ident("ACP id");
    if (!id) {
      sync_line();
      return;
    }
    acp.id = *id;
    if (!at_keyword("on")) {
      error("P002", "expected 'on'", cur());
      sync_line();
      return;
    }
    advance();
    if (!expect(Tok::LParen, "'('")) {
      sync_line();
      return;
    }
    advance();
    auto source = parse_ident("ACP edge source");
    if (!source || !expect(Tok::Arrow, "'->'")) {
      sync_line();
      return;
    }
    advance();
    auto target = parse_qref("ACP edge target");
    if (!target || !expect(Tok::Colon, "':'")) {
      sync_line();
      return;
    }
    advance();
    auto kind = parse_edge_kind();
    if (!kind || !expect(Tok::RParen, "')'")) {
      sync_line();
      return;
    }
    advance();
    acp.attached = {*source, *target, *kind};
    if (!at_keyword("confidence")) {
      error("P002", "expected 'confidence'", cur());
      sync_line();
      return;
    }
    advance();
    auto module = parse_ident("confidence module name");
    if (!module) {
      sync_line();
      return;
    }
    acp.confidence_module = *module;
    for (const auto &other : entry.graph.acps) {
      if (other.id == acp.id) {
        error("P003", "duplicate ACP id '" + acp.id + "'", acp_tok);
        take_trailing_comment();
        return;
      }
    }
    entry.graph.acps.push_back(std::move(acp));
    attach(entry, Section::Acp, static_cast<int>(entry.graph.acps.size()) - 1,
           std::move(comments));
  }

  void parse_public(Document::Entry &entry, Comments comments) {
    Token public_tok = cur();
    advance();
    std::vector<std::string> ids;
    auto first = parse_ident("public node id");
    if (!first) {
      sync_line();
      return;
    }
    ids.push_back(*first);
    while (at(Tok::Comma)) {
      advance();
      auto id = parse_ident("public node id");
      if (!id) {
        sync_line();
        return;
      }
      ids.push_back(*id);
    }
    for (auto &id : ids) {
      if (std::find(entry.graph.public_ids.begin(), entry.graph.public_ids.end(), id) !=
          entry.graph.public_ids.end()) {
        error("P003", "duplicate public id '" + id + "'", public_tok);
        continue;
      }
      entry.graph.public_ids.push_back(id);
    }
    // All public declarations merge into one canonical line; comments merge too.
    comments.trailing = take_trailing_comment();
    auto key = std::make_pair(Section::Public, 0);
    auto it = entry.trivia.items.find(key);
    if (it == entry.trivia.items.end()) {
      if (!comments.empty())
        entry.trivia.items[key] = std::move(comments);
    } else {
      append(it->second.leading, comments.leading);
      if (!comments.trailing.empty())
        it->second.trailing = comments.trailing;
    }
  }

  // Reference checks that need the complete module.
  void finish_module(Document::Entry &entry, const std::map<std::string, SourceSpan> &node_spans) {
    auto &graph = entry.graph;
    auto known = [&](const std::string &id) { return node_spans.count(id) > 0; };
    for (const auto &e : graph.edges) {
      if (!known(e.source))
        result_.diagnostics.push_back({Severity::Error, "P005",
                                       "unknown edge source '" + e.source + "'", e.span});
      if (!is_qualified(e.target) && !known(e.target))
        result_.diagnostics.push_back({Severity::Error, "P005",
                                       "unknown edge target '" + e.target + "'", e.span});
      if (const auto *cm = std::get_if<ChoiceMember>(&e.decoration)) {
        if (!graph.find_choice_group(cm->group))
          result_.diagnostics.push_back({Severity::Error, "P008",
                                         "edge references undeclared choice group '" + cm->group +
                                             "'",
                                         e.span});
      }
    }
    for (const auto &g : graph.choice_groups) {
      if (!known(g.source)) {
        result_.diagnostics.push_back({Severity::Error, "P005",
                                       "unknown choice source '" + g.source + "'", g.span});
        continue;
      }
      for (const auto &member : graph.choice_members(g.group)) {
        if (member.source != g.source)
          result_.diagnostics.push_back(
              {Severity::Error, "P008",
               "choice group '" + g.group + "' member " + to_string(member) +
                   " does not leave its source '" + g.source + "'",
               graph.find_edge(member)->span});
      }
    }
    for (const auto &id : graph.public_ids) {
      if (!known(id))
        result_.diagnostics.push_back(
            {Severity::Error, "P005", "public id '" + id + "' is not a node", graph.span});
    }
  }
};

} // namespace

const ArgumentGraph *Document::find_module(std::string_view name) const {
  for (const auto &entry : modules)
    if (entry.graph.module_name == name)
      return &entry.graph;
  return nullptr;
}

bool structurally_equal(const Document &a, const Document &b) {
  if (a.modules.size() != b.modules.size())
    return false;
  for (size_t i = 0; i < a.modules.size(); ++i)
    if (!(a.modules[i].graph == b.modules[i].graph))
      return false;
  return true;
}

ParseResult parse(std::string_view text, const std::string &file) {
  std::vector<Diagnostic> lex_diags;
  Lexer lexer(normalize_newlines(text), file);
  auto tokens = lexer.run(lex_diags);
  Parser parser(std::move(tokens), file);
  auto result = parser.run();
  result.diagnostics.insert(result.diagnostics.end(), lex_diags.begin(), lex_diags.end());
  sort_diagnostics(result.diagnostics);
  return result;
}

FormatResult format(std::string_view text, const std::string &file) {
  auto parsed = parse(text, file);
  FormatResult out;
  out.diagnostics = parsed.diagnostics;
  if (!parsed.ok()) {
    out.ok = false;
    out.text = std::string(text);
    return out;
  }
  out.ok = true;
  out.text = serialize(parsed.document);
  return out;
}

} // namespace gsn::dsl
