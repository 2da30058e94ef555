#include "gsn/dsl.hpp"

#include <sstream>

namespace gsn::dsl {

namespace {

// Statement escaping is the inverse of the lexer: quote and backslash are
// escaped, except that a backslash already escaping a brace passes through.
std::string escape_statement(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '"') {
      out += "\\\"";
    } else if (c == '\\') {
      if (i + 1 < text.size() && (text[i + 1] == '{' || text[i + 1] == '}')) {
        out += c;
        out += text[i + 1];
        ++i;
      } else {
        out += "\\\\";
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

class Writer {
public:
  explicit Writer(std::ostringstream &out) : out_(out) {}

  void module(const ArgumentGraph &g, const ModuleTrivia &trivia) {
    for (const auto &c : trivia.header.leading)
      out_ << '#' << c << '\n';
    out_ << "module " << g.module_name << " {";
    trailing(trivia.header.trailing);
    out_ << '\n';

    bool any = false;
    any = section(!g.nodes.empty(), any, [&] {
      for (size_t i = 0; i < g.nodes.size(); ++i)
        node(g.nodes[i], item_comments(trivia, Section::Node, i));
    });
    any = section(!g.edges.empty(), any, [&] {
      for (size_t i = 0; i < g.edges.size(); ++i)
        edge(g.edges[i], item_comments(trivia, Section::Edge, i));
    });
    any = section(!g.choice_groups.empty(), any, [&] {
      for (size_t i = 0; i < g.choice_groups.size(); ++i)
        choice(g.choice_groups[i], item_comments(trivia, Section::Choice, i));
    });
    any = section(!g.acps.empty(), any, [&] {
      for (size_t i = 0; i < g.acps.size(); ++i)
        acp(g.acps[i], item_comments(trivia, Section::Acp, i));
    });
    section(!g.public_ids.empty(), any, [&] {
      publics(g.public_ids, item_comments(trivia, Section::Public, 0));
    });
    for (const auto &c : trivia.footer)
      out_ << "  #" << c << '\n';
    out_ << "}\n";
  }

private:
  std::ostringstream &out_;

  static const Comments &item_comments(const ModuleTrivia &trivia, Section s, size_t i) {
    static const Comments kNone;
    auto it = trivia.items.find({s, static_cast<int>(i)});
    return it == trivia.items.end() ? kNone : it->second;
  }

  template <typename Fn> bool section(bool nonempty, bool had_previous, Fn fn) {
    if (!nonempty)
      return had_previous;
    if (had_previous)
      out_ << '\n';
    fn();
    return true;
  }

  void leading(const Comments &c) {
    for (const auto &line : c.leading)
      out_ << "  #" << line << '\n';
  }

  void trailing(const std::string &comment) {
    if (!comment.empty())
      out_ << "  #" << comment;
  }

  void node(const Node &n, const Comments &c) {
    leading(c);
    out_ << "  " << to_string(n.kind) << ' ' << n.id << " \"" << escape_statement(n.statement)
         << '"';
    if (n.kind == NodeKind::AwayGoal || (n.kind == NodeKind::ModuleRef && n.ref != n.id))
      if (!n.ref.empty())
        out_ << " ref " << n.ref;
    if (n.undeveloped)
      out_ << " undeveloped";
    if (n.uninstantiated)
      out_ << " uninstantiated";
    trailing(c.trailing);
    out_ << '\n';
  }

  void edge(const Edge &e, const Comments &c) {
    leading(c);
    out_ << "  " << e.source << " -> " << e.target << " : " << to_string(e.kind);
    if (const auto *m = std::get_if<Multiplicity>(&e.decoration)) {
      out_ << " mult " << m->min << "..";
      if (m->max)
        out_ << *m->max;
      else
        out_ << '*';
    } else if (std::holds_alternative<OptionalLink>(e.decoration)) {
      out_ << " optional";
    } else if (const auto *cm = std::get_if<ChoiceMember>(&e.decoration)) {
      out_ << " choice " << cm->group;
    }
    trailing(c.trailing);
    out_ << '\n';
  }

  void choice(const ChoiceGroup &g, const Comments &c) {
    leading(c);
    out_ << "  choice " << g.group << " at " << g.source << " pick " << g.min << ".." << g.max;
    trailing(c.trailing);
    out_ << '\n';
  }

  void acp(const Acp &a, const Comments &c) {
    leading(c);
    out_ << "  acp " << a.id << " on (" << a.attached.source << " -> " << a.attached.target
         << " : " << to_string(a.attached.kind) << ") confidence " << a.confidence_module;
    trailing(c.trailing);
    out_ << '\n';
  }

  void publics(const std::vector<std::string> &ids, const Comments &c) {
    leading(c);
    out_ << "  public ";
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i)
        out_ << ", ";
      out_ << ids[i];
    }
    trailing(c.trailing);
    out_ << '\n';
  }
};

void check_resolvable(const ArgumentGraph &g) {
  for (const auto &e : g.edges) {
    if (!g.find_node(e.source))
      throw Error("cannot serialize module '" + g.module_name + "': unresolved edge source '" +
                  e.source + "'");
    if (!is_qualified(e.target) && !g.find_node(e.target))
      throw Error("cannot serialize module '" + g.module_name + "': unresolved edge target '" +
                  e.target + "'");
  }
}

} // namespace

std::string serialize(const Document &doc) {
  std::ostringstream out;
  for (size_t i = 0; i < doc.modules.size(); ++i) {
    check_resolvable(doc.modules[i].graph);
    if (i)
      out << '\n';
    Writer(out).module(doc.modules[i].graph, doc.modules[i].trivia);
  }
  for (const auto &c : doc.trailing_comments)
    out << '#' << c << '\n';
  return out.str();
}

std::string serialize(const ArgumentGraph &graph) {
  Document doc;
  doc.modules.push_back({graph, {}});
  return serialize(doc);
}

} // namespace gsn::dsl
