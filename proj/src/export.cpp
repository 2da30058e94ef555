#include "gsn/export.hpp"

#include <json.hpp>

#include <set>
#include <sstream>

namespace gsn {

namespace {

using nlohmann::ordered_json;

std::string dot_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\')
      out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string node_shape(NodeKind kind) {
  switch (kind) {
  case NodeKind::Goal:
    return "shape=box";
  case NodeKind::Strategy:
    return "shape=parallelogram";
  case NodeKind::Solution:
    return "shape=circle";
  case NodeKind::Context:
    return "shape=box, style=rounded";
  case NodeKind::Assumption:
    return "shape=ellipse, xlabel=\"A\"";
  case NodeKind::Justification:
    return "shape=ellipse, xlabel=\"J\"";
  case NodeKind::ModuleRef:
    return "shape=tab";
  case NodeKind::AwayGoal:
    return "shape=component";
  }
  return "shape=box";
}

// A stable DOT identifier per node, unique across modules.
std::string dot_id(const std::string &module, const std::string &id) {
  std::string out = "n_" + module + "__" + id;
  for (auto &c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      c = '_';
  return out;
}

} // namespace

std::string to_dot(const dsl::Document &doc) {
  std::ostringstream out;
  out << "digraph gsn {\n";
  out << "  rankdir=TB;\n";
  out << "  node [fontname=\"Helvetica\"];\n";

  for (const auto &entry : doc.modules) {
    const auto &g = entry.graph;
    out << "  subgraph cluster_" << dot_id(g.module_name, "module") << " {\n";
    out << "    label=\"" << dot_escape(g.module_name) << "\";\n";
    for (const auto &n : g.nodes) {
      std::string label = n.id + "\\n" + dot_escape(n.statement);
      if (n.undeveloped)
        label += "\\n[undeveloped]";
      if (n.uninstantiated)
        label += "\\n[uninstantiated]";
      out << "    " << dot_id(g.module_name, n.id) << " [" << node_shape(n.kind) << ", label=\""
          << label << "\"];\n";
    }
    out << "  }\n";
  }

  for (const auto &entry : doc.modules) {
    const auto &g = entry.graph;
    for (const auto &e : g.edges) {
      std::string target_module = g.module_name;
      std::string target_id = e.target;
      if (is_qualified(e.target)) {
        auto [m, id] = split_qualified(e.target);
        target_module = m;
        target_id = id;
      }
      out << "  " << dot_id(g.module_name, e.source) << " -> "
          << dot_id(target_module, target_id);
      std::vector<std::string> attrs;
      if (e.kind == EdgeKind::InContextOf)
        attrs.push_back("arrowhead=empty, style=solid");
      std::string label;
      if (const auto *m = std::get_if<Multiplicity>(&e.decoration)) {
        attrs.push_back("dir=both, arrowtail=dot");
        label = std::to_string(m->min) + ".." + (m->max ? std::to_string(*m->max) : "*");
      } else if (std::holds_alternative<OptionalLink>(e.decoration)) {
        attrs.push_back("dir=both, arrowtail=odot");
        label = "optional";
      } else if (const auto *cm = std::get_if<ChoiceMember>(&e.decoration)) {
        attrs.push_back("dir=both, arrowtail=diamond");
        label = "choice " + cm->group;
      }
      for (const auto &a : g.acps) {
        if (a.attached == e.ref()) {
          if (!label.empty())
            label += "\\n";
          label += "■ " + a.id + " -> " + a.confidence_module;
        }
      }
      if (!label.empty())
        attrs.push_back("label=\"" + dot_escape(label) + "\"");
      if (!attrs.empty()) {
        out << " [";
        for (size_t i = 0; i < attrs.size(); ++i) {
          if (i)
            out << ", ";
          out << attrs[i];
        }
        out << "]";
      }
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

namespace {

ordered_json decoration_to_json(const EdgeDecoration &deco) {
  ordered_json j;
  if (const auto *m = std::get_if<Multiplicity>(&deco)) {
    j["kind"] = "multiplicity";
    j["min"] = m->min;
    if (m->max)
      j["max"] = *m->max;
    else
      j["max"] = nullptr;
  } else if (std::holds_alternative<OptionalLink>(deco)) {
    j["kind"] = "optional";
  } else if (const auto *cm = std::get_if<ChoiceMember>(&deco)) {
    j["kind"] = "choice";
    j["group"] = cm->group;
  } else {
    j["kind"] = "none";
  }
  return j;
}

void require_fields(const ordered_json &obj, const std::set<std::string> &allowed,
                    const std::set<std::string> &required, const std::string &where) {
  if (!obj.is_object())
    throw Error("JSON: expected object for " + where);
  for (const auto &item : obj.items()) {
    if (!allowed.count(item.key()))
      throw Error("JSON: unknown field '" + item.key() + "' in " + where);
  }
  for (const auto &field : required)
    if (!obj.contains(field))
      throw Error("JSON: missing field '" + field + "' in " + where);
}

EdgeDecoration decoration_from_json(const ordered_json &j) {
  require_fields(j, {"kind", "min", "max", "group"}, {"kind"}, "decoration");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "none")
    return std::monostate{};
  if (kind == "optional")
    return OptionalLink{};
  if (kind == "choice")
    return ChoiceMember{j.at("group").get<std::string>()};
  if (kind == "multiplicity") {
    std::optional<int> max;
    if (!j.at("max").is_null())
      max = j.at("max").get<int>();
    return make_multiplicity(j.at("min").get<int>(), max);
  }
  throw Error("JSON: unknown decoration kind '" + kind + "'");
}

} // namespace

std::string to_json(const dsl::Document &doc) {
  ordered_json root;
  root["format_version"] = 1;
  root["modules"] = ordered_json::array();
  for (const auto &entry : doc.modules) {
    const auto &g = entry.graph;
    ordered_json mod;
    mod["name"] = g.module_name;
    mod["nodes"] = ordered_json::array();
    for (const auto &n : g.nodes) {
      ordered_json jn;
      jn["id"] = n.id;
      jn["kind"] = to_string(n.kind);
      jn["statement"] = n.statement;
      jn["undeveloped"] = n.undeveloped;
      jn["uninstantiated"] = n.uninstantiated;
      if (!n.ref.empty())
        jn["ref"] = n.ref;
      mod["nodes"].push_back(std::move(jn));
    }
    mod["edges"] = ordered_json::array();
    for (const auto &e : g.edges) {
      ordered_json je;
      je["source"] = e.source;
      je["target"] = e.target;
      je["kind"] = to_string(e.kind);
      je["decoration"] = decoration_to_json(e.decoration);
      mod["edges"].push_back(std::move(je));
    }
    mod["choice_groups"] = ordered_json::array();
    for (const auto &c : g.choice_groups) {
      ordered_json jc;
      jc["group"] = c.group;
      jc["source"] = c.source;
      jc["min"] = c.min;
      jc["max"] = c.max;
      mod["choice_groups"].push_back(std::move(jc));
    }
    mod["acps"] = ordered_json::array();
    for (const auto &a : g.acps) {
      ordered_json ja;
      ja["id"] = a.id;
      ja["source"] = a.attached.source;
      ja["target"] = a.attached.target;
      ja["kind"] = to_string(a.attached.kind);
      ja["confidence"] = a.confidence_module;
      mod["acps"].push_back(std::move(ja));
    }
    mod["public"] = g.public_ids;
    root["modules"].push_back(std::move(mod));
  }
  return root.dump(2) + "\n";
}

dsl::Document document_from_json(const std::string &json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const std::exception &e) {
    throw Error(std::string("JSON: parse failure: ") + e.what());
  }
  require_fields(root, {"format_version", "modules"}, {"format_version", "modules"}, "document");
  if (!root.at("format_version").is_number_integer() ||
      root.at("format_version").get<int>() != 1)
    throw Error("JSON: unsupported format_version (expected 1)");

  dsl::Document doc;
  for (const auto &mod : root.at("modules")) {
    require_fields(mod, {"name", "nodes", "edges", "choice_groups", "acps", "public"},
                   {"name", "nodes", "edges", "choice_groups", "acps", "public"}, "module");
    dsl::Document::Entry entry;
    auto &g = entry.graph;
    g.module_name = mod.at("name").get<std::string>();
    for (const auto &jn : mod.at("nodes")) {
      require_fields(jn, {"id", "kind", "statement", "undeveloped", "uninstantiated", "ref"},
                     {"id", "kind", "statement", "undeveloped", "uninstantiated"}, "node");
      Node n;
      n.id = jn.at("id").get<std::string>();
      auto kind = node_kind_from(jn.at("kind").get<std::string>());
      if (!kind)
        throw Error("JSON: unknown node kind '" + jn.at("kind").get<std::string>() + "'");
      n.kind = *kind;
      n.statement = jn.at("statement").get<std::string>();
      n.undeveloped = jn.at("undeveloped").get<bool>();
      n.uninstantiated = jn.at("uninstantiated").get<bool>();
      if (jn.contains("ref"))
        n.ref = jn.at("ref").get<std::string>();
      g.nodes.push_back(std::move(n));
    }
    for (const auto &je : mod.at("edges")) {
      require_fields(je, {"source", "target", "kind", "decoration"},
                     {"source", "target", "kind", "decoration"}, "edge");
      Edge e;
      e.source = je.at("source").get<std::string>();
      e.target = je.at("target").get<std::string>();
      std::string kind = je.at("kind").get<std::string>();
      if (kind == "supported_by")
        e.kind = EdgeKind::SupportedBy;
      else if (kind == "in_context_of")
        e.kind = EdgeKind::InContextOf;
      else
        throw Error("JSON: unknown edge kind '" + kind + "'");
      e.decoration = decoration_from_json(je.at("decoration"));
      g.edges.push_back(std::move(e));
    }
    for (const auto &jc : mod.at("choice_groups")) {
      require_fields(jc, {"group", "source", "min", "max"}, {"group", "source", "min", "max"},
                     "choice group");
      ChoiceGroup c;
      c.group = jc.at("group").get<std::string>();
      c.source = jc.at("source").get<std::string>();
      c.min = jc.at("min").get<int>();
      c.max = jc.at("max").get<int>();
      g.choice_groups.push_back(std::move(c));
    }
    for (const auto &ja : mod.at("acps")) {
      require_fields(ja, {"id", "source", "target", "kind", "confidence"},
                     {"id", "source", "target", "kind", "confidence"}, "acp");
      Acp a;
      a.id = ja.at("id").get<std::string>();
      a.attached.source = ja.at("source").get<std::string>();
      a.attached.target = ja.at("target").get<std::string>();
      std::string kind = ja.at("kind").get<std::string>();
      a.attached.kind = kind == "in_context_of" ? EdgeKind::InContextOf : EdgeKind::SupportedBy;
      a.confidence_module = ja.at("confidence").get<std::string>();
      g.acps.push_back(std::move(a));
    }
    for (const auto &jp : mod.at("public"))
      g.public_ids.push_back(jp.get<std::string>());
    doc.modules.push_back(std::move(entry));
  }
  return doc;
}

} // namespace gsn
