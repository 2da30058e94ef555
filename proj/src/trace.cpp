#include "gsn/trace.hpp"

#include "lexer.hpp"

#include <sstream>

#include <algorithm>
#include <set>

namespace gsn {

namespace {

using detail::Lexer;
using detail::normalize_newlines;
using detail::Tok;
using detail::Token;

class TraceParser {
public:
  TraceParser(std::vector<Token> tokens, std::string file, std::vector<Diagnostic> &diags)
      : tokens_(std::move(tokens)), file_(std::move(file)), diags_(diags) {}

  TraceModel run() {
    while (!at(Tok::End)) {
      if (at(Tok::Comment)) {
        advance();
        continue;
      }
      if (at_keyword("hazard"))
        parse_hazard();
      else if (at_keyword("req"))
        parse_req();
      else if (at_keyword("mlreq"))
        parse_mlreq();
      else if (at_keyword("evidence"))
        parse_evidence();
      else if (at_keyword("bind"))
        parse_bind();
      else {
        error("T001", "expected 'hazard', 'req', 'mlreq', 'evidence' or 'bind'");
        sync_line();
      }
    }
    cross_check();
    return std::move(model_);
  }

private:
  std::vector<Token> tokens_;
  std::string file_;
  std::vector<Diagnostic> &diags_;
  TraceModel model_;
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
      error("T001", "expected " + what);
      return std::nullopt;
    }
    std::string value = cur().text;
    advance();
    return value;
  }

  std::optional<std::string> text(const std::string &what) {
    if (!at(Tok::String)) {
      error("T001", "expected " + what);
      return std::nullopt;
    }
    std::string value = cur().text;
    advance();
    return value;
  }

  std::optional<double> number(const std::string &what) {
    if (!at(Tok::Number)) {
      error("T001", "expected " + what);
      return std::nullopt;
    }
    double value = 0.0;
    try {
      value = std::stod(cur().text);
    } catch (const std::exception &) {
      error("T001", what + " out of range");
      advance();
      return std::nullopt;
    }
    advance();
    return value;
  }

  std::optional<std::vector<std::string>> id_list(const std::string &what) {
    std::vector<std::string> out;
    auto first = ident(what);
    if (!first)
      return std::nullopt;
    out.push_back(*first);
    while (at(Tok::Comma)) {
      advance();
      auto next = ident(what);
      if (!next)
        return std::nullopt;
      out.push_back(*next);
    }
    return out;
  }

  // name=value unit
  std::optional<Quantity> quantity(const std::string &what) {
    Quantity q;
    auto name = ident(what + " name");
    if (!name)
      return std::nullopt;
    q.name = *name;
    if (!at(Tok::Eq)) {
      error("T001", "expected '=' in " + what);
      return std::nullopt;
    }
    advance();
    auto value = number(what + " value");
    if (!value)
      return std::nullopt;
    q.value = *value;
    if (at(Tok::Percent)) {
      q.unit = "%";
      advance();
    } else if (at(Tok::Ident)) {
      q.unit = cur().text;
      advance();
    } else {
      error("T001", "expected unit token in " + what);
      return std::nullopt;
    }
    return q;
  }

  template <typename T>
  bool duplicate(const std::vector<T> &items, const std::string &id, const std::string &what) {
    if (std::any_of(items.begin(), items.end(), [&](const T &x) { return x.id == id; })) {
      error("T002", "duplicate " + what + " id '" + id + "'");
      return true;
    }
    return false;
  }

  void parse_hazard() {
    advance();
    Hazard h;
    auto id = ident("hazard id");
    if (!id) {
      sync_line();
      return;
    }
    h.id = *id;
    auto description = text("hazard description string");
    if (!description) {
      sync_line();
      return;
    }
    h.description = *description;
    if (at_keyword("severity")) {
      advance();
      auto note = text("severity note string");
      if (!note) {
        sync_line();
        return;
      }
      h.severity_note = *note;
    }
    if (!duplicate(model_.hazards, h.id, "hazard"))
      model_.hazards.push_back(std::move(h));
  }

  void parse_req() {
    advance();
    SafetyRequirement r;
    auto id = ident("requirement id");
    if (!id) {
      sync_line();
      return;
    }
    r.id = *id;
    auto body = text("requirement text string");
    if (!body) {
      sync_line();
      return;
    }
    r.text = *body;
    if (!at_keyword("mitigates")) {
      error("T001", "requirement '" + r.id + "' must declare 'mitigates'");
      sync_line();
      return;
    }
    advance();
    auto hazards = id_list("hazard id");
    if (!hazards) {
      sync_line();
      return;
    }
    r.mitigates = *hazards;
    while (at_keyword("qty")) {
      advance();
      auto q = quantity("quantity");
      if (!q) {
        sync_line();
        return;
      }
      r.quantities.push_back(*q);
    }
    if (!duplicate(model_.requirements, r.id, "requirement"))
      model_.requirements.push_back(std::move(r));
  }

  void parse_mlreq() {
    advance();
    MlSafetyRequirement m;
    auto id = ident("ML requirement id");
    if (!id) {
      sync_line();
      return;
    }
    m.id = *id;
    auto body = text("ML requirement text string");
    if (!body) {
      sync_line();
      return;
    }
    m.text = *body;
    if (!at_keyword("from")) {
      error("T001", "ML requirement '" + m.id + "' must declare 'from'");
      sync_line();
      return;
    }
    advance();
    auto parents = id_list("system requirement id");
    if (!parents) {
      sync_line();
      return;
    }
    m.derived_from = *parents;
    if (!at_keyword("metric")) {
      error("T001", "ML requirement '" + m.id + "' must declare 'metric'");
      sync_line();
      return;
    }
    advance();
    auto name = ident("metric name");
    if (!name) {
      sync_line();
      return;
    }
    m.metric.name = *name;
    if (at(Tok::Ge)) {
      m.metric.direction = MetricDirection::AtLeast;
    } else if (at(Tok::Le)) {
      m.metric.direction = MetricDirection::AtMost;
    } else {
      error("T001", "expected '>=' or '<=' in metric");
      sync_line();
      return;
    }
    advance();
    auto threshold = number("metric threshold");
    if (!threshold) {
      sync_line();
      return;
    }
    m.metric.threshold = *threshold;
    if (at(Tok::Percent))
      advance(); // thresholds may be written with a % sign
    if (!duplicate(model_.ml_requirements, m.id, "ML requirement"))
      model_.ml_requirements.push_back(std::move(m));
  }

  void parse_evidence() {
    advance();
    EvidenceItem e;
    auto id = ident("evidence id");
    if (!id) {
      sync_line();
      return;
    }
    e.id = *id;
    auto kind = ident("evidence kind");
    if (!kind) {
      sync_line();
      return;
    }
    e.kind = *kind;
    if (!at_keyword("supports")) {
      error("T001", "evidence '" + e.id + "' must declare 'supports'");
      sync_line();
      return;
    }
    advance();
    auto supports = id_list("requirement id");
    if (!supports) {
      sync_line();
      return;
    }
    e.supports = *supports;
    while (at(Tok::Ident) && (cur().text == "measured" || cur().text == "invalid")) {
      if (cur().text == "measured") {
        advance();
        auto q = quantity("measurement");
        if (!q) {
          sync_line();
          return;
        }
        e.measured = *q;
      } else {
        e.valid = false;
        advance();
      }
    }
    if (!duplicate(model_.evidence, e.id, "evidence"))
      model_.evidence.push_back(std::move(e));
  }

  void parse_bind() {
    advance();
    auto entity = ident("entity id");
    if (!entity) {
      sync_line();
      return;
    }
    if (!at(Tok::Arrow)) {
      error("T001", "expected '->' in bind");
      sync_line();
      return;
    }
    advance();
    auto module = ident("module name");
    if (!module) {
      sync_line();
      return;
    }
    if (!at(Tok::ColonColon)) {
      error("T001", "expected 'module::node' in bind");
      sync_line();
      return;
    }
    advance();
    auto node = ident("node id");
    if (!node) {
      sync_line();
      return;
    }
    model_.gsn_bindings[*entity] = qualify(*module, *node);
  }

  void cross_check() {
    std::set<std::string> hazard_ids, req_ids, ml_ids, all;
    for (const auto &h : model_.hazards) {
      hazard_ids.insert(h.id);
      all.insert(h.id);
    }
    for (const auto &r : model_.requirements) {
      req_ids.insert(r.id);
      all.insert(r.id);
    }
    for (const auto &m : model_.ml_requirements) {
      ml_ids.insert(m.id);
      all.insert(m.id);
    }
    for (const auto &e : model_.evidence)
      all.insert(e.id);

    auto dangling = [&](const std::string &owner, const std::string &id,
                        const std::string &what) {
      diags_.push_back({Severity::Error, "T003",
                        "'" + owner + "' references unknown " + what + " '" + id + "'",
                        SourceSpan{file_, 1, 1, 1, 1}});
    };
    for (const auto &r : model_.requirements)
      for (const auto &h : r.mitigates)
        if (!hazard_ids.count(h))
          dangling(r.id, h, "hazard");
    for (const auto &m : model_.ml_requirements)
      for (const auto &r : m.derived_from)
        if (!req_ids.count(r))
          dangling(m.id, r, "system requirement");
    for (const auto &e : model_.evidence)
      for (const auto &s : e.supports)
        if (!req_ids.count(s) && !ml_ids.count(s))
          dangling(e.id, s, "requirement");
    for (const auto &[entity, node] : model_.gsn_bindings)
      if (!all.count(entity))
        dangling("bind", entity, "trace entity");
  }
};

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

bool metric_satisfied(const Metric &metric, double value) {
  return metric.direction == MetricDirection::AtLeast ? value >= metric.threshold
                                                      : value <= metric.threshold;
}

const MlSafetyRequirement *find_mlreq(const TraceModel &model, const std::string &id) {
  for (const auto &m : model.ml_requirements)
    if (m.id == id)
      return &m;
  return nullptr;
}

// Does this evidence item count as support for `target`? In strict mode a
// measured value must satisfy the metric of a supported ML requirement.
bool evidence_supports(const TraceModel &model, const EvidenceItem &e, const std::string &target,
                       bool strict) {
  if (!e.valid)
    return false;
  if (std::find(e.supports.begin(), e.supports.end(), target) == e.supports.end())
    return false;
  if (strict) {
    if (const MlSafetyRequirement *ml = find_mlreq(model, target)) {
      if (e.measured && e.measured->name == ml->metric.name &&
          !metric_satisfied(ml->metric, e.measured->value))
        return false;
    }
  }
  return true;
}

bool ml_covered(const TraceModel &model, const std::string &ml_id, bool strict) {
  return std::any_of(model.evidence.begin(), model.evidence.end(), [&](const EvidenceItem &e) {
    return evidence_supports(model, e, ml_id, strict);
  });
}

bool requirement_covered(const TraceModel &model, const std::string &req_id, bool strict) {
  for (const auto &e : model.evidence)
    if (evidence_supports(model, e, req_id, strict))
      return true;
  // Evidence attached to a derived ML requirement counts toward the system
  // requirement it refines.
  for (const auto &m : model.ml_requirements) {
    if (std::find(m.derived_from.begin(), m.derived_from.end(), req_id) ==
        m.derived_from.end())
      continue;
    if (ml_covered(model, m.id, strict))
      return true;
  }
  return false;
}

} // namespace

TraceModel parse_trace(std::string_view text, const std::string &file,
                       std::vector<Diagnostic> &diags) {
  std::vector<Diagnostic> lex_diags;
  Lexer lexer(normalize_newlines(text), file);
  auto tokens = lexer.run(lex_diags);
  diags.insert(diags.end(), lex_diags.begin(), lex_diags.end());
  TraceParser parser(std::move(tokens), file, diags);
  auto model = parser.run();
  sort_diagnostics(diags);
  return model;
}

CoverageReport coverage(const TraceModel &model, bool strict) {
  CoverageReport report;

  report.hazards.total = static_cast<int>(model.hazards.size());
  for (const auto &h : model.hazards) {
    bool covered = std::any_of(
        model.requirements.begin(), model.requirements.end(), [&](const SafetyRequirement &r) {
          return std::find(r.mitigates.begin(), r.mitigates.end(), h.id) != r.mitigates.end();
        });
    if (covered)
      ++report.hazards.covered;
    else
      report.hazards.uncovered.push_back(h.id);
  }

  report.requirements.total = static_cast<int>(model.requirements.size());
  for (const auto &r : model.requirements) {
    if (requirement_covered(model, r.id, strict))
      ++report.requirements.covered;
    else
      report.requirements.uncovered.push_back(r.id);
  }

  report.ml_requirements.total = static_cast<int>(model.ml_requirements.size());
  for (const auto &m : model.ml_requirements) {
    if (ml_covered(model, m.id, strict))
      ++report.ml_requirements.covered;
    else
      report.ml_requirements.uncovered.push_back(m.id);
  }

  // Evidence layer: a hazard holds up only while at least one of its
  // mitigating requirements is evidence-backed.
  report.evidence_layer.total = static_cast<int>(model.hazards.size());
  for (const auto &h : model.hazards) {
    bool any_requirement = false;
    bool any_covered = false;
    for (const auto &r : model.requirements) {
      if (std::find(r.mitigates.begin(), r.mitigates.end(), h.id) == r.mitigates.end())
        continue;
      any_requirement = true;
      if (requirement_covered(model, r.id, strict))
        any_covered = true;
    }
    if (any_requirement && any_covered)
      ++report.evidence_layer.covered;
    else
      report.evidence_layer.uncovered.push_back(h.id);
  }

  report.fully_covered = report.hazards.covered == report.hazards.total &&
                         report.requirements.covered == report.requirements.total &&
                         report.ml_requirements.covered == report.ml_requirements.total;
  return report;
}

std::vector<StrictFinding> strict_check(const TraceModel &model) {
  std::vector<StrictFinding> findings;
  for (const auto &e : model.evidence) {
    if (!e.measured)
      continue;
    for (const auto &target : e.supports) {
      const MlSafetyRequirement *ml = find_mlreq(model, target);
      if (!ml || ml->metric.name != e.measured->name)
        continue;
      StrictFinding f;
      f.evidence_id = e.id;
      f.ml_requirement_id = ml->id;
      f.accepted = metric_satisfied(ml->metric, e.measured->value);
      std::string op = ml->metric.direction == MetricDirection::AtLeast ? ">=" : "<=";
      std::ostringstream detail;
      detail << e.measured->name << " = " << e.measured->value << " vs " << op << " "
             << ml->metric.threshold;
      f.detail = detail.str();
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

ImpactResult impact(const TraceModel &model, const CaseArchive *archive,
                    const std::string &evidence_id) {
  auto item = std::find_if(model.evidence.begin(), model.evidence.end(),
                           [&](const EvidenceItem &e) { return e.id == evidence_id; });
  if (item == model.evidence.end())
    throw Error("unknown evidence id '" + evidence_id + "'");

  ImpactResult result;
  result.model = model;
  result.model.evidence[item - model.evidence.begin()].valid = false;

  auto before = coverage(model);
  auto after = coverage(result.model);

  auto newly_uncovered = [](const LayerCoverage &was, const LayerCoverage &now) {
    std::vector<std::string> out;
    std::set<std::string> old(was.uncovered.begin(), was.uncovered.end());
    for (const auto &id : now.uncovered)
      if (!old.count(id))
        out.push_back(id);
    return out;
  };
  result.affected_requirements = newly_uncovered(before.requirements, after.requirements);
  result.affected_hazards = newly_uncovered(before.evidence_layer, after.evidence_layer);
  auto affected_ml = newly_uncovered(before.ml_requirements, after.ml_requirements);

  if (archive) {
    auto composed = compose(*archive);
    std::set<std::string> challenged;
    std::vector<std::string> entities = result.affected_requirements;
    entities.insert(entities.end(), result.affected_hazards.begin(),
                    result.affected_hazards.end());
    entities.insert(entities.end(), affected_ml.begin(), affected_ml.end());
    entities.push_back(evidence_id);
    for (const auto &entity : entities) {
      auto bound = model.gsn_bindings.find(entity);
      if (bound == model.gsn_bindings.end())
        continue;
      const Node *node = composed.graph.find_node(bound->second);
      if (!node)
        continue;
      // Context-side nodes challenge the claims stated in their context.
      std::vector<std::string> starts;
      if (node->kind == NodeKind::Context || node->kind == NodeKind::Assumption ||
          node->kind == NodeKind::Justification) {
        for (const auto &e : composed.graph.edges)
          if (e.kind == EdgeKind::InContextOf && e.target == node->id)
            starts.push_back(e.source);
        challenged.insert(starts.begin(), starts.end());
      } else {
        starts.push_back(node->id);
      }
      for (const auto &start : starts) {
        auto up = ancestors(composed.graph, start);
        challenged.insert(up.begin(), up.end());
      }
    }
    result.challenged_claims.assign(challenged.begin(), challenged.end());
  }
  return result;
}

TraceModel link_to_case(const TraceModel &model, const CaseArchive &archive,
                        const std::vector<std::pair<std::string, std::string>> &bindings,
                        std::vector<Diagnostic> &diags) {
  TraceModel out = model;

  enum class EntityKind { Hazard, Requirement, MlRequirement, Evidence, Unknown };
  auto entity_kind = [&](const std::string &id) {
    for (const auto &h : model.hazards)
      if (h.id == id)
        return EntityKind::Hazard;
    for (const auto &r : model.requirements)
      if (r.id == id)
        return EntityKind::Requirement;
    for (const auto &m : model.ml_requirements)
      if (m.id == id)
        return EntityKind::MlRequirement;
    for (const auto &e : model.evidence)
      if (e.id == id)
        return EntityKind::Evidence;
    return EntityKind::Unknown;
  };

  for (const auto &[entity, target] : bindings) {
    auto kind = entity_kind(entity);
    if (kind == EntityKind::Unknown) {
      diags.push_back(
          {Severity::Error, "T004", "unknown trace entity '" + entity + "'", SourceSpan{}});
      continue;
    }
    auto [module, id] = split_qualified(target);
    auto it = archive.modules.find(module);
    if (it == archive.modules.end()) {
      diags.push_back({Severity::Error, "T005",
                       "binding target '" + target + "' names unknown module '" + module + "'",
                       SourceSpan{}});
      continue;
    }
    const Node *node = it->second.find_node(id);
    if (!node) {
      diags.push_back({Severity::Error, "T005",
                       "binding target '" + target + "' names unknown node '" + id + "'",
                       SourceSpan{}});
      continue;
    }
    bool ok;
    if (kind == EntityKind::Evidence) {
      ok = node->kind == NodeKind::Solution;
    } else {
      ok = node->kind == NodeKind::Goal || node->kind == NodeKind::Context;
    }
    if (!ok) {
      diags.push_back({Severity::Error, "T010",
                       "entity '" + entity + "' cannot bind to " + to_string(node->kind) +
                           " node '" + target + "'",
                       SourceSpan{}});
      continue;
    }
    out.gsn_bindings[entity] = target;
  }
  return out;
}

std::vector<Diagnostic> check_bindings(const TraceModel &model, const CaseArchive &archive) {
  std::vector<Diagnostic> diags;
  std::vector<std::pair<std::string, std::string>> bindings(model.gsn_bindings.begin(),
                                                            model.gsn_bindings.end());
  TraceModel unbound = model;
  unbound.gsn_bindings.clear();
  link_to_case(unbound, archive, bindings, diags);
  return diags;
}

} // namespace gsn
