#pragma once

#include "gsn/composer.hpp"
#include "gsn/core.hpp"
#include "gsn/diagnostics.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gsn {

struct Quantity {
  std::string name;
  double value = 0.0;
  std::string unit;

  friend bool operator==(const Quantity &, const Quantity &) = default;
};

struct Hazard {
  std::string id;
  std::string description;
  std::string severity_note;
};

struct SafetyRequirement {
  std::string id;
  std::string text;
  std::vector<Quantity> quantities;
  std::vector<std::string> mitigates; // hazard ids, nonempty
};

enum class MetricDirection { AtLeast, AtMost };

struct Metric {
  std::string name;
  double threshold = 0.0;
  MetricDirection direction = MetricDirection::AtLeast;
};

struct MlSafetyRequirement {
  std::string id;
  std::string text;
  std::vector<std::string> derived_from; // system requirement ids, nonempty
  Metric metric;
};

struct EvidenceItem {
  std::string id;
  std::string kind; // free tag: test_result, dataset_report, eval_report, audit, ...
  std::vector<std::string> supports; // requirement or ML requirement ids, nonempty
  std::optional<Quantity> measured;
  bool valid = true;
};

struct TraceModel {
  std::vector<Hazard> hazards;
  std::vector<SafetyRequirement> requirements;
  std::vector<MlSafetyRequirement> ml_requirements;
  std::vector<EvidenceItem> evidence;
  std::map<std::string, std::string> gsn_bindings; // entity id -> module::node
};

/// Line-oriented `.trc` format:
///   hazard ID "text" [severity "note"]
///   req ID "text" mitigates H1,H2 [qty name=value unit]...
///   mlreq ID "text" from R1,R2 metric name>=value | name<=value
///   evidence ID kind supports R1,R2 [measured name=value unit] [invalid]
///   bind ID -> module::node
/// Problems are reported as T0xx diagnostics; parsing recovers per line.
TraceModel parse_trace(std::string_view text, const std::string &file,
                       std::vector<Diagnostic> &diags);

struct LayerCoverage {
  int total = 0;
  int covered = 0;
  std::vector<std::string> uncovered;
};

/// Coverage per layer. A hazard is covered when some requirement mitigates
/// it; a requirement when valid evidence supports it directly or through a
/// derived ML requirement; an ML requirement when valid evidence supports
/// it. `evidence_layer` reports hazards whose mitigating requirements have
/// all lost evidence support.
struct CoverageReport {
  LayerCoverage hazards;
  LayerCoverage requirements;
  LayerCoverage ml_requirements;
  LayerCoverage evidence_layer; // hazards judged by evidence-backed requirements
  bool fully_covered = false;
};

/// In strict mode, evidence whose measured value fails the metric of a
/// supported ML requirement does not count as support.
CoverageReport coverage(const TraceModel &model, bool strict = false);

struct StrictFinding {
  std::string evidence_id;
  std::string ml_requirement_id;
  bool accepted = false;
  std::string detail;
};

/// Direction-aware comparison of evidence `measured` values against the
/// metrics of the ML requirements they support. Evidence without a matching
/// measurement name is not checked.
std::vector<StrictFinding> strict_check(const TraceModel &model);

struct ImpactResult {
  TraceModel model; // the input with the evidence item marked invalid
  std::vector<std::string> affected_requirements;
  std::vector<std::string> affected_hazards;
  std::vector<std::string> challenged_claims; // qualified GSN node ids
};

/// Marks one evidence item invalid and reports what loses support:
/// requirements that had coverage and lost it, hazards whose mitigating
/// requirements all lost evidence backing, and -- when an archive is given
/// -- the GSN claims challenged by the change: for every affected entity
/// (including the invalidated item itself), the bound node's SupportedBy
/// ancestors in the composed case, hopping from context-side nodes to the
/// claims they attach to. Throws Error on an unknown evidence id.
ImpactResult impact(const TraceModel &model, const CaseArchive *archive,
                    const std::string &evidence_id);

/// Records entity -> node bindings. Evidence may bind Solutions; hazards,
/// requirements and ML requirements may bind Goals or Contexts. Anything
/// else is a kind-mismatch Error (T010); unknown entities and nodes are
/// Errors too. Returns the updated model; rejected bindings are skipped.
TraceModel link_to_case(const TraceModel &model, const CaseArchive &archive,
                        const std::vector<std::pair<std::string, std::string>> &bindings,
                        std::vector<Diagnostic> &diags);

/// Applies link_to_case to the bindings the model already carries,
/// reporting any that do not hold against the archive.
std::vector<Diagnostic> check_bindings(const TraceModel &model, const CaseArchive &archive);

} // namespace gsn
