#include "gsn/library.hpp"
#include "gsn/trace.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace gsn;

namespace {

TraceModel wildfire() {
  auto content = library::embedded_file("samples/wildfire/wildfire.trc");
  REQUIRE(content.has_value());
  std::vector<Diagnostic> diags;
  auto model = parse_trace(*content, "wildfire.trc", diags);
  REQUIRE_FALSE(has_errors(diags));
  return model;
}

} // namespace

TEST_CASE("trc parsing captures structured quantities") {
  auto model = wildfire();
  REQUIRE(model.hazards.size() == 2);
  CHECK(model.hazards[0].id == "H1");
  CHECK(model.hazards[0].description == "Services Miss an Emergency");
  CHECK_FALSE(model.hazards[0].severity_note.empty());
  REQUIRE(model.requirements.size() == 4);

  auto quantity_of = [&](const std::string &req) {
    for (const auto &r : model.requirements)
      if (r.id == req) {
        REQUIRE(r.quantities.size() == 1);
        return r.quantities.front();
      }
    FAIL("missing requirement");
    return Quantity{};
  };
  CHECK(quantity_of("REQ-SAFE-ER-1") == Quantity{"location_error", 200.0, "m"});
  CHECK(quantity_of("REQ-SAFE-ER-2") == Quantity{"notification_time", 3.0, "h"});
  CHECK(quantity_of("REQ-SAFE-ER-3") == Quantity{"detection_rate", 95.0, "%"});
  CHECK(quantity_of("REQ-SAFE-ER-4") == Quantity{"false_alert_rate", 52.0, "per_month"});

  REQUIRE(model.ml_requirements.size() == 1);
  const auto &ml = model.ml_requirements.front();
  CHECK(ml.derived_from == std::vector<std::string>{"REQ-SAFE-ER-3"});
  CHECK(ml.metric.name == "detection_rate");
  CHECK(ml.metric.direction == MetricDirection::AtLeast);
  CHECK(ml.metric.threshold == doctest::Approx(95.0));

  CHECK(model.gsn_bindings.at("REQ-SAFE-ER-1") == "system::C4");
}

TEST_CASE("trc parsing reports dangling references and bad lines") {
  std::vector<Diagnostic> diags;
  parse_trace("req R1 \"text\" mitigates MISSING\n", "t.trc", diags);
  REQUIRE_FALSE(diags.empty());
  CHECK(diags.front().code == "T003");

  diags.clear();
  parse_trace("hazard H1 \"ok\"\nbogus line here\nhazard H2 \"ok too\"\n", "t.trc", diags);
  bool t001 = false;
  for (const auto &d : diags)
    t001 = t001 || d.code == "T001";
  CHECK(t001);

  diags.clear();
  auto model = parse_trace("hazard H1 \"a\"\nhazard H1 \"b\"\n", "t.trc", diags);
  CHECK(model.hazards.size() == 1);
  CHECK(diags.front().code == "T002");
}

TEST_CASE("wildfire coverage is full with all evidence valid") {
  auto model = wildfire();
  auto report = coverage(model);
  CHECK(report.hazards.covered == 2);
  CHECK(report.hazards.total == 2);
  CHECK(report.requirements.covered == 4);
  CHECK(report.requirements.total == 4);
  CHECK(report.ml_requirements.covered == 1);
  CHECK(report.evidence_layer.covered == 2);
  CHECK(report.fully_covered);
}

TEST_CASE("an empty model is vacuously covered") {
  auto report = coverage(TraceModel{});
  CHECK(report.fully_covered);
  CHECK(report.hazards.total == 0);
  CHECK(report.requirements.total == 0);
}

TEST_CASE("invalid sole evidence uncovers its requirement and flags the hazard layer") {
  auto model = wildfire();
  for (auto &e : model.evidence)
    if (e.id == "EV-ER4")
      e.valid = false;
  auto report = coverage(model);
  CHECK(report.requirements.covered == 3);
  CHECK(report.requirements.uncovered == std::vector<std::string>{"REQ-SAFE-ER-4"});
  // Hazard 2 is still mitigated on the hazard layer but loses its evidence backing.
  CHECK(report.hazards.covered == 2);
  CHECK(report.evidence_layer.uncovered == std::vector<std::string>{"H2"});
  CHECK_FALSE(report.fully_covered);
}

TEST_CASE("evidence through a derived ML requirement covers the system requirement") {
  TraceModel model;
  model.hazards.push_back({"H1", "hazard", ""});
  model.requirements.push_back({"R1", "req", {}, {"H1"}});
  model.ml_requirements.push_back(
      {"M1", "mlreq", {"R1"}, {"metric", 0.5, MetricDirection::AtLeast}});
  model.evidence.push_back({"E1", "test_result", {"M1"}, std::nullopt, true});
  auto report = coverage(model);
  CHECK(report.requirements.covered == 1);
  CHECK(report.ml_requirements.covered == 1);
  CHECK(report.fully_covered);

  model.evidence.front().valid = false;
  auto degraded = coverage(model);
  CHECK(degraded.requirements.covered == 0);
  CHECK(degraded.ml_requirements.covered == 0);
}

TEST_CASE("impact of invalidating the sole evidence of one requirement") {
  auto archive = library::load_archive("wildfire_case");
  auto model = wildfire();
  auto result = impact(model, &archive, "EV-ER2");

  CHECK(result.affected_requirements == std::vector<std::string>{"REQ-SAFE-ER-2"});
  CHECK(result.affected_hazards.empty()); // H1 still covered by ER-1 and ER-3
  // The requirement binds to context C4, whose claims run up the system
  // argument into the ethics apex.
  std::set<std::string> challenged(result.challenged_claims.begin(),
                                   result.challenged_claims.end());
  std::set<std::string> expected = {"system::G9", "system::G3", "system::G1",
                                    "system::S1",  "system::G0", "ethics::EG1"};
  CHECK(challenged == expected);
  // Purity: the input model is untouched, the returned one carries the change.
  for (const auto &e : model.evidence)
    CHECK(e.valid);
  bool invalidated = false;
  for (const auto &e : result.model.evidence)
    if (e.id == "EV-ER2")
      invalidated = !e.valid;
  CHECK(invalidated);
}

TEST_CASE("redundant evidence keeps requirements unaffected") {
  auto model = wildfire();
  EvidenceItem extra;
  extra.id = "EV-ER2-REPEAT";
  extra.kind = "test_result";
  extra.supports = {"REQ-SAFE-ER-2"};
  model.evidence.push_back(extra);
  auto result = impact(model, nullptr, "EV-ER2");
  CHECK(result.affected_requirements.empty());
  CHECK(result.affected_hazards.empty());
}

TEST_CASE("impact rejects unknown evidence ids") {
  auto model = wildfire();
  CHECK_THROWS_AS(impact(model, nullptr, "EV-GHOST"), Error);
}

TEST_CASE("monotonicity: invalidating more evidence never shrinks the affected sets") {
  testing::Rng rng(1212);
  for (int i = 0; i < 30; ++i) {
    auto tc = testing::random_trace_case(rng, 30);
    if (tc.model.evidence.size() < 2)
      continue;
    const auto &first = tc.model.evidence[0].id;
    const auto &second = tc.model.evidence[1].id;
    auto one = impact(tc.model, &tc.archive, first);
    auto two = impact(one.model, &tc.archive, second);
    std::set<std::string> first_reqs(one.affected_requirements.begin(),
                                     one.affected_requirements.end());
    std::set<std::string> cumulative(two.affected_requirements.begin(),
                                     two.affected_requirements.end());
    // Requirements affected by the second invalidation were still covered
    // after the first, so the two sets are disjoint and their union is the
    // total damage; nothing previously affected recovers.
    auto after_two = coverage(two.model);
    for (const auto &r : first_reqs) {
      bool still_uncovered =
          std::find(after_two.requirements.uncovered.begin(),
                    after_two.requirements.uncovered.end(),
                    r) != after_two.requirements.uncovered.end();
      CHECK(still_uncovered);
    }
    for (const auto &r : cumulative)
      CHECK_FALSE(first_reqs.count(r));
  }
}

TEST_CASE("impact equals the brute-force recomputation on random models") {
  testing::Rng rng(90210);
  int done = 0;
  while (done < 60) {
    auto tc = testing::random_trace_case(rng, 40);
    if (tc.model.evidence.empty())
      continue;
    const auto &victim =
        tc.model.evidence[static_cast<size_t>(rng() % tc.model.evidence.size())].id;
    auto got = impact(tc.model, &tc.archive, victim);
    auto expected = testing::oracle_impact(tc.model, tc.archive, victim);
    CHECK(std::set<std::string>(got.affected_requirements.begin(),
                                got.affected_requirements.end()) ==
          expected.affected_requirements);
    CHECK(std::set<std::string>(got.affected_hazards.begin(), got.affected_hazards.end()) ==
          expected.affected_hazards);
    CHECK(std::set<std::string>(got.challenged_claims.begin(), got.challenged_claims.end()) ==
          expected.challenged_claims);
    ++done;
  }
}

TEST_CASE("link_to_case enforces kind rules") {
  auto archive = library::load_archive("wildfire_case");
  auto model = wildfire();
  std::vector<Diagnostic> diags;

  SUBCASE("requirement to context is accepted") {
    auto updated = link_to_case(model, archive,
                                {{"REQ-SAFE-ER-1", "system::C4"}}, diags);
    CHECK(diags.empty());
    CHECK(updated.gsn_bindings.at("REQ-SAFE-ER-1") == "system::C4");
  }
  SUBCASE("evidence to solution is accepted") {
    auto updated = link_to_case(model, archive, {{"EV-ER1", "psm::SOL1"}}, diags);
    CHECK(diags.empty());
    CHECK(updated.gsn_bindings.at("EV-ER1") == "psm::SOL1");
  }
  SUBCASE("hazard to solution is a kind mismatch") {
    auto updated = link_to_case(model, archive, {{"H1", "psm::SOL1"}}, diags);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags.front().code == "T010");
    CHECK(updated.gsn_bindings.at("H1") == "system::C2"); // original kept
  }
  SUBCASE("evidence to strategy is a kind mismatch") {
    auto updated = link_to_case(model, archive, {{"EV-ER1", "system::S1"}}, diags);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags.front().code == "T010");
    CHECK_FALSE(updated.gsn_bindings.count("EV-ER1"));
  }
  SUBCASE("unknown entity and unknown node") {
    link_to_case(model, archive, {{"GHOST", "system::C4"}}, diags);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags.front().code == "T004");
    diags.clear();
    link_to_case(model, archive, {{"H1", "system::NOPE"}}, diags);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags.front().code == "T005");
  }
}

TEST_CASE("strict mode compares measured values direction-aware") {
  auto model = library::load_trace("sepsis_trace");
  auto findings = strict_check(model);
  std::map<std::string, bool> verdict;
  for (const auto &f : findings)
    verdict[f.evidence_id] = f.accepted;
  REQUIRE(verdict.count("EV-SEP-MOD-LARGE"));
  REQUIRE(verdict.count("EV-SEP-ORIG-LARGE"));
  REQUIRE(verdict.count("EV-SEP-CLIN-LARGE"));
  CHECK(verdict["EV-SEP-MOD-LARGE"]);        // 8 <= 10
  CHECK_FALSE(verdict["EV-SEP-ORIG-LARGE"]); // 35 > 10
  CHECK(verdict["EV-SEP-CLIN-LARGE"]);       // 3 <= 10
  // Evidence measuring a different name is not checked.
  for (const auto &f : findings)
    CHECK(f.detail.find("large_dose_change_rate") != std::string::npos);

  // Strict coverage discounts the failing evidence but keeps passing items.
  auto strict_report = coverage(model, true);
  CHECK(strict_report.ml_requirements.covered == 1);

  // With only the original policy's evidence, strict coverage fails.
  TraceModel original_only = model;
  std::erase_if(original_only.evidence, [](const EvidenceItem &e) {
    return e.id != "EV-SEP-ORIG-LARGE";
  });
  CHECK(coverage(original_only, false).ml_requirements.covered == 1);
  CHECK(coverage(original_only, true).ml_requirements.covered == 0);
}

TEST_CASE("at_least metrics accept from the threshold upward") {
  TraceModel model;
  model.hazards.push_back({"H", "h", ""});
  model.requirements.push_back({"R", "r", {}, {"H"}});
  model.ml_requirements.push_back(
      {"M", "m", {"R"}, {"rate", 95.0, MetricDirection::AtLeast}});
  model.evidence.push_back(
      {"E-PASS", "eval_report", {"M"}, Quantity{"rate", 96.2, "%"}, true});
  model.evidence.push_back(
      {"E-FAIL", "eval_report", {"M"}, Quantity{"rate", 90.0, "%"}, true});
  auto findings = strict_check(model);
  REQUIRE(findings.size() == 2);
  CHECK(findings[0].accepted);
  CHECK_FALSE(findings[1].accepted);
}
