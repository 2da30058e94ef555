#include "gsn/composer.hpp"
#include "gsn/library.hpp"
#include "gsn/validator.hpp"

#include <doctest.h>

using namespace gsn;

namespace {

ArgumentGraph parse_module(const std::string &text) {
  auto r = dsl::parse(text, "mem.gsn");
  REQUIRE(r.ok());
  REQUIRE(r.document.modules.size() == 1);
  return r.document.modules.front().graph;
}

// Minimal archive mirroring the intended composition: ethics on top,
// supported by one system module, itself supported by one model module.
CaseArchive minimal_archive(bool with_gpai = false) {
  CaseArchive archive;
  archive.modules.emplace("ethics", parse_module(R"(module ethics {
  goal E1 "deployment is ethically acceptable"
  public E1
})"));
  archive.tags.emplace("ethics", ModuleTag::Ethics);
  archive.modules.emplace("system", parse_module(R"(module system {
  goal S1 "the system is sufficiently safe" undeveloped
  public S1
})"));
  archive.tags.emplace("system", ModuleTag::System);
  archive.modules.emplace("psm", parse_module(R"(module psm {
  goal P1 "the model satisfies its allocated requirements" undeveloped
  public P1
})"));
  archive.tags.emplace("psm", ModuleTag::PurposeSpecificModel);
  archive.links.push_back({"ethics", "E1", "system", "S1", false, {}});
  archive.links.push_back({"system", "S1", "psm", "P1", false, {}});
  if (with_gpai) {
    archive.modules.emplace("gpm", parse_module(R"(module gpm {
  goal GP1 "capabilities do not cause unacceptable outcomes" undeveloped
  public GP1
})"));
    archive.tags.emplace("gpm", ModuleTag::GeneralPurposeModel);
    archive.links.push_back({"psm", "P1", "gpm", "GP1", true, {}});
  }
  return archive;
}

} // namespace

TEST_CASE("composing an archive wired like the top-level composition is clean") {
  auto archive = minimal_archive();
  auto result = compose(archive);
  CHECK(result.ok());
  CHECK(result.graph.find_node("ethics::E1"));
  CHECK(result.graph.find_node("system::S1"));
  CHECK(result.graph.has_edge({"ethics::E1", "system::S1", EdgeKind::SupportedBy}));
  CHECK(result.graph.has_edge({"system::S1", "psm::P1", EdgeKind::SupportedBy}));
}

TEST_CASE("single module composes to itself with qualified ids") {
  CaseArchive archive;
  archive.modules.emplace("m", parse_module(R"(module m {
  goal A "top"
  goal B "支援 claim" undeveloped
  context C "scope"

  A -> B : supported_by
  A -> C : in_context_of

  public A
})"));
  archive.tags.emplace("m", ModuleTag::Other);
  auto result = compose(archive);
  REQUIRE(result.ok());
  const auto &g = result.graph;
  REQUIRE(g.nodes.size() == 3);
  CHECK(g.nodes[0].id == "m::A");
  CHECK(g.nodes[1].id == "m::B");
  CHECK(g.has_edge({"m::A", "m::B", EdgeKind::SupportedBy}));
  CHECK(g.has_edge({"m::A", "m::C", EdgeKind::InContextOf}));
  CHECK(g.public_ids == std::vector<std::string>{"m::A"});
}

TEST_CASE("away goals collapse into edges to public goals") {
  CaseArchive archive;
  archive.modules.emplace("a", parse_module(R"(module a {
  goal A1 "local claim"
  awaygoal AW "remote claim" ref b::B1

  A1 -> AW : supported_by

  public A1
})"));
  archive.modules.emplace("b", parse_module(R"(module b {
  goal B1 "remote claim" undeveloped
  public B1
})"));
  archive.tags.emplace("a", ModuleTag::Other);
  archive.tags.emplace("b", ModuleTag::Other);
  auto result = compose(archive);
  REQUIRE(result.ok());
  CHECK(result.graph.find_node("a::AW") == nullptr);
  CHECK(result.graph.has_edge({"a::A1", "b::B1", EdgeKind::SupportedBy}));
}

TEST_CASE("away goal to a non-public node names both modules") {
  CaseArchive archive;
  archive.modules.emplace("a", parse_module(R"(module a {
  goal A1 "local claim"
  awaygoal AW "remote claim" ref b::B2

  A1 -> AW : supported_by
})"));
  archive.modules.emplace("b", parse_module(R"(module b {
  goal B1 "top" undeveloped
  goal B2 "hidden" undeveloped
  public B1
})"));
  archive.tags.emplace("a", ModuleTag::Other);
  archive.tags.emplace("b", ModuleTag::Other);
  auto result = compose(archive);
  REQUIRE_FALSE(result.ok());
  bool found = false;
  for (const auto &d : result.diagnostics) {
    if (d.code != "C002")
      continue;
    found = true;
    CHECK(d.message.find("'a'") != std::string::npos);
    CHECK(d.message.find("'b'") != std::string::npos);
  }
  CHECK(found);
}

TEST_CASE("module references re-target to the referenced module's root") {
  CaseArchive archive;
  archive.modules.emplace("top", parse_module(R"(module top {
  goal T1 "claim"
  moduleref MSub "Sub Argument" ref sub

  T1 -> MSub : supported_by
})"));
  archive.modules.emplace("sub", parse_module(R"(module sub {
  goal SB1 "sub claim" undeveloped
})"));
  archive.tags.emplace("top", ModuleTag::Other);
  archive.tags.emplace("sub", ModuleTag::Other);
  auto result = compose(archive);
  REQUIRE(result.ok());
  CHECK(result.graph.find_node("top::MSub") == nullptr);
  CHECK(result.graph.has_edge({"top::T1", "sub::SB1", EdgeKind::SupportedBy}));

  SUBCASE("a missing module is C001") {
    auto broken = archive.without_module("sub");
    auto r = compose(broken);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics.front().code == "C001");
  }
  SUBCASE("an ambiguous root is C006") {
    auto two_roots = archive;
    auto sub = two_roots.modules.at("sub");
    Node extra;
    extra.id = "SB2";
    extra.kind = NodeKind::Goal;
    extra.statement = "second root";
    extra.undeveloped = true;
    sub.nodes.push_back(extra);
    two_roots.modules.at("sub") = sub;
    auto r = compose(two_roots);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics.front().code == "C006");
  }
}

TEST_CASE("missing ACP confidence module is C004") {
  CaseArchive archive;
  archive.modules.emplace("m", parse_module(R"(module m {
  goal A "top"
  context C "scope"

  A -> C : in_context_of

  acp ACP1 on (A -> C : in_context_of) confidence ghost
})"));
  archive.tags.emplace("m", ModuleTag::Other);
  auto result = compose(archive);
  REQUIRE_FALSE(result.ok());
  CHECK(result.diagnostics.front().code == "C004");
}

TEST_CASE("every node appears exactly once, qualified") {
  auto archive = library::load_archive("wildfire_case");
  auto result = compose(archive);
  REQUIRE(result.ok());
  // Away goals and module references dissolve during composition.
  size_t dissolved = 0;
  size_t expected_total = 0;
  for (const auto &[name, graph] : archive.modules) {
    expected_total += graph.nodes.size();
    for (const auto &n : graph.nodes)
      if (n.kind == NodeKind::AwayGoal || n.kind == NodeKind::ModuleRef)
        ++dissolved;
  }
  CHECK(result.graph.nodes.size() == expected_total - dissolved);
  std::set<std::string> ids;
  for (const auto &n : result.graph.nodes) {
    CHECK(is_qualified(n.id));
    CHECK(ids.insert(n.id).second);
  }
  for (const auto &[name, graph] : archive.modules)
    for (const auto &n : graph.nodes)
      if (n.kind != NodeKind::AwayGoal && n.kind != NodeKind::ModuleRef)
        CHECK(result.graph.find_node(qualify(name, n.id)) != nullptr);
}

TEST_CASE("the composed wildfire case is structurally well-formed") {
  auto result = compose(library::load_archive("wildfire_case"));
  REQUIRE(result.ok());
  auto diags = validate(result.graph);
  CHECK_FALSE(has_errors(diags));
  // Confidence modules stay as separately rooted subtrees; that is the one
  // expected warning.
  for (const auto &d : diags)
    CHECK(d.code == "V011");
}

TEST_CASE("composition is associative under archive merging") {
  auto full = library::load_archive("wildfire_case");
  CaseArchive left, right;
  size_t i = 0;
  for (const auto &[name, graph] : full.modules) {
    auto &half = (i++ % 2 == 0) ? left : right;
    half.modules.emplace(name, graph);
    half.tags.emplace(name, full.tags.at(name));
  }
  left.links = full.links;
  auto merged = left.merged_with(right);
  auto direct = compose(full);
  auto staged = compose(merged);
  REQUIRE(direct.ok());
  REQUIRE(staged.ok());
  CHECK(direct.graph == staged.graph);
}

TEST_CASE("architecture checks") {
  SUBCASE("the intended shape passes") {
    auto report = check_architecture(minimal_archive());
    CHECK(report.shape_ok);
    CHECK(report.findings.empty());
  }
  SUBCASE("an optional purpose-specific to general-purpose link passes A4") {
    auto report = check_architecture(minimal_archive(true));
    CHECK(report.shape_ok);
  }
  SUBCASE("a mandatory purpose-specific to general-purpose link fails A4") {
    auto archive = minimal_archive(true);
    for (auto &link : archive.links)
      link.optional = false;
    auto report = check_architecture(archive);
    CHECK_FALSE(report.shape_ok);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings.front().code == "A4");
  }
  SUBCASE("no system module yields exactly A2") {
    auto archive = minimal_archive().without_module("system");
    auto report = check_architecture(archive);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings.front().code == "A2");
  }
  SUBCASE("two ethics modules yield exactly A1") {
    auto archive = minimal_archive();
    archive.modules.emplace("ethics2", archive.modules.at("ethics"));
    archive.tags.emplace("ethics2", ModuleTag::Ethics);
    auto report = check_architecture(archive);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings.front().code == "A1");
  }
  SUBCASE("a system module without model support yields A3") {
    auto archive = minimal_archive();
    std::erase_if(archive.links,
                  [](const CompositionLink &l) { return l.to_module == "psm"; });
    auto report = check_architecture(archive);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings.front().code == "A3");
  }
  SUBCASE("an expanded ethics argument needs all four principle modules") {
    auto archive = library::load_archive("wildfire_case");
    auto report = check_architecture(archive);
    CHECK(report.shape_ok);
    auto missing = archive.without_module("beneficence");
    // Keep composition resolvable for the precondition: the reference from
    // justice to beneficence now dangles, so only run the shape check.
    auto degraded = check_architecture(missing);
    CHECK_FALSE(degraded.shape_ok);
    bool a5 = false;
    for (const auto &d : degraded.findings)
      if (d.code == "A5" && d.message.find("beneficence") != std::string::npos)
        a5 = true;
    CHECK(a5);
  }
}

TEST_CASE("manifest loader reports problems with codes") {
  std::vector<Diagnostic> diags;
  auto reader = [](const std::string &) -> std::optional<std::string> { return std::nullopt; };
  auto archive = load_manifest("module x = \"missing.gsn\" tag other\n", "case.manifest",
                               reader, diags);
  REQUIRE_FALSE(diags.empty());
  CHECK(diags.front().code == "C008");
  CHECK(archive.modules.empty());

  diags.clear();
  auto good_reader = [](const std::string &path) -> std::optional<std::string> {
    if (path == "a.gsn")
      return std::string("module a { goal A1 \"x\" undeveloped }");
    return std::nullopt;
  };
  auto dup = load_manifest("module a = \"a.gsn\" tag other\nmodule a = \"a.gsn\" tag other\n",
                           "case.manifest", good_reader, diags);
  bool c003 = false;
  for (const auto &d : diags)
    c003 = c003 || d.code == "C003";
  CHECK(c003);
  CHECK(dup.modules.size() == 1);

  diags.clear();
  load_manifest("module b = \"a.gsn\" tag other\n", "case.manifest", good_reader, diags);
  bool mismatch = false;
  for (const auto &d : diags)
    mismatch = mismatch || (d.code == "C008" && d.message.find("declares") != std::string::npos);
  CHECK(mismatch);
}
