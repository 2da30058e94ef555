// gsn: check, format, instantiate, compose and trace GSN safety-case files.
#include "gsn/composer.hpp"
#include "gsn/dsl.hpp"
#include "gsn/export.hpp"
#include "gsn/library.hpp"
#include "gsn/pattern.hpp"
#include "gsn/trace.hpp"
#include "gsn/validator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#ifdef _WIN32
#include <io.h>
#define GSN_ISATTY _isatty(1)
#else
#include <unistd.h>
#define GSN_ISATTY isatty(1)
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitErrors = 1;
constexpr int kExitUsage = 2;

bool use_color() {
  static const bool enabled = GSN_ISATTY && std::getenv("NO_COLOR") == nullptr;
  return enabled;
}

std::string styled(const gsn::Diagnostic &d) {
  if (!use_color())
    return gsn::render(d);
  const char *color = d.severity == gsn::Severity::Error     ? "\033[31m"
                      : d.severity == gsn::Severity::Warning ? "\033[33m"
                                                             : "\033[36m";
  std::string plain = gsn::render(d);
  auto pos = plain.find(gsn::to_string(d.severity) + "[");
  if (pos == std::string::npos)
    return plain;
  return plain.substr(0, pos) + color + plain.substr(pos) + "\033[0m";
}

std::optional<std::string> read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    return false;
  out << content;
  return static_cast<bool>(out);
}

ordered_json diagnostics_json(const std::vector<gsn::Diagnostic> &diags) {
  ordered_json list = ordered_json::array();
  for (const auto &d : diags) {
    ordered_json j;
    j["severity"] = gsn::to_string(d.severity);
    j["code"] = d.code;
    j["message"] = d.message;
    if (d.span.valid()) {
      j["file"] = d.span.file;
      j["line"] = d.span.start_line;
      j["col"] = d.span.start_col;
    }
    list.push_back(std::move(j));
  }
  return list;
}

void print_diagnostics(const std::vector<gsn::Diagnostic> &diags, std::ostream &out) {
  for (const auto &d : diags)
    out << styled(d) << '\n';
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

int cmd_check(const std::vector<std::string> &paths, const std::string &format) {
  struct FileResult {
    bool readable = true;
    std::vector<gsn::Diagnostic> diags;
  };
  std::vector<std::future<FileResult>> jobs;
  for (const auto &path : paths) {
    jobs.push_back(std::async(std::launch::async, [path] {
      FileResult result;
      auto content = read_file(path);
      if (!content) {
        result.readable = false;
        return result;
      }
      auto parsed = gsn::dsl::parse(*content, path);
      result.diags = parsed.diagnostics;
      auto validation = gsn::validate(parsed.document);
      result.diags.insert(result.diags.end(), validation.begin(), validation.end());
      return result;
    }));
  }

  std::vector<gsn::Diagnostic> all;
  bool io_failure = false;
  for (size_t i = 0; i < jobs.size(); ++i) {
    auto result = jobs[i].get();
    if (!result.readable) {
      std::cerr << "gsn: cannot read '" << paths[i] << "'\n";
      io_failure = true;
      continue;
    }
    all.insert(all.end(), result.diags.begin(), result.diags.end());
  }
  gsn::sort_diagnostics(all);

  if (format == "json") {
    ordered_json root;
    root["diagnostics"] = diagnostics_json(all);
    root["ok"] = !gsn::has_errors(all);
    std::cout << root.dump(2) << '\n';
  } else {
    print_diagnostics(all, std::cout);
  }
  if (io_failure)
    return kExitUsage;
  return gsn::has_errors(all) ? kExitErrors : kExitOk;
}

// ---------------------------------------------------------------------------
// fmt
// ---------------------------------------------------------------------------

int cmd_fmt(const std::vector<std::string> &paths, const std::string &out_path) {
  if (!out_path.empty() && paths.size() != 1) {
    std::cerr << "gsn: --out requires exactly one input file\n";
    return kExitUsage;
  }
  struct FileResult {
    bool readable = true;
    gsn::dsl::FormatResult format;
  };
  std::vector<std::future<FileResult>> jobs;
  for (const auto &path : paths) {
    jobs.push_back(std::async(std::launch::async, [path] {
      FileResult result;
      auto content = read_file(path);
      if (!content) {
        result.readable = false;
        return result;
      }
      result.format = gsn::dsl::format(*content, path);
      return result;
    }));
  }
  bool errors = false;
  bool io_failure = false;
  for (size_t i = 0; i < jobs.size(); ++i) {
    auto result = jobs[i].get();
    if (!result.readable) {
      std::cerr << "gsn: cannot read '" << paths[i] << "'\n";
      io_failure = true;
      continue;
    }
    if (!result.format.ok) {
      print_diagnostics(result.format.diagnostics, std::cerr);
      errors = true;
      continue;
    }
    if (!out_path.empty()) {
      if (!write_file(out_path, result.format.text)) {
        std::cerr << "gsn: cannot write '" << out_path << "'\n";
        return kExitUsage;
      }
    } else {
      std::cout << result.format.text;
    }
  }
  if (io_failure)
    return kExitUsage;
  return errors ? kExitErrors : kExitOk;
}

// ---------------------------------------------------------------------------
// instantiate
// ---------------------------------------------------------------------------

int cmd_instantiate(const std::string &pattern_path, const std::string &bindings_path,
                    const std::string &out_path) {
  auto pattern_text = read_file(pattern_path);
  if (!pattern_text) {
    std::cerr << "gsn: cannot read '" << pattern_path << "'\n";
    return kExitUsage;
  }
  auto parsed = gsn::dsl::parse(*pattern_text, pattern_path);
  auto validation = gsn::validate(parsed.document);
  std::vector<gsn::Diagnostic> diags = parsed.diagnostics;
  diags.insert(diags.end(), validation.begin(), validation.end());
  if (gsn::has_errors(diags)) {
    print_diagnostics(diags, std::cerr);
    return kExitErrors;
  }
  if (parsed.document.modules.size() != 1) {
    std::cerr << "gsn: '" << pattern_path << "' must declare exactly one module\n";
    return kExitErrors;
  }

  gsn::BindingSet bindings;
  if (!bindings_path.empty()) {
    auto bindings_text = read_file(bindings_path);
    if (!bindings_text) {
      std::cerr << "gsn: cannot read '" << bindings_path << "'\n";
      return kExitUsage;
    }
    try {
      bindings = gsn::parse_bindings(*bindings_text, bindings_path);
    } catch (const gsn::Error &e) {
      std::cerr << "gsn: " << e.what() << '\n';
      return kExitErrors;
    }
  }

  gsn::InstantiationResult result;
  try {
    result = gsn::instantiate(parsed.document.modules.front().graph, bindings);
  } catch (const gsn::Error &e) {
    std::cerr << "gsn: " << e.what() << '\n';
    return kExitErrors;
  }

  std::string text = gsn::dsl::serialize(result.graph);
  if (!out_path.empty()) {
    if (!write_file(out_path, text)) {
      std::cerr << "gsn: cannot write '" << out_path << "'\n";
      return kExitUsage;
    }
  } else {
    std::cout << text;
  }
  // The completeness summary goes to stderr so stdout stays a clean instance.
  std::cerr << "remaining_placeholders " << result.report.remaining_placeholders.size() << '\n';
  std::cerr << "remaining_undeveloped " << result.report.remaining_undeveloped.size() << '\n';
  std::cerr << "fully_instantiated "
            << (result.report.fully_instantiated ? "true" : "false") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compose / arch-check
// ---------------------------------------------------------------------------

std::optional<gsn::CaseArchive> load_archive_from_manifest(const std::string &manifest_path,
                                                           std::vector<gsn::Diagnostic> &diags) {
  auto text = read_file(manifest_path);
  if (!text)
    return std::nullopt;
  fs::path base = fs::path(manifest_path).parent_path();
  return gsn::load_manifest(
      *text, manifest_path,
      [&](const std::string &rel) { return read_file((base / rel).string()); }, diags);
}

int cmd_compose(const std::string &manifest_path, const std::string &out_path) {
  std::vector<gsn::Diagnostic> diags;
  auto archive = load_archive_from_manifest(manifest_path, diags);
  if (!archive) {
    std::cerr << "gsn: cannot read '" << manifest_path << "'\n";
    return kExitUsage;
  }
  if (gsn::has_errors(diags)) {
    print_diagnostics(diags, std::cerr);
    return kExitErrors;
  }
  auto result = gsn::compose(*archive);
  print_diagnostics(result.diagnostics, std::cerr);
  if (!result.ok())
    return kExitErrors;
  std::string text = gsn::dsl::serialize(result.graph);
  if (!out_path.empty()) {
    if (!write_file(out_path, text)) {
      std::cerr << "gsn: cannot write '" << out_path << "'\n";
      return kExitUsage;
    }
  } else {
    std::cout << text;
  }
  return kExitOk;
}

int cmd_arch_check(const std::string &manifest_path) {
  std::vector<gsn::Diagnostic> diags;
  auto archive = load_archive_from_manifest(manifest_path, diags);
  if (!archive) {
    std::cerr << "gsn: cannot read '" << manifest_path << "'\n";
    return kExitUsage;
  }
  if (gsn::has_errors(diags)) {
    print_diagnostics(diags, std::cerr);
    return kExitErrors;
  }
  auto compose_result = gsn::compose(*archive);
  if (!compose_result.ok()) {
    print_diagnostics(compose_result.diagnostics, std::cerr);
    return kExitErrors;
  }
  auto report = gsn::check_architecture(*archive);
  print_diagnostics(report.findings, std::cout);
  std::cout << "shape_ok " << (report.shape_ok ? "true" : "false") << '\n';
  return report.shape_ok ? kExitOk : kExitErrors;
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

bool ends_with(const std::string &text, std::string_view suffix) {
  return text.size() >= suffix.size() &&
         text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void print_layer(std::ostream &out, const std::string &name, const gsn::LayerCoverage &layer) {
  out << name << ' ' << layer.covered << '/' << layer.total;
  if (!layer.uncovered.empty()) {
    out << " uncovered:";
    for (const auto &id : layer.uncovered)
      out << ' ' << id;
  }
  out << '\n';
}

ordered_json layer_json(const gsn::LayerCoverage &layer) {
  ordered_json j;
  j["total"] = layer.total;
  j["covered"] = layer.covered;
  j["uncovered"] = layer.uncovered;
  return j;
}

int cmd_trace(const std::string &path, const std::string &impact_id, bool strict,
              const std::string &format) {
  std::vector<gsn::Diagnostic> diags;
  gsn::TraceModel model;
  std::optional<gsn::CaseArchive> archive;

  if (ends_with(path, ".trc")) {
    auto text = read_file(path);
    if (!text) {
      std::cerr << "gsn: cannot read '" << path << "'\n";
      return kExitUsage;
    }
    model = gsn::parse_trace(*text, path, diags);
  } else {
    archive = load_archive_from_manifest(path, diags);
    if (!archive) {
      std::cerr << "gsn: cannot read '" << path << "'\n";
      return kExitUsage;
    }
    if (archive->trace_path.empty()) {
      std::cerr << "gsn: manifest '" << path << "' declares no trace file\n";
      return kExitUsage;
    }
    fs::path base = fs::path(path).parent_path();
    auto text = read_file((base / archive->trace_path).string());
    if (!text) {
      std::cerr << "gsn: cannot read '" << archive->trace_path << "'\n";
      return kExitUsage;
    }
    model = gsn::parse_trace(*text, archive->trace_path, diags);
    auto binding_diags = gsn::check_bindings(model, *archive);
    diags.insert(diags.end(), binding_diags.begin(), binding_diags.end());
  }
  if (gsn::has_errors(diags)) {
    print_diagnostics(diags, std::cerr);
    return kExitErrors;
  }

  if (!impact_id.empty()) {
    gsn::ImpactResult result;
    try {
      result = gsn::impact(model, archive ? &*archive : nullptr, impact_id);
    } catch (const gsn::Error &e) {
      std::cerr << "gsn: " << e.what() << '\n';
      return kExitErrors;
    }
    if (format == "json") {
      ordered_json root;
      root["invalidated"] = impact_id;
      root["affected_requirements"] = result.affected_requirements;
      root["affected_hazards"] = result.affected_hazards;
      root["challenged_claims"] = result.challenged_claims;
      std::cout << root.dump(2) << '\n';
    } else {
      auto print_list = [](const std::string &name, const std::vector<std::string> &items) {
        std::cout << name;
        if (items.empty()) {
          std::cout << " (none)";
        } else {
          for (const auto &id : items)
            std::cout << ' ' << id;
        }
        std::cout << '\n';
      };
      print_list("affected_requirements", result.affected_requirements);
      print_list("affected_hazards", result.affected_hazards);
      print_list("challenged_claims", result.challenged_claims);
    }
    return kExitOk;
  }

  auto report = gsn::coverage(model, strict);
  std::vector<gsn::StrictFinding> strict_findings;
  if (strict)
    strict_findings = gsn::strict_check(model);

  if (format == "json") {
    ordered_json root;
    root["hazards"] = layer_json(report.hazards);
    root["requirements"] = layer_json(report.requirements);
    root["ml_requirements"] = layer_json(report.ml_requirements);
    root["evidence_layer"] = layer_json(report.evidence_layer);
    root["fully_covered"] = report.fully_covered;
    if (strict) {
      ordered_json checks = ordered_json::array();
      for (const auto &f : strict_findings) {
        ordered_json j;
        j["evidence"] = f.evidence_id;
        j["ml_requirement"] = f.ml_requirement_id;
        j["accepted"] = f.accepted;
        j["detail"] = f.detail;
        checks.push_back(std::move(j));
      }
      root["strict_checks"] = std::move(checks);
    }
    std::cout << root.dump(2) << '\n';
  } else {
    print_layer(std::cout, "hazards", report.hazards);
    print_layer(std::cout, "requirements", report.requirements);
    print_layer(std::cout, "ml_requirements", report.ml_requirements);
    print_layer(std::cout, "evidence_layer", report.evidence_layer);
    std::cout << "fully_covered " << (report.fully_covered ? "true" : "false") << '\n';
    for (const auto &f : strict_findings)
      std::cout << "strict " << f.evidence_id << " on " << f.ml_requirement_id << ": "
                << (f.accepted ? "accepted" : "rejected") << " (" << f.detail << ")\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// export / catalog
// ---------------------------------------------------------------------------

int cmd_export(const std::string &path, const std::string &format, const std::string &out_path) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "gsn: cannot read '" << path << "'\n";
    return kExitUsage;
  }
  auto parsed = gsn::dsl::parse(*text, path);
  auto validation = gsn::validate(parsed.document);
  std::vector<gsn::Diagnostic> diags = parsed.diagnostics;
  diags.insert(diags.end(), validation.begin(), validation.end());
  if (gsn::has_errors(diags)) {
    print_diagnostics(diags, std::cerr);
    return kExitErrors;
  }
  std::string rendered =
      format == "dot" ? gsn::to_dot(parsed.document) : gsn::to_json(parsed.document);
  if (!out_path.empty()) {
    if (!write_file(out_path, rendered)) {
      std::cerr << "gsn: cannot write '" << out_path << "'\n";
      return kExitUsage;
    }
  } else {
    std::cout << rendered;
  }
  return kExitOk;
}

int cmd_catalog() {
  for (const auto &entry : gsn::library::catalog()) {
    const char *kind = entry.kind == gsn::library::EntryKind::Pattern   ? "pattern"
                       : entry.kind == gsn::library::EntryKind::Archive ? "archive"
                                                                        : "trace";
    std::cout << entry.name << '\t' << kind << '\t' << entry.path << '\t' << entry.provenance
              << '\n';
  }
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"GSN safety-case tool: model, validate, instantiate, compose and trace "
               "assurance arguments"};
  app.require_subcommand(1);

  std::vector<std::string> check_paths;
  std::string check_format = "text";
  auto *check = app.add_subcommand("check", "Parse and validate .gsn files");
  check->add_option("paths", check_paths, "input files")->required();
  check->add_option("--format", check_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  std::vector<std::string> fmt_paths;
  std::string fmt_out;
  auto *fmt = app.add_subcommand("fmt", "Canonically format .gsn files");
  fmt->add_option("paths", fmt_paths, "input files")->required();
  fmt->add_option("--out", fmt_out, "output file (single input only)");

  std::string inst_pattern, inst_bindings, inst_out;
  auto *inst = app.add_subcommand("instantiate", "Bind a pattern into a concrete argument");
  inst->add_option("pattern", inst_pattern, "pattern file")->required();
  inst->add_option("--bindings", inst_bindings, "bindings file");
  inst->add_option("--out", inst_out, "output instance file");

  std::string compose_manifest, compose_out;
  auto *comp = app.add_subcommand("compose", "Merge a case archive into one graph");
  comp->add_option("manifest", compose_manifest, "case manifest")->required();
  comp->add_option("--out", compose_out, "output file");

  std::string arch_manifest;
  auto *arch = app.add_subcommand("arch-check", "Check the case architecture shape");
  arch->add_option("manifest", arch_manifest, "case manifest")->required();

  std::string trace_path, trace_impact, trace_format = "text";
  bool trace_strict = false;
  auto *trace = app.add_subcommand("trace", "Coverage and impact analysis");
  trace->add_option("path", trace_path, ".trc file or case manifest")->required();
  trace->add_option("--impact", trace_impact, "invalidate this evidence id");
  trace->add_flag("--strict", trace_strict, "compare measured values against metrics");
  trace->add_option("--format", trace_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string export_path, export_format, export_out;
  auto *exp = app.add_subcommand("export", "Render a .gsn file as DOT or JSON");
  exp->add_option("path", export_path, "input file")->required();
  exp->add_option("--format", export_format, "dot|json")
      ->required()
      ->check(CLI::IsMember({"dot", "json"}));
  exp->add_option("--out", export_out, "output file");

  app.add_subcommand("catalog", "List the shipped pattern library");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (check->parsed())
      return cmd_check(check_paths, check_format);
    if (fmt->parsed())
      return cmd_fmt(fmt_paths, fmt_out);
    if (inst->parsed())
      return cmd_instantiate(inst_pattern, inst_bindings, inst_out);
    if (comp->parsed())
      return cmd_compose(compose_manifest, compose_out);
    if (arch->parsed())
      return cmd_arch_check(arch_manifest);
    if (trace->parsed())
      return cmd_trace(trace_path, trace_impact, trace_strict, trace_format);
    if (exp->parsed())
      return cmd_export(export_path, export_format, export_out);
    return cmd_catalog();
  } catch (const std::exception &e) {
    std::cerr << "gsn: " << e.what() << '\n';
    return kExitUsage;
  }
}
