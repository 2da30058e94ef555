#include "gsn/library.hpp"

#include "gsn/dsl.hpp"
#include "gsn/validator.hpp"

#include <algorithm>

namespace gsn::library {

namespace detail {
struct EmbeddedFile {
  const char *path;
  const char *content;
};
extern const EmbeddedFile kFiles[];
extern const std::size_t kFileCount;
} // namespace detail

std::optional<std::string> embedded_file(const std::string &path) {
  for (std::size_t i = 0; i < detail::kFileCount; ++i)
    if (path == detail::kFiles[i].path)
      return std::string(detail::kFiles[i].content);
  return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> embedded_files() {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < detail::kFileCount; ++i)
    out.emplace_back(detail::kFiles[i].path, detail::kFiles[i].content);
  return out;
}

const std::vector<LibraryEntry> &catalog() {
  static const std::vector<LibraryEntry> entries = [] {
    std::vector<LibraryEntry> out;

    LibraryEntry big_top;
    big_top.name = "big_top";
    big_top.path = "patterns/big_top.gsn";
    big_top.provenance = "top-level composition of the whole-system AI safety argument";
    big_top.required_ids = {"BG0", "BS1", "BG1", "MPSM", "MGPAI"};
    big_top.min_kind_counts = {{"goal", 2}, {"strategy", 1}, {"moduleref", 2}};
    big_top.required_edges = {{"BS1", "BG1", EdgeKind::SupportedBy},
                              {"BG1", "MPSM", EdgeKind::SupportedBy},
                              {"BG1", "MGPAI", EdgeKind::SupportedBy}};
    out.push_back(std::move(big_top));

    LibraryEntry ethics;
    ethics.name = "ethics";
    ethics.path = "patterns/ethics.gsn";
    ethics.provenance = "PRAISE ethics assurance argument";
    ethics.required_ids = {"EG1", "ES1", "MJustice", "MTransparency"};
    ethics.min_kind_counts = {{"goal", 1}, {"strategy", 1}, {"moduleref", 2}};
    ethics.required_edges = {{"ES1", "MJustice", EdgeKind::SupportedBy}};
    out.push_back(std::move(ethics));

    LibraryEntry justice;
    justice.name = "justice";
    justice.path = "patterns/justice.gsn";
    justice.provenance = "PRAISE justice argument: distributive justice over benefits, risks "
                         "and autonomy constraints";
    justice.required_ids = {"JG1", "JA1", "JA2", "JG3", "JG4", "JG5"};
    justice.min_kind_counts = {{"goal", 4}, {"strategy", 2}, {"moduleref", 3}};
    justice.required_edges = {{"JG1", "JA1", EdgeKind::SupportedBy},
                              {"JG1", "JA2", EdgeKind::SupportedBy},
                              {"JA2", "JG5", EdgeKind::SupportedBy},
                              {"JA2", "JG3", EdgeKind::SupportedBy},
                              {"JA2", "JG4", EdgeKind::SupportedBy}};
    out.push_back(std::move(justice));

    LibraryEntry system;
    system.name = "system";
    system.path = "patterns/system.gsn";
    system.provenance = "SACE whole-system safety argument";
    system.required_ids = {"G0", "G1", "G3", "G7", "G9", "S1", "S3",
                           "J1", "C1", "C2", "C3", "C4", "G10"};
    system.min_kind_counts = {{"goal", 6}, {"strategy", 2}, {"context", 4},
                              {"justification", 1}};
    system.required_edges = {{"G3", "C2", EdgeKind::InContextOf},
                             {"G3", "J1", EdgeKind::InContextOf},
                             {"G9", "C4", EdgeKind::InContextOf},
                             {"S3", "G10", EdgeKind::SupportedBy}};
    system.min_acps = 2;
    out.push_back(std::move(system));

    LibraryEntry amlas;
    amlas.name = "amlas_scoping";
    amlas.path = "patterns/amlas_scoping.gsn";
    amlas.provenance = "AMLAS scoping argument over the six ML lifecycle stages";
    amlas.required_ids = {"G3.1", "G3.2", "ST1", "ST2", "ST3", "ST4", "ST5", "ST6"};
    amlas.min_kind_counts = {{"goal", 8}, {"strategy", 1}, {"context", 2}};
    amlas.required_edges = {{"ST3", "G3.2", EdgeKind::SupportedBy}};
    out.push_back(std::move(amlas));

    LibraryEntry gpai;
    gpai.name = "gpai";
    gpai.path = "patterns/gpai.gsn";
    gpai.provenance = "capability-based safety argument for general-purpose AI models";
    gpai.required_ids = {"GPG1", "GPC3", "GPC5"};
    gpai.min_kind_counts = {{"goal", 4}, {"context", 2}, {"strategy", 1}};
    gpai.required_edges = {{"GPG1", "GPC3", EdgeKind::InContextOf}};
    out.push_back(std::move(gpai));

    LibraryEntry wildfire;
    wildfire.name = "wildfire_case";
    wildfire.path = "samples/wildfire/case.manifest";
    wildfire.kind = EntryKind::Archive;
    wildfire.provenance = "satellite wildfire alert system sample case";
    out.push_back(std::move(wildfire));

    LibraryEntry sepsis;
    sepsis.name = "sepsis_trace";
    sepsis.path = "samples/sepsis/sepsis.trc";
    sepsis.kind = EntryKind::Trace;
    sepsis.provenance = "sepsis treatment policy comparison sample trace";
    out.push_back(std::move(sepsis));

    return out;
  }();
  return entries;
}

const LibraryEntry *find_entry(const std::string &name) {
  for (const auto &entry : catalog())
    if (entry.name == name)
      return &entry;
  return nullptr;
}

namespace {

std::string directory_of(const std::string &path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string() : path.substr(0, pos + 1);
}

const LibraryEntry &require_entry(const std::string &name, EntryKind kind) {
  const LibraryEntry *entry = find_entry(name);
  if (!entry)
    throw Error("unknown library entry '" + name + "'");
  if (entry->kind != kind)
    throw Error("library entry '" + name + "' is not of the requested kind");
  return *entry;
}

} // namespace

ArgumentGraph load_pattern(const std::string &name) {
  const auto &entry = require_entry(name, EntryKind::Pattern);
  auto content = embedded_file(entry.path);
  if (!content)
    throw Error("library file '" + entry.path + "' is not embedded");
  auto parsed = dsl::parse(*content, entry.path);
  if (!parsed.ok() || parsed.document.modules.size() != 1)
    throw Error("library file '" + entry.path + "' is corrupted: parse failed");
  const auto &graph = parsed.document.modules.front().graph;
  if (has_errors(validate(graph)))
    throw Error("library file '" + entry.path + "' is corrupted: validation failed");
  return graph;
}

CaseArchive load_archive(const std::string &name) {
  const auto &entry = require_entry(name, EntryKind::Archive);
  auto manifest = embedded_file(entry.path);
  if (!manifest)
    throw Error("library file '" + entry.path + "' is not embedded");
  std::string base = directory_of(entry.path);
  std::vector<Diagnostic> diags;
  auto archive = load_manifest(
      *manifest, entry.path,
      [&](const std::string &rel) { return embedded_file(base + rel); }, diags);
  if (has_errors(diags))
    throw Error("library archive '" + name + "' is corrupted: " + render(diags.front()));
  return archive;
}

TraceModel load_trace(const std::string &name) {
  const auto &entry = require_entry(name, EntryKind::Trace);
  auto content = embedded_file(entry.path);
  if (!content)
    throw Error("library file '" + entry.path + "' is not embedded");
  std::vector<Diagnostic> diags;
  auto model = parse_trace(*content, entry.path, diags);
  if (has_errors(diags))
    throw Error("library trace '" + name + "' is corrupted: " + render(diags.front()));
  return model;
}

} // namespace gsn::library
