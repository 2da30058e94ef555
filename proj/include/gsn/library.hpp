#pragma once

#include "gsn/composer.hpp"
#include "gsn/core.hpp"
#include "gsn/trace.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gsn::library {

enum class EntryKind { Pattern, Archive, Trace };

/// Catalog row for one shipped encoding, with the structural expectations
/// the build pins for it.
struct LibraryEntry {
  std::string name;
  std::string path; // repo-relative
  EntryKind kind = EntryKind::Pattern;
  std::string provenance;
  std::vector<std::string> required_ids;
  std::map<std::string, int> min_kind_counts; // node kind name -> minimum count
  std::vector<EdgeRef> required_edges;
  int min_acps = 0;
};

/// Stable order: big_top, ethics, justice, system, amlas_scoping, gpai,
/// wildfire_case, sepsis_trace.
const std::vector<LibraryEntry> &catalog();

const LibraryEntry *find_entry(const std::string &name);

/// Parses and validates the named pattern from the embedded corpus.
/// Throws Error on unknown names or when the file fails validation.
ArgumentGraph load_pattern(const std::string &name);

CaseArchive load_archive(const std::string &name);

TraceModel load_trace(const std::string &name);

/// Raw bytes of an embedded file by repo-relative path.
std::optional<std::string> embedded_file(const std::string &path);

/// All embedded (path, content) pairs, in embedding order.
std::vector<std::pair<std::string, std::string>> embedded_files();

} // namespace gsn::library
