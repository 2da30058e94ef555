#pragma once

#include "gsn/core.hpp"
#include "gsn/diagnostics.hpp"

#include <map>
#include <string>
#include <vector>

namespace gsn::dsl {

/// Comments attached to one declaration: full lines above it plus an
/// optional same-line remainder. Text is stored exactly as written after
/// the `#`, so round-tripping preserves author spacing.
struct Comments {
  std::vector<std::string> leading;
  std::string trailing;

  bool empty() const { return leading.empty() && trailing.empty(); }
  friend bool operator==(const Comments &, const Comments &) = default;
};

enum class Section { Node, Edge, Choice, Acp, Public };

/// Comment trivia for one module, keyed by (section, index into the
/// corresponding ArgumentGraph vector). Kept outside the core types so that
/// structural operations never see formatting concerns.
struct ModuleTrivia {
  Comments header;
  std::map<std::pair<Section, int>, Comments> items;
  std::vector<std::string> footer; // comment lines before the closing brace
};

struct Document {
  struct Entry {
    ArgumentGraph graph;
    ModuleTrivia trivia;
  };
  std::vector<Entry> modules;
  std::vector<std::string> trailing_comments; // after the last module

  const ArgumentGraph *find_module(std::string_view name) const;
};

/// Structural equality: graphs only, ignoring comments and spans.
bool structurally_equal(const Document &a, const Document &b);

struct ParseResult {
  Document document;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

/// Total parser: always returns a Document, reporting problems as
/// diagnostics (codes P001..P011) and resuming at the next declaration.
/// Input is treated as UTF-8 and newline-normalized to LF before lexing.
ParseResult parse(std::string_view text, const std::string &file);

/// Canonical form: per module, nodes then edges then choice groups then
/// ACPs then one public line, each in declaration order, two-space indent,
/// LF line endings, blank line between non-empty sections. Throws Error if
/// an edge endpoint is neither a local node nor a qualified reference.
std::string serialize(const Document &doc);
std::string serialize(const ArgumentGraph &graph);

struct FormatResult {
  bool ok = false;
  std::string text; // canonical form, or the input unchanged on error
  std::vector<Diagnostic> diagnostics;
};

/// serialize(parse(text)) when text parses cleanly; idempotent.
FormatResult format(std::string_view text, const std::string &file);

} // namespace gsn::dsl
