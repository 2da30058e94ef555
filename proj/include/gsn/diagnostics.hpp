#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gsn {

/// Library-level failure (unknown ids, rejected bindings, unreadable input).
/// Structural findings are reported as Diagnostic values instead.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// 1-based source range. A default-constructed span (file empty, all zeros)
/// means "no source location", e.g. for programmatically built graphs.
struct SourceSpan {
  std::string file;
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  bool valid() const { return start_line > 0; }

  friend bool operator==(const SourceSpan &, const SourceSpan &) = default;
};

enum class Severity { Error, Warning, Info };

std::string to_string(Severity s);

/// One finding. `code` identifies the rule family:
///   P0xx parser, V001..V012 structural validation, W0xx cross-module
///   warnings, C0xx composition, A1..A5 architecture, B0xx bindings,
///   T0xx traceability.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;

  friend bool operator==(const Diagnostic &, const Diagnostic &) = default;
};

/// Renders `FILE:LINE:COL: SEVERITY[CODE] message`; spanless diagnostics
/// drop the location prefix.
std::string render(const Diagnostic &d);

/// Stable ordering: file, span start, code, message.
bool diagnostic_less(const Diagnostic &a, const Diagnostic &b);

void sort_diagnostics(std::vector<Diagnostic> &diags);

bool has_errors(const std::vector<Diagnostic> &diags);

} // namespace gsn
