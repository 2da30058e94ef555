#include "gsn/diagnostics.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace gsn {

std::string to_string(Severity s) {
  switch (s) {
  case Severity::Error:
    return "error";
  case Severity::Warning:
    return "warning";
  case Severity::Info:
    return "info";
  }
  return "error";
}

std::string render(const Diagnostic &d) {
  std::ostringstream out;
  if (d.span.valid()) {
    out << d.span.file << ':' << d.span.start_line << ':' << d.span.start_col << ": ";
  }
  out << to_string(d.severity) << '[' << d.code << "] " << d.message;
  return out.str();
}

bool diagnostic_less(const Diagnostic &a, const Diagnostic &b) {
  auto key = [](const Diagnostic &d) {
    return std::tie(d.span.file, d.span.start_line, d.span.start_col, d.code, d.message);
  };
  return key(a) < key(b);
}

void sort_diagnostics(std::vector<Diagnostic> &diags) {
  std::stable_sort(diags.begin(), diags.end(), diagnostic_less);
}

bool has_errors(const std::vector<Diagnostic> &diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic &d) { return d.severity == Severity::Error; });
}

} // namespace gsn
