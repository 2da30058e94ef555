#pragma once

#include <string>
#include <string_view>

namespace gsn::detail {

// Walks statement text, calling on_role(view) for each {...} span and
// on_literal(view) for every other chunk. `\{` and `\}` pass through as
// literals. Returns an error message on unbalanced/nested braces, empty
// string otherwise.
template <typename RoleFn, typename CharFn>
std::string scan_placeholders(std::string_view text, RoleFn on_role, CharFn on_literal) {
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\\' && i + 1 < text.size() && (text[i + 1] == '{' || text[i + 1] == '}')) {
      on_literal(text.substr(i, 2));
      i += 2;
      continue;
    }
    if (c == '}')
      return "unbalanced '}' at offset " + std::to_string(i);
    if (c == '{') {
      size_t j = i + 1;
      while (j < text.size()) {
        if (text[j] == '\\' && j + 1 < text.size() && (text[j + 1] == '{' || text[j + 1] == '}')) {
          j += 2;
          continue;
        }
        if (text[j] == '{')
          return "nested '{' at offset " + std::to_string(j);
        if (text[j] == '}')
          break;
        ++j;
      }
      if (j >= text.size())
        return "unterminated '{' at offset " + std::to_string(i);
      on_role(text.substr(i + 1, j - i - 1));
      i = j + 1;
      continue;
    }
    on_literal(text.substr(i, 1));
    ++i;
  }
  return "";
}

} // namespace gsn::detail
