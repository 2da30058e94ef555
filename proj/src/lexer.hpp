#pragma once

#include "gsn/diagnostics.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace gsn::detail {

enum class Tok {
  Ident,
  String,
  Number,
  Arrow,      // ->
  ColonColon, // ::
  Colon,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  DotDot,
  Star,
  Eq,
  Ge, // >=
  Le, // <=
  Percent,
  Comment,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text; // identifier spelling, unescaped string, number text, comment body
  int line = 0, col = 0, end_line = 0, end_col = 0;

  SourceSpan span(const std::string &file) const { return {file, line, col, end_line, end_col}; }
};

inline std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n')
        continue;
      out.push_back('\n');
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

// Shared tokenizer for the .gsn grammar and the line-oriented side formats
// (bindings, manifests, traces).
class Lexer {
public:
  Lexer(std::string text, std::string file) : text_(std::move(text)), file_(std::move(file)) {}

  std::vector<Token> run(std::vector<Diagnostic> &diags) {
    std::vector<Token> out;
    while (true) {
      skip_blank();
      Token t = next(diags);
      bool end = t.kind == Tok::End;
      out.push_back(std::move(t));
      if (end)
        break;
    }
    return out;
  }

private:
  std::string text_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  bool eof() const { return pos_ >= text_.size(); }

  void advance() {
    if (eof())
      return;
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n'))
      advance();
  }

  Token make(Tok kind, std::string text, int line, int col) {
    return Token{kind, std::move(text), line, col, line_, col_ > 1 ? col_ - 1 : 1};
  }

  Token next(std::vector<Diagnostic> &diags) {
    if (eof())
      return Token{Tok::End, "", line_, col_, line_, col_};
    int line = line_, col = col_;
    char c = peek();
    if (c == '#') {
      advance();
      std::string body;
      while (!eof() && peek() != '\n') {
        body.push_back(peek());
        advance();
      }
      return make(Tok::Comment, body, line, col);
    }
    if (c == '"')
      return lex_string(diags, line, col);
    if (std::isdigit(static_cast<unsigned char>(c)))
      return lex_number(line, col);
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id;
      while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                        peek() == '.' || peek() == '-')) {
        id.push_back(peek());
        advance();
      }
      return make(Tok::Ident, id, line, col);
    }
    auto two = [&](char a, char b) { return peek() == a && peek(1) == b; };
    if (two('-', '>')) {
      advance();
      advance();
      return make(Tok::Arrow, "->", line, col);
    }
    if (two(':', ':')) {
      advance();
      advance();
      return make(Tok::ColonColon, "::", line, col);
    }
    if (two('.', '.')) {
      advance();
      advance();
      return make(Tok::DotDot, "..", line, col);
    }
    if (two('>', '=')) {
      advance();
      advance();
      return make(Tok::Ge, ">=", line, col);
    }
    if (two('<', '=')) {
      advance();
      advance();
      return make(Tok::Le, "<=", line, col);
    }
    switch (c) {
    case ':':
      advance();
      return make(Tok::Colon, ":", line, col);
    case '{':
      advance();
      return make(Tok::LBrace, "{", line, col);
    case '}':
      advance();
      return make(Tok::RBrace, "}", line, col);
    case '(':
      advance();
      return make(Tok::LParen, "(", line, col);
    case ')':
      advance();
      return make(Tok::RParen, ")", line, col);
    case '[':
      advance();
      return make(Tok::LBracket, "[", line, col);
    case ']':
      advance();
      return make(Tok::RBracket, "]", line, col);
    case ',':
      advance();
      return make(Tok::Comma, ",", line, col);
    case '*':
      advance();
      return make(Tok::Star, "*", line, col);
    case '=':
      advance();
      return make(Tok::Eq, "=", line, col);
    case '%':
      advance();
      return make(Tok::Percent, "%", line, col);
    default:
      break;
    }
    advance();
    diags.push_back({Severity::Error, "P001",
                     std::string("unexpected character '") + c + "'",
                     {file_, line, col, line, col}});
    skip_blank();
    return next(diags);
  }

  Token lex_number(int line, int col) {
    std::string num;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
      num.push_back(peek());
      advance();
    }
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      num.push_back('.');
      advance();
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
        num.push_back(peek());
        advance();
      }
    }
    return make(Tok::Number, num, line, col);
  }

  Token lex_string(std::vector<Diagnostic> &diags, int line, int col) {
    advance(); // opening quote
    std::string value;
    while (true) {
      if (eof() || peek() == '\n') {
        diags.push_back({Severity::Error, "P001", "unterminated string literal",
                         {file_, line, col, line_, col_}});
        break;
      }
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        char esc = peek(1);
        if (esc == '"') {
          value.push_back('"');
          advance();
          advance();
          continue;
        }
        if (esc == '\\') {
          value.push_back('\\');
          advance();
          advance();
          continue;
        }
        if (esc == '{' || esc == '}') {
          // Escaped braces stay escaped in the stored statement so that
          // placeholder scanning can tell them apart from role delimiters.
          value.push_back('\\');
          value.push_back(esc);
          advance();
          advance();
          continue;
        }
        diags.push_back({Severity::Error, "P001",
                         std::string("invalid escape '\\") + esc + "' in string",
                         {file_, line_, col_, line_, col_ + 1}});
        advance();
        continue;
      }
      value.push_back(c);
      advance();
    }
    return make(Tok::String, value, line, col);
  }
};

} // namespace gsn::detail
