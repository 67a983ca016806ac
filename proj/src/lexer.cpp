#include "lexer.hpp"

#include <cctype>

namespace crmpst {

std::vector<Token> lex(const std::string& source, std::vector<Diagnostic>& diagnostics) {
  std::vector<Token> out;
  int line = 1, column = 1;
  std::size_t i = 0;
  const std::size_t n = source.size();

  auto span1 = [&](int length) { return Span{line, column, length}; };
  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count && i < n; ++k, ++i) {
      if (source[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };

  while (i < n) {
    char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      while (i < n && source[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      Span sp = span1(0);
      std::string text;
      while (i < n && (std::isalnum(static_cast<unsigned char>(source[i])) || source[i] == '_')) {
        text += source[i];
        advance(1);
      }
      sp.length = static_cast<int>(text.size());
      out.push_back({Token::Kind::Ident, std::move(text), sp});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Span sp = span1(0);
      std::string text;
      while (i < n && std::isdigit(static_cast<unsigned char>(source[i]))) {
        text += source[i];
        advance(1);
      }
      sp.length = static_cast<int>(text.size());
      out.push_back({Token::Kind::Int, std::move(text), sp});
      continue;
    }
    if (c == '"') {
      Span sp = span1(1);
      advance(1);
      std::string text;
      bool closed = false;
      while (i < n) {
        if (source[i] == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (source[i] == '\n') break;
        text += source[i];
        advance(1);
      }
      if (!closed)
        diagnostics.push_back(
            {Diagnostic::Severity::Error, "UnterminatedString", "unterminated string literal", sp});
      sp.length = static_cast<int>(text.size()) + 2;
      out.push_back({Token::Kind::String, std::move(text), sp});
      continue;
    }

    auto push = [&](Token::Kind kind, int length, const char* text) {
      out.push_back({kind, text, span1(length)});
      advance(static_cast<std::size_t>(length));
    };
    switch (c) {
      case '(': push(Token::Kind::LParen, 1, "("); continue;
      case ')': push(Token::Kind::RParen, 1, ")"); continue;
      case '{': push(Token::Kind::LBrace, 1, "{"); continue;
      case '}': push(Token::Kind::RBrace, 1, "}"); continue;
      case '[': push(Token::Kind::LBracket, 1, "["); continue;
      case ']': push(Token::Kind::RBracket, 1, "]"); continue;
      case ',': push(Token::Kind::Comma, 1, ","); continue;
      case ';': push(Token::Kind::Semi, 1, ";"); continue;
      case '.': push(Token::Kind::Dot, 1, "."); continue;
      case '<': push(Token::Kind::Less, 1, "<"); continue;
      case '+': push(Token::Kind::Plus, 1, "+"); continue;
      case '-':
        if (i + 1 < n && source[i + 1] == '>') {
          push(Token::Kind::Arrow, 2, "->");
        } else {
          push(Token::Kind::Minus, 1, "-");
        }
        continue;
      case '=':
        if (i + 1 < n && source[i + 1] == '=') {
          push(Token::Kind::EqEq, 2, "==");
        } else {
          push(Token::Kind::Assign, 1, "=");
        }
        continue;
      default:
        diagnostics.push_back({Diagnostic::Severity::Error, "UnexpectedCharacter",
                               std::string("unexpected character '") + c + "'", span1(1)});
        advance(1);
        continue;
    }
  }
  out.push_back({Token::Kind::Eof, "", span1(0)});
  return out;
}

}  // namespace crmpst
