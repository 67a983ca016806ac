#pragma once

#include <string>
#include <vector>

#include "crmpst/diagnostics.hpp"

namespace crmpst {

struct Token {
  enum class Kind {
    Ident,
    Int,
    String,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Dot,
    Arrow,   // ->
    Assign,  // =
    EqEq,    // ==
    Less,
    Plus,
    Minus,
    Eof,
  };

  Kind kind = Kind::Eof;
  std::string text;
  Span span;
};

/// Tokenizes source with `//` line comments; lexical errors are reported as
/// diagnostics and skipped.
std::vector<Token> lex(const std::string& source, std::vector<Diagnostic>& diagnostics);

}  // namespace crmpst
