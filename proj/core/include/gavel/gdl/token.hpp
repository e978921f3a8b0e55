#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gavel::gdl {

/// Half-open byte range [begin, end) into a source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool contains(const Span& other) const noexcept {
    return begin <= other.begin && other.end <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class TokenKind { LParen, RParen, LBrace, RBrace, Ident, String, Int, Real, KeyArg };

std::string_view to_string(TokenKind kind) noexcept;

/// A lexeme with its exact source slice. String tokens keep their quotes and
/// KeyArg tokens keep the trailing ':' so that source.substr(span) == text.
struct Token {
  TokenKind kind;
  std::string text;
  Span span;
};

/// Splits source into tokens. Whitespace and `//` line comments are skipped.
/// Throws Error{IllegalCharacter} at the offending byte offset.
std::vector<Token> tokenize(std::string_view source);

}  // namespace gavel::gdl
