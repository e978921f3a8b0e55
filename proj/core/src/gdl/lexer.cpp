#include "gavel/common/error.hpp"
#include "gavel/gdl/token.hpp"

namespace gavel::gdl {

std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::LParen: return "LPAREN";
    case TokenKind::RParen: return "RPAREN";
    case TokenKind::LBrace: return "LBRACE";
    case TokenKind::RBrace: return "RBRACE";
    case TokenKind::Ident: return "IDENT";
    case TokenKind::String: return "STRING";
    case TokenKind::Int: return "INT";
    case TokenKind::Real: return "REAL";
    case TokenKind::KeyArg: return "KEYARG";
  }
  return "?";
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  const std::size_t n = source.size();
  std::size_t i = 0;

  auto emit = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    tokens.push_back(Token{kind, std::string(source.substr(begin, end - begin)), Span{begin, end}});
  };

  while (i < n) {
    const char c = source[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      while (i < n && source[i] != '\n') ++i;
      continue;
    }
    switch (c) {
      case '(': emit(TokenKind::LParen, i, i + 1); ++i; continue;
      case ')': emit(TokenKind::RParen, i, i + 1); ++i; continue;
      case '{': emit(TokenKind::LBrace, i, i + 1); ++i; continue;
      case '}': emit(TokenKind::RBrace, i, i + 1); ++i; continue;
      default: break;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < n && source[j] != '"' && source[j] != '\n') ++j;
      if (j >= n || source[j] != '"') throw Error(Errc::IllegalCharacter, "unterminated string", i);
      emit(TokenKind::String, i, j + 1);
      i = j + 1;
      continue;
    }
    const bool signed_number = c == '-' && i + 1 < n && is_digit(source[i + 1]);
    if (is_digit(c) || signed_number) {
      std::size_t j = i + 1;
      while (j < n && is_digit(source[j])) ++j;
      TokenKind kind = TokenKind::Int;
      if (j + 1 < n && source[j] == '.' && is_digit(source[j + 1])) {
        kind = TokenKind::Real;
        j += 1;
        while (j < n && is_digit(source[j])) ++j;
      }
      if (j < n && (is_ident_start(source[j]) || source[j] == '.'))
        throw Error(Errc::IllegalCharacter, "malformed number", j);
      emit(kind, i, j);
      i = j;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && is_ident_char(source[j])) ++j;
      if (j < n && source[j] == ':') {
        emit(TokenKind::KeyArg, i, j + 1);
        i = j + 1;
      } else {
        emit(TokenKind::Ident, i, j);
        i = j;
      }
      continue;
    }
    throw Error(Errc::IllegalCharacter, std::string("unexpected byte '") + c + "'", i);
  }
  return tokens;
}

}  // namespace gavel::gdl
