#pragma once

#include <span>
#include <string_view>

#include "gavel/gdl/tree.hpp"

namespace gavel::gdl {

/// Parses a single complete game. Errors: UnbalancedParens, UnexpectedToken
/// (including a root whose head is not `game`).
GameTree parse(std::span<const Token> tokens, std::string_view source);

/// tokenize + parse.
GameTree parse_game(std::string_view source);

/// Parses exactly one parenthesised expression of any head, e.g. a macro
/// body or a replacement subtree. Spans are relative to `source`.
Node parse_fragment(std::string_view source);

}  // namespace gavel::gdl
