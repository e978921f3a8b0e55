#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "gavel/gdl/tree.hpp"

namespace gavel::gdl {

using MacroTable = std::map<std::string, Node, std::less<>>;

inline constexpr std::string_view kAbstractGameName = "GAME_NAME";

/// Abstract piece identifier for the i-th distinct piece name:
/// PIECE_ALPHA, PIECE_BETA, ...
std::string abstract_piece_name(std::size_t index);

/// Expands every `("Name")` reference with its macro body (recursively), then
/// replaces the game name and piece names with abstract identifiers. Owner
/// suffixes on piece references are kept (`Counter1` -> `PIECE_ALPHA1`).
/// Throws Error{UnknownMacro}.
GameTree preprocess(const GameTree& tree, const MacroTable& macros);

/// Loads `<name>.lud` fragment files from a directory.
MacroTable load_macros(const std::filesystem::path& dir);

}  // namespace gavel::gdl
