#pragma once

#include <string>

#include "gavel/gdl/tree.hpp"

namespace gavel::gdl {

/// Deterministic layout: leaf nodes on one line; otherwise leading literals
/// stay on the head line and every later argument goes on its own line,
/// indented two spaces per depth. Used as the dedup key for candidates.
std::string print_canonical(const Node& node);
std::string print_canonical(const GameTree& tree);

/// Single-line form with one space between siblings.
std::string print_inline(const Node& node);

}  // namespace gavel::gdl
