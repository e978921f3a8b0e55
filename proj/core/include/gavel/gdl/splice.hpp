#pragma once

#include <string_view>

#include "gavel/gdl/sites.hpp"

namespace gavel::gdl {

/// Replaces the expression at `site` and re-parses so spans are recomputed.
/// The replacement must belong to the site's category
/// (Error{CategoryMismatch}).
GameTree splice(const GameTree& tree, const ExpressionSite& site, const Node& replacement,
                const Grammar& grammar = default_grammar());

/// As above with raw replacement text; parse errors propagate.
GameTree splice(const GameTree& tree, const ExpressionSite& site, std::string_view replacement_text,
                const Grammar& grammar = default_grammar());

}  // namespace gavel::gdl
