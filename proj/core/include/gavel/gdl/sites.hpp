#pragma once

#include <string>
#include <vector>

#include "gavel/gdl/grammar.hpp"

namespace gavel::gdl {

/// A mutable location in a game: a parenthesised expression, the syntactic
/// category its parent expects there, and the keyword currently occupying it.
struct ExpressionSite {
  Span span;
  std::string category;  // empty when the parent does not match the grammar
  std::string head;
  int depth = 0;
};

/// One site per node, root first, in pre-order.
std::vector<ExpressionSite> extract_expressions(const GameTree& tree, const Grammar& grammar = default_grammar());

}  // namespace gavel::gdl
