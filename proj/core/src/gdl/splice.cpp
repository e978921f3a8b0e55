#include "gavel/gdl/splice.hpp"

#include "gavel/common/error.hpp"
#include "gavel/gdl/parser.hpp"
#include "gavel/gdl/printer.hpp"

namespace gavel::gdl {

GameTree splice(const GameTree& tree, const ExpressionSite& site, const Node& replacement, const Grammar& grammar) {
  const std::string& src = tree.source;
  if (site.span.end > src.size() || site.span.begin >= site.span.end || src[site.span.begin] != '(' ||
      src[site.span.end - 1] != ')')
    throw Error(Errc::InvalidParams, "site span does not delimit an expression of this source");
  if (!site.category.empty() && !grammar.match(site.category, replacement))
    throw Error(Errc::CategoryMismatch,
                "(" + replacement.head + ") cannot stand where <" + site.category + "> is expected");
  std::string text;
  text.reserve(src.size() + 64);
  text.append(src, 0, site.span.begin);
  text += print_canonical(replacement);
  text.append(src, site.span.end, std::string::npos);
  return parse_game(text);
}

GameTree splice(const GameTree& tree, const ExpressionSite& site, std::string_view replacement_text,
                const Grammar& grammar) {
  return splice(tree, site, parse_fragment(replacement_text), grammar);
}

}  // namespace gavel::gdl
