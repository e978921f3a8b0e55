#include "gavel/gdl/sites.hpp"

namespace gavel::gdl {

namespace {

void walk(const Grammar& grammar, const Node& node, const std::string& category, int depth,
          std::vector<ExpressionSite>& out) {
  out.push_back(ExpressionSite{node.span, category, node.head, depth});
  const Alternative* alt = category.empty() ? nullptr : grammar.match(category, node);
  std::vector<const Slot*> slots;
  if (alt) slots = bind_slots(grammar, *alt, node);
  for (std::size_t i = 0; i < node.args.size(); ++i) {
    const std::string child_category = (alt && slots[i]) ? slots[i]->category : std::string();
    const Value& value = node.args[i].value;
    if (const auto* child = std::get_if<Node>(&value)) {
      walk(grammar, *child, child_category, depth + 1, out);
    } else if (const auto* set = std::get_if<NodeSet>(&value)) {
      for (const Node& item : set->items) walk(grammar, item, child_category, depth + 1, out);
    }
  }
}

}  // namespace

std::vector<ExpressionSite> extract_expressions(const GameTree& tree, const Grammar& grammar) {
  std::vector<ExpressionSite> sites;
  walk(grammar, tree.root, std::string(Grammar::kRoot), 0, sites);
  return sites;
}

}  // namespace gavel::gdl
