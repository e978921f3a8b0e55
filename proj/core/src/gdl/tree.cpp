#include "gavel/gdl/tree.hpp"

namespace gavel::gdl {

namespace {

bool equal_literal(const Literal& a, const Literal& b) { return a.kind == b.kind && a.text == b.text; }

bool equal_set(const NodeSet& a, const NodeSet& b) {
  if (a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i)
    if (!structurally_equal(a.items[i], b.items[i])) return false;
  return true;
}

}  // namespace

bool structurally_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (const auto* la = std::get_if<Literal>(&a)) return equal_literal(*la, std::get<Literal>(b));
  if (const auto* na = std::get_if<Node>(&a)) return structurally_equal(*na, std::get<Node>(b));
  return equal_set(std::get<NodeSet>(a), std::get<NodeSet>(b));
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.head != b.head || a.is_reference != b.is_reference || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i].key != b.args[i].key) return false;
    if (!structurally_equal(a.args[i].value, b.args[i].value)) return false;
  }
  return true;
}

std::size_t node_count(const Node& node) {
  std::size_t count = 0;
  for_each_node(node, [&](const Node&) { ++count; });
  return count;
}

std::string_view leading_ident(const Node& node) {
  for (const Arg& arg : node.args) {
    if (!arg.key.empty()) continue;
    if (const auto* lit = std::get_if<Literal>(&arg.value); lit && lit->kind == Literal::Kind::Ident)
      return lit->text;
    return {};
  }
  return {};
}

}  // namespace gavel::gdl
