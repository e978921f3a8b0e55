#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gavel/gdl/token.hpp"

namespace gavel::gdl {

struct Literal {
  enum class Kind { Ident, String, Int, Real };
  Kind kind = Kind::Ident;
  std::string text;  // unquoted for strings
  Span span;

  bool is_ident(std::string_view name) const { return kind == Kind::Ident && text == name; }
};

struct Arg;

/// One parenthesised ludeme application: `(head arg...)`. A node whose head is
/// a quoted string, `("BlockWin")`, is a function reference awaiting macro
/// expansion.
struct Node {
  std::string head;
  bool is_reference = false;
  std::vector<Arg> args;
  Span span;
};

/// Brace group `{ ... }`; source order is preserved.
struct NodeSet {
  std::vector<Node> items;
  Span span;
};

using Value = std::variant<Literal, Node, NodeSet>;

struct Arg {
  std::string key;  // named argument without the ':'; empty when positional
  Value value;
};

struct GameTree {
  Node root;
  std::string source;
};

/// Equality ignoring spans and whitespace.
bool structurally_equal(const Node& a, const Node& b);
bool structurally_equal(const Value& a, const Value& b);

/// Number of parenthesised nodes in the subtree, root included.
std::size_t node_count(const Node& node);

/// Visits every node in pre-order.
template <typename F>
void for_each_node(const Node& node, F&& visit) {
  visit(node);
  for (const Arg& arg : node.args) {
    if (const auto* child = std::get_if<Node>(&arg.value)) {
      for_each_node(*child, visit);
    } else if (const auto* set = std::get_if<NodeSet>(&arg.value)) {
      for (const Node& item : set->items) for_each_node(item, visit);
    }
  }
}

/// First positional identifier argument (the ludeme variant, e.g. `Add` in
/// `(move Add ...)`), or empty.
std::string_view leading_ident(const Node& node);

}  // namespace gavel::gdl
