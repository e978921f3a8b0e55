#include "gavel/gdl/printer.hpp"

namespace gavel::gdl {

namespace {

bool is_leaf(const Node& node) {
  for (const Arg& arg : node.args)
    if (!std::holds_alternative<Literal>(arg.value)) return false;
  return true;
}

void print_literal(std::string& out, const Literal& lit) {
  if (lit.kind == Literal::Kind::String) {
    out += '"';
    out += lit.text;
    out += '"';
  } else {
    out += lit.text;
  }
}

void print_head(std::string& out, const Node& node) {
  out += '(';
  if (node.is_reference) {
    out += '"';
    out += node.head;
    out += '"';
  } else {
    out += node.head;
  }
}

void indent(std::string& out, int depth) {
  out += '\n';
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

void print_node(std::string& out, const Node& node, int depth);

void print_value(std::string& out, const Value& value, int depth) {
  if (const auto* lit = std::get_if<Literal>(&value)) {
    print_literal(out, *lit);
  } else if (const auto* child = std::get_if<Node>(&value)) {
    print_node(out, *child, depth);
  } else {
    const auto& set = std::get<NodeSet>(value);
    out += '{';
    for (const Node& item : set.items) {
      indent(out, depth + 1);
      print_node(out, item, depth + 1);
    }
    indent(out, depth);
    out += '}';
  }
}

void print_node(std::string& out, const Node& node, int depth) {
  print_head(out, node);
  if (is_leaf(node)) {
    for (const Arg& arg : node.args) {
      out += ' ';
      if (!arg.key.empty()) out += arg.key + ':';
      print_literal(out, std::get<Literal>(arg.value));
    }
    out += ')';
    return;
  }
  bool leading = true;
  for (const Arg& arg : node.args) {
    const bool literal = std::holds_alternative<Literal>(arg.value);
    if (leading && literal) {
      out += ' ';
    } else {
      leading = false;
      indent(out, depth + 1);
    }
    if (!arg.key.empty()) out += arg.key + ':';
    print_value(out, arg.value, depth + 1);
  }
  out += ')';
}

void print_flat(std::string& out, const Node& node);

void print_flat_value(std::string& out, const Value& value) {
  if (const auto* lit = std::get_if<Literal>(&value)) {
    print_literal(out, *lit);
  } else if (const auto* child = std::get_if<Node>(&value)) {
    print_flat(out, *child);
  } else {
    out += '{';
    bool first = true;
    for (const Node& item : std::get<NodeSet>(value).items) {
      if (!first) out += ' ';
      first = false;
      print_flat(out, item);
    }
    out += '}';
  }
}

void print_flat(std::string& out, const Node& node) {
  print_head(out, node);
  for (const Arg& arg : node.args) {
    out += ' ';
    if (!arg.key.empty()) out += arg.key + ':';
    print_flat_value(out, arg.value);
  }
  out += ')';
}

}  // namespace

std::string print_canonical(const Node& node) {
  std::string out;
  print_node(out, node, 0);
  return out;
}

std::string print_canonical(const GameTree& tree) {
  std::string out = print_canonical(tree.root);
  out += '\n';
  return out;
}

std::string print_inline(const Node& node) {
  std::string out;
  print_flat(out, node);
  return out;
}

}  // namespace gavel::gdl
