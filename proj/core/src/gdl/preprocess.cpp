#include "gavel/gdl/preprocess.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "gavel/common/error.hpp"
#include "gavel/gdl/parser.hpp"
#include "gavel/gdl/printer.hpp"

namespace gavel::gdl {

namespace {

constexpr int kMaxExpansionDepth = 32;

constexpr std::array<std::string_view, 24> kGreek = {
    "ALPHA", "BETA", "GAMMA", "DELTA", "EPSILON", "ZETA",    "ETA", "THETA", "IOTA", "KAPPA", "LAMBDA", "MU",
    "NU",    "XI",   "OMICRON", "PI",  "RHO",     "SIGMA",   "TAU", "UPSILON", "PHI", "CHI",  "PSI",    "OMEGA"};

Node expand(const Node& node, const MacroTable& macros, int depth) {
  if (depth > kMaxExpansionDepth) throw Error(Errc::UnknownMacro, "macro expansion too deep at \"" + node.head + "\"");
  if (node.is_reference) {
    auto it = macros.find(node.head);
    if (it == macros.end()) throw Error(Errc::UnknownMacro, "no macro named \"" + node.head + "\"", node.span.begin);
    return expand(it->second, macros, depth + 1);
  }
  Node out = node;
  for (Arg& arg : out.args) {
    if (auto* child = std::get_if<Node>(&arg.value)) {
      *child = expand(*child, macros, depth);
    } else if (auto* set = std::get_if<NodeSet>(&arg.value)) {
      for (Node& item : set->items) item = expand(item, macros, depth);
    }
  }
  return out;
}

bool is_abstract_piece(std::string_view name) {
  if (!name.starts_with("PIECE_")) return false;
  for (char c : name.substr(6))
    if (!(c >= 'A' && c <= 'Z') && !(c >= '0' && c <= '9')) return false;
  return name.size() > 6;
}

std::string_view strip_digits(std::string_view name, std::string_view& digits) {
  std::size_t end = name.size();
  while (end > 0 && name[end - 1] >= '0' && name[end - 1] <= '9') --end;
  digits = name.substr(end);
  return name.substr(0, end);
}

Literal* first_string(Node& node) {
  for (Arg& arg : node.args)
    if (auto* lit = std::get_if<Literal>(&arg.value); lit && lit->kind == Literal::Kind::String && arg.key.empty())
      return lit;
  return nullptr;
}

void collect_piece_names(Node& node, std::vector<std::string>& names) {
  for_each_node(node, [&](const Node& n) {
    if (n.head != "piece" || n.is_reference) return;
    for (const Arg& arg : n.args) {
      if (const auto* lit = std::get_if<Literal>(&arg.value); lit && lit->kind == Literal::Kind::String) {
        if (std::find(names.begin(), names.end(), lit->text) == names.end()) names.push_back(lit->text);
        return;
      }
    }
  });
}

void rename_pieces(Node& node, const std::map<std::string, std::string, std::less<>>& mapping) {
  if (node.head == "piece" || node.head == "place") {
    if (Literal* lit = first_string(node)) {
      if (auto it = mapping.find(lit->text); it != mapping.end()) {
        lit->text = it->second;
      } else {
        std::string_view digits;
        const std::string_view base = strip_digits(lit->text, digits);
        if (auto jt = mapping.find(base); jt != mapping.end()) lit->text = jt->second + std::string(digits);
      }
    }
  }
  for (Arg& arg : node.args) {
    if (auto* child = std::get_if<Node>(&arg.value)) {
      rename_pieces(*child, mapping);
    } else if (auto* set = std::get_if<NodeSet>(&arg.value)) {
      for (Node& item : set->items) rename_pieces(item, mapping);
    }
  }
}

}  // namespace

std::string abstract_piece_name(std::size_t index) {
  if (index < kGreek.size()) return "PIECE_" + std::string(kGreek[index]);
  return "PIECE_" + std::to_string(index);
}

GameTree preprocess(const GameTree& tree, const MacroTable& macros) {
  Node root = expand(tree.root, macros, 0);

  if (Literal* name = first_string(root)) name->text = std::string(kAbstractGameName);

  std::vector<std::string> names;
  collect_piece_names(root, names);
  std::map<std::string, std::string, std::less<>> mapping;
  std::vector<std::string> taken;
  for (const auto& n : names)
    if (is_abstract_piece(n)) taken.push_back(n);
  std::size_t next = 0;
  for (const auto& n : names) {
    if (is_abstract_piece(n)) continue;
    std::string candidate;
    do {
      candidate = abstract_piece_name(next++);
    } while (std::find(taken.begin(), taken.end(), candidate) != taken.end());
    taken.push_back(candidate);
    mapping[n] = candidate;
  }
  rename_pieces(root, mapping);

  return parse_game(print_canonical(root) + "\n");
}

MacroTable load_macros(const std::filesystem::path& dir) {
  MacroTable table;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(Errc::Io, "macro directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".lud") continue;
    std::ifstream in(entry.path());
    std::stringstream buffer;
    buffer << in.rdbuf();
    table[entry.path().stem().string()] = parse_fragment(buffer.str());
  }
  return table;
}

}  // namespace gavel::gdl
