#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gavel/gdl/tree.hpp"

namespace gavel::gdl {

enum class SlotKind { Category, SetOf, CategoryOrSet, Int, String, Enum };

/// What a string literal names; drives the sampler's choice of text.
enum class StringRole { GameName, PieceName, PieceRef };

struct Slot {
  SlotKind kind = SlotKind::Category;
  std::string category;             // Category / SetOf / CategoryOrSet
  int lo = 0, hi = 0;               // Int domain (inclusive)
  std::vector<int> sample_values;   // Int values the sampler draws from
  std::vector<std::string> values;  // Enum domain
  StringRole role = StringRole::GameName;
  bool optional = false;
  std::string key;  // named slot (`key:`) when non-empty

  std::string describe() const;
};

/// One production alternative. `tag` is the identifier that must follow the
/// head, as in `(move Add ...)` or `(is Line ...)`; productions are identified
/// by (category, head, tag).
struct Alternative {
  std::string head;
  std::string tag;
  std::vector<Slot> slots;
  int min_height = 0;  // smallest subtree depth this alternative can derive

  std::string signature() const;
};

class Grammar {
 public:
  void add(const std::string& category, Alternative alt);
  /// Computes min_height for all alternatives; must be called after the last add.
  void finalize();

  const std::vector<Alternative>* alternatives(std::string_view category) const;
  bool has_category(std::string_view category) const;
  bool category_has_head(std::string_view category, std::string_view head) const;
  /// The alternative of `category` that `node` instantiates (by head and tag).
  const Alternative* match(std::string_view category, const Node& node) const;

  const std::map<std::string, std::vector<Alternative>, std::less<>>& categories() const { return categories_; }

  /// Category names referenced by slots but never defined; empty when closed.
  std::vector<std::string> undefined_categories() const;

  static constexpr std::string_view kRoot = "game";

 private:
  std::map<std::string, std::vector<Alternative>, std::less<>> categories_;
};

/// Grammar of the supported language subset.
const Grammar& default_grammar();

struct Violation {
  Span span;
  std::string message;
};

struct CompileReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Checks every node against the grammar, terminal domains, and structural
/// requirements (one board, at least one player, a play rule). Reports all
/// violations. Pure; never throws.
CompileReport validate(const GameTree& tree, const Grammar& grammar = default_grammar());

/// Validates a standalone subtree against an expected category.
CompileReport validate_fragment(const Node& node, std::string_view category,
                                const Grammar& grammar = default_grammar());

/// Maps argument i of `node` (as `alt`) to its slot, or nullptr for the tag or
/// an argument that fits no slot.
std::vector<const Slot*> bind_slots(const Grammar& grammar, const Alternative& alt, const Node& node);

}  // namespace gavel::gdl
