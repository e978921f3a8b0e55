#include "gavel/gdl/grammar.hpp"

#include <algorithm>
#include <set>

namespace gavel::gdl {

std::string Slot::describe() const {
  std::string text;
  switch (kind) {
    case SlotKind::Category: text = "<" + category + ">"; break;
    case SlotKind::SetOf: text = "{<" + category + ">...}"; break;
    case SlotKind::CategoryOrSet: text = "<" + category + "> or {<" + category + ">...}"; break;
    case SlotKind::Int: text = "integer in [" + std::to_string(lo) + "," + std::to_string(hi) + "]"; break;
    case SlotKind::String: text = "string"; break;
    case SlotKind::Enum: {
      text = "one of {";
      for (std::size_t i = 0; i < values.size(); ++i) text += (i ? " " : "") + values[i];
      text += "}";
      break;
    }
  }
  if (!key.empty()) text = key + ":" + text;
  return text;
}

std::string Alternative::signature() const {
  std::string text = "(" + head;
  if (!tag.empty()) text += " " + tag;
  for (const Slot& slot : slots) text += slot.optional ? " [" + slot.describe() + "]" : " " + slot.describe();
  return text + ")";
}

void Grammar::add(const std::string& category, Alternative alt) { categories_[category].push_back(std::move(alt)); }

void Grammar::finalize() {
  // Least fixpoint of min derivation height. Unreachable heights stay at a
  // large sentinel so sampling never picks them.
  constexpr int kInf = 1 << 20;
  std::map<std::string, int, std::less<>> cat_height;
  for (auto& [name, alts] : categories_) {
    cat_height[name] = kInf;
    for (auto& alt : alts) alt.min_height = kInf;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [name, alts] : categories_) {
      for (auto& alt : alts) {
        int h = 1;
        for (const Slot& slot : alt.slots) {
          if (slot.optional) continue;
          if (slot.kind == SlotKind::Category || slot.kind == SlotKind::SetOf || slot.kind == SlotKind::CategoryOrSet) {
            auto it = cat_height.find(slot.category);
            const int child = it == cat_height.end() ? kInf : it->second;
            h = std::max(h, child >= kInf ? kInf : child + 1);
          }
        }
        if (h < alt.min_height) {
          alt.min_height = h;
          changed = true;
        }
        if (h < cat_height[name]) {
          cat_height[name] = h;
          changed = true;
        }
      }
    }
  }
}

const std::vector<Alternative>* Grammar::alternatives(std::string_view category) const {
  auto it = categories_.find(category);
  return it == categories_.end() ? nullptr : &it->second;
}

bool Grammar::has_category(std::string_view category) const { return categories_.contains(category); }

bool Grammar::category_has_head(std::string_view category, std::string_view head) const {
  const auto* alts = alternatives(category);
  if (!alts) return false;
  return std::any_of(alts->begin(), alts->end(), [&](const Alternative& a) { return a.head == head; });
}

const Alternative* Grammar::match(std::string_view category, const Node& node) const {
  const auto* alts = alternatives(category);
  if (!alts || node.is_reference) return nullptr;
  const std::string_view tag = leading_ident(node);
  const Alternative* untagged = nullptr;
  for (const Alternative& alt : *alts) {
    if (alt.head != node.head) continue;
    if (alt.tag.empty()) {
      untagged = &alt;
    } else if (alt.tag == tag) {
      return &alt;
    }
  }
  return untagged;
}

std::vector<std::string> Grammar::undefined_categories() const {
  std::set<std::string> missing;
  for (const auto& [name, alts] : categories_)
    for (const auto& alt : alts)
      for (const Slot& slot : alt.slots)
        if ((slot.kind == SlotKind::Category || slot.kind == SlotKind::SetOf ||
             slot.kind == SlotKind::CategoryOrSet) &&
            !has_category(slot.category))
          missing.insert(slot.category);
  return {missing.begin(), missing.end()};
}

namespace {

// Builders keep the production table below readable.
Slot cat(std::string c) { return Slot{.kind = SlotKind::Category, .category = std::move(c)}; }
Slot set_of(std::string c) { return Slot{.kind = SlotKind::SetOf, .category = std::move(c)}; }
Slot one_or_set(std::string c) { return Slot{.kind = SlotKind::CategoryOrSet, .category = std::move(c)}; }
Slot integer(int lo, int hi, std::vector<int> sample) {
  return Slot{.kind = SlotKind::Int, .lo = lo, .hi = hi, .sample_values = std::move(sample)};
}
Slot str(StringRole role) { return Slot{.kind = SlotKind::String, .role = role}; }
Slot one_of(std::vector<std::string> values) { return Slot{.kind = SlotKind::Enum, .values = std::move(values)}; }
Slot opt(Slot s) {
  s.optional = true;
  return s;
}
Slot named(std::string key, Slot s) {
  s.key = std::move(key);
  s.optional = true;
  return s;
}
Alternative alt(std::string head, std::vector<Slot> slots = {}) { return Alternative{std::move(head), "", std::move(slots)}; }
Alternative tagged(std::string head, std::string tag, std::vector<Slot> slots = {}) {
  return Alternative{std::move(head), std::move(tag), std::move(slots)};
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

const std::vector<std::string> kDirections = {"Orthogonal", "Diagonal",  "Adjacent", "Forward",
                                              "Backward",   "Forwards",  "Backwards", "ForwardDiagonal"};
const std::vector<std::string> kAxes = {"Orthogonal", "Diagonal", "Adjacent"};

Grammar build_default() {
  Grammar g;
  g.add("game", alt("game", {str(StringRole::GameName), cat("players"), cat("equipment"), cat("rules")}));
  g.add("players", alt("players", {integer(1, 4, {2})}));
  g.add("equipment", alt("equipment", {set_of("item")}));

  g.add("item", alt("board", {cat("shape")}));
  g.add("item", alt("piece", {str(StringRole::PieceName), one_of({"Each", "P1", "P2"}), opt(cat("moves"))}));
  g.add("item", alt("regions", {one_of({"P1", "P2"}), cat("region")}));

  g.add("shape", alt("square", {integer(2, 19, range(3, 9))}));
  g.add("shape", alt("hex", {integer(2, 11, range(3, 6))}));
  g.add("shape", alt("rotate", {integer(0, 359, {30, 45, 60, 90, 180}), cat("shape")}));

  g.add("rules", alt("rules", {opt(cat("meta")), opt(cat("start")), cat("play"), cat("end")}));
  g.add("meta", alt("meta", {cat("meta_rule")}));
  g.add("meta_rule", tagged("no", "Repeat"));
  g.add("start", alt("start", {one_or_set("placement")}));
  g.add("placement", alt("place", {str(StringRole::PieceRef), cat("region")}));
  g.add("play", alt("play", {cat("moves")}));

  const Slot dir = opt(one_of(kDirections));
  g.add("moves", tagged("move", "Add", {cat("add_to"), opt(cat("then"))}));
  g.add("moves", tagged("move", "Step", {dir, opt(cat("landing")), opt(cat("then"))}));
  g.add("moves", tagged("move", "Slide", {dir, opt(cat("between")), opt(cat("landing")), opt(cat("then"))}));
  g.add("moves", tagged("move", "Hop", {dir, opt(cat("between")), opt(cat("landing")), opt(cat("then"))}));
  g.add("moves", tagged("forEach", "Piece"));
  g.add("moves", alt("or", {set_of("moves")}));

  g.add("add_to", alt("to", {cat("region"), named("if", cat("condition"))}));
  g.add("landing", alt("to", {named("if", cat("condition")), opt(cat("apply"))}));
  g.add("between", alt("between", {named("if", cat("condition")), opt(cat("apply"))}));
  g.add("apply", alt("apply", {cat("action")}));
  g.add("action", alt("remove", {cat("site")}));
  g.add("then", alt("then", {cat("effect")}));
  g.add("effect", alt("enclose", {cat("origin"), opt(one_of(kAxes)), cat("between")}));
  g.add("origin", alt("from", {cat("site")}));

  g.add("end", alt("end", {one_or_set("end_rule")}));
  g.add("end_rule", alt("if", {cat("condition"), cat("result")}));
  g.add("result", alt("result", {one_of({"Mover", "Next"}), one_of({"Win", "Loss", "Draw"})}));

  g.add("condition", tagged("is", "Line", {integer(2, 19, range(3, 6)), opt(one_of(kAxes))}));
  g.add("condition", tagged("is", "Connected",
                            {integer(1, 6, range(2, 4)), one_of({"SidesNoCorners", "Corners", "Sides", "Regions"}),
                             opt(one_of(kAxes))}));
  g.add("condition", tagged("is", "In", {cat("site"), cat("region")}));
  g.add("condition", tagged("is", "Empty", {cat("site")}));
  g.add("condition", tagged("is", "Occupied", {cat("site")}));
  g.add("condition", tagged("is", "Enemy", {cat("who")}));
  g.add("condition", tagged("is", "Friend", {cat("who")}));
  g.add("condition", tagged("no", "Moves", {one_of({"Next", "Mover"})}));
  g.add("condition", alt("not", {cat("condition")}));
  g.add("condition", alt("and", {set_of("condition")}));
  g.add("condition", alt("or", {set_of("condition")}));
  g.add("who", alt("who", {named("at", cat("site"))}));

  g.add("site", alt("to"));
  g.add("site", alt("from"));
  g.add("site", alt("between"));
  g.add("site", tagged("last", "To"));
  g.add("site", tagged("last", "From"));

  for (const char* name : {"Empty", "Board", "Top", "Bottom", "Left", "Right", "Corners", "Mover", "Next"})
    g.add("region", tagged("sites", name));
  g.add("region", tagged("sites", "Around", {cat("site")}));
  g.add("region", alt("expand", {cat("region"), named("steps", integer(1, 4, {1, 1, 2}))}));

  g.finalize();
  return g;
}

// ---------------------------------------------------------------------------
// Binding arguments to slots

bool shallow_match(const Grammar& grammar, const Slot& slot, const Value& value) {
  switch (slot.kind) {
    case SlotKind::Category:
      if (const auto* node = std::get_if<Node>(&value))
        return node->is_reference || grammar.category_has_head(slot.category, node->head);
      return false;
    case SlotKind::SetOf: return std::holds_alternative<NodeSet>(value);
    case SlotKind::CategoryOrSet:
      if (const auto* node = std::get_if<Node>(&value))
        return node->is_reference || grammar.category_has_head(slot.category, node->head);
      return std::holds_alternative<NodeSet>(value);
    case SlotKind::Int: {
      const auto* lit = std::get_if<Literal>(&value);
      return lit && lit->kind == Literal::Kind::Int;
    }
    case SlotKind::String: {
      const auto* lit = std::get_if<Literal>(&value);
      return lit && lit->kind == Literal::Kind::String;
    }
    case SlotKind::Enum: {
      const auto* lit = std::get_if<Literal>(&value);
      return lit && lit->kind == Literal::Kind::Ident &&
             std::find(slot.values.begin(), slot.values.end(), lit->text) != slot.values.end();
    }
  }
  return false;
}

Span span_of(const Value& value) {
  if (const auto* lit = std::get_if<Literal>(&value)) return lit->span;
  if (const auto* node = std::get_if<Node>(&value)) return node->span;
  return std::get<NodeSet>(value).span;
}

std::string describe_value(const Value& value) {
  if (const auto* lit = std::get_if<Literal>(&value)) {
    return lit->kind == Literal::Kind::String ? "\"" + lit->text + "\"" : lit->text;
  }
  if (const auto* node = std::get_if<Node>(&value)) return "(" + node->head + " ...)";
  return "{...}";
}

struct Binding {
  std::vector<const Slot*> slot_for_arg;
  std::vector<Violation> problems;
};

Binding bind(const Grammar& grammar, const Alternative& alt, const Node& node) {
  Binding b;
  b.slot_for_arg.assign(node.args.size(), nullptr);
  std::vector<const Slot*> positional;
  for (const Slot& slot : alt.slots)
    if (slot.key.empty()) positional.push_back(&slot);

  std::size_t next_slot = 0;
  bool tag_pending = !alt.tag.empty();
  std::set<std::string> seen_keys;
  for (std::size_t i = 0; i < node.args.size(); ++i) {
    const Arg& arg = node.args[i];
    if (!arg.key.empty()) {
      const Slot* found = nullptr;
      for (const Slot& slot : alt.slots)
        if (slot.key == arg.key) found = &slot;
      if (!found) {
        b.problems.push_back({span_of(arg.value), "(" + node.head + ") does not take argument '" + arg.key + ":'"});
      } else if (!seen_keys.insert(arg.key).second) {
        b.problems.push_back({span_of(arg.value), "duplicate argument '" + arg.key + ":'"});
      } else if (!shallow_match(grammar, *found, arg.value)) {
        b.problems.push_back({span_of(arg.value), "expected " + found->describe() + ", found " + describe_value(arg.value)});
      } else {
        b.slot_for_arg[i] = found;
      }
      continue;
    }
    if (tag_pending) {
      tag_pending = false;  // match() already checked the tag
      continue;
    }
    bool placed = false;
    while (next_slot < positional.size()) {
      const Slot& slot = *positional[next_slot];
      if (shallow_match(grammar, slot, arg.value)) {
        b.slot_for_arg[i] = &slot;
        ++next_slot;
        placed = true;
        break;
      }
      if (slot.optional) {
        ++next_slot;
        continue;
      }
      b.problems.push_back({span_of(arg.value), "expected " + slot.describe() + ", found " + describe_value(arg.value)});
      ++next_slot;
      placed = true;
      break;
    }
    if (!placed)
      b.problems.push_back({span_of(arg.value), "unexpected argument " + describe_value(arg.value) + " in (" + node.head + ")"});
  }
  for (; next_slot < positional.size(); ++next_slot) {
    const Slot& slot = *positional[next_slot];
    if (slot.optional) continue;
    std::string message = "(" + node.head + ") is missing " + slot.describe();
    if (node.head == "rules" && slot.category == "play") message = "rules do not define a play rule";
    b.problems.push_back({node.span, message});
  }
  return b;
}

// ---------------------------------------------------------------------------
// Validation

class Validator {
 public:
  explicit Validator(const Grammar& g) : grammar_(g) {}

  void node(const Node& n, std::string_view category) {
    if (n.is_reference) {
      report(n.span, "unexpanded function reference \"" + n.head + "\"");
      return;
    }
    const Alternative* a = grammar_.match(category, n);
    if (!a) {
      if (grammar_.category_has_head(category, n.head)) {
        const std::string_view tag = leading_ident(n);
        report(n.span, "unknown variant '" + std::string(tag) + "' of (" + n.head + ") for <" + std::string(category) + ">");
      } else {
        report(n.span, "(" + n.head + ") is not a valid <" + std::string(category) + ">");
      }
      return;
    }
    if (n.head == "board") ++boards_;
    Binding b = bind(grammar_, *a, n);
    for (auto& p : b.problems) violations_.push_back(std::move(p));
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (const Slot* slot = b.slot_for_arg[i]) value(n.args[i].value, *slot);
    }
  }

  void value(const Value& v, const Slot& slot) {
    if (const auto* lit = std::get_if<Literal>(&v)) {
      if (slot.kind == SlotKind::Int) {
        long long x = 0;
        try {
          x = std::stoll(lit->text);
        } catch (...) {
          x = slot.hi + 1LL;
        }
        if (x < slot.lo || x > slot.hi) report(lit->span, "value " + lit->text + " outside " + slot.describe());
      }
      return;
    }
    if (const auto* child = std::get_if<Node>(&v)) {
      node(*child, slot.category);
      return;
    }
    const auto& set = std::get<NodeSet>(v);
    if (set.items.empty()) report(set.span, "empty {} where " + slot.describe() + " expected");
    for (const Node& item : set.items) node(item, slot.category);
  }

  void report(Span span, std::string message) { violations_.push_back({span, std::move(message)}); }

  int boards() const { return boards_; }
  std::vector<Violation> take() { return std::move(violations_); }

 private:
  const Grammar& grammar_;
  std::vector<Violation> violations_;
  int boards_ = 0;
};

}  // namespace

std::vector<const Slot*> bind_slots(const Grammar& grammar, const Alternative& alt, const Node& node) {
  return bind(grammar, alt, node).slot_for_arg;
}

const Grammar& default_grammar() {
  static const Grammar grammar = build_default();
  return grammar;
}

CompileReport validate(const GameTree& tree, const Grammar& grammar) {
  Validator v(grammar);
  v.node(tree.root, Grammar::kRoot);
  if (tree.root.head == "game" && v.boards() == 0) v.report(tree.root.span, "game does not define a board");
  if (v.boards() > 1) v.report(tree.root.span, "game defines more than one board");
  return CompileReport{v.take()};
}

CompileReport validate_fragment(const Node& node, std::string_view category, const Grammar& grammar) {
  Validator v(grammar);
  v.node(node, category);
  return CompileReport{v.take()};
}

}  // namespace gavel::gdl
