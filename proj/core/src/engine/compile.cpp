#include <charconv>

#include "gavel/common/error.hpp"
#include "gavel/engine/engine.hpp"
#include "gavel/gdl/grammar.hpp"

namespace gavel::engine {

using gdl::Literal;
using gdl::Node;
using gdl::NodeSet;

namespace {

[[noreturn]] void unsupported(const Node& at, const std::string& message) {
  throw Error(Errc::UnsupportedConstruct, message, at.span.begin);
}

std::vector<const Literal*> literals(const Node& n) {
  std::vector<const Literal*> out;
  for (const auto& a : n.args)
    if (a.key.empty())
      if (const auto* l = std::get_if<Literal>(&a.value)) out.push_back(l);
  return out;
}

/// Positional child nodes, with brace groups flattened.
std::vector<const Node*> children(const Node& n) {
  std::vector<const Node*> out;
  for (const auto& a : n.args) {
    if (!a.key.empty()) continue;
    if (const auto* c = std::get_if<Node>(&a.value)) out.push_back(c);
    if (const auto* s = std::get_if<NodeSet>(&a.value))
      for (const Node& c : s->items) out.push_back(&c);
  }
  return out;
}

const Node* child(const Node& n, std::string_view head) {
  for (const Node* c : children(n))
    if (c->head == head) return c;
  return nullptr;
}

const Node* named(const Node& n, std::string_view key) {
  for (const auto& a : n.args)
    if (a.key == key)
      if (const auto* c = std::get_if<Node>(&a.value)) return c;
  return nullptr;
}

const Literal* named_literal(const Node& n, std::string_view key) {
  for (const auto& a : n.args)
    if (a.key == key)
      if (const auto* l = std::get_if<Literal>(&a.value)) return l;
  return nullptr;
}

int to_int(const Literal& l) {
  int v = 0;
  std::from_chars(l.text.data(), l.text.data() + l.text.size(), v);
  return v;
}

const Node& first_child(const Node& n) {
  auto c = children(n);
  if (c.empty()) unsupported(n, "'" + n.head + "' needs an argument");
  return *c.front();
}

struct Compiler {
  CompiledGame game;

  BoardGraph shape(const Node& n, double rotation) {
    const auto lits = literals(n);
    if (n.head == "rotate") return shape(first_child(n), rotation + to_int(*lits.at(0)));
    const int size = to_int(*lits.at(0));
    if (n.head == "square") return BoardGraph::square(size, rotation);
    if (n.head == "hex") return BoardGraph::hex(size, rotation);
    unsupported(n, "unknown board shape '" + n.head + "'");
  }

  SiteRef site(const Node& n) {
    if (n.head == "to") return SiteRef::To;
    if (n.head == "from") return SiteRef::From;
    if (n.head == "between") return SiteRef::Between;
    if (n.head == "last") return gdl::leading_ident(n) == "From" ? SiteRef::LastFrom : SiteRef::LastTo;
    unsupported(n, "unknown site '" + n.head + "'");
  }

  RegionExpr region(const Node& n) {
    RegionExpr r;
    if (n.head == "expand") {
      r.kind = RegionKind::Expand;
      r.inner.push_back(region(first_child(n)));
      if (const Literal* steps = named_literal(n, "steps")) r.steps = to_int(*steps);
      return r;
    }
    const std::string_view v = gdl::leading_ident(n);
    static const std::pair<std::string_view, RegionKind> kinds[] = {
        {"Empty", RegionKind::Empty},   {"Board", RegionKind::Board},     {"Top", RegionKind::Top},
        {"Bottom", RegionKind::Bottom}, {"Left", RegionKind::Left},       {"Right", RegionKind::Right},
        {"Corners", RegionKind::Corners}, {"Mover", RegionKind::Mover}, {"Next", RegionKind::Next},
        {"Around", RegionKind::Around}};
    for (auto [name, kind] : kinds)
      if (name == v) r.kind = kind;
    if (r.kind == RegionKind::Around) r.site = site(first_child(n));
    return r;
  }

  Condition condition(const Node& n) {
    Condition c;
    const auto lits = literals(n);
    const std::string_view v = gdl::leading_ident(n);
    auto axes_at = [&](std::size_t i) {
      return lits.size() > i ? dir_class_from(lits[i]->text) : DirClass::Adjacent;
    };
    if (n.head == "is") {
      if (v == "Line") {
        c.kind = CondKind::Line;
        c.n = to_int(*lits.at(1));
        c.dirs = axes_at(2);
      } else if (v == "Connected") {
        c.kind = CondKind::Connected;
        c.n = to_int(*lits.at(1));
        const std::string_view t = lits.at(2)->text;
        c.target = t == "SidesNoCorners" ? ConnectTarget::SidesNoCorners
                   : t == "Corners"      ? ConnectTarget::Corners
                   : t == "Sides"        ? ConnectTarget::Sides
                                         : ConnectTarget::Regions;
        c.dirs = axes_at(3);
      } else if (v == "In") {
        c.kind = CondKind::In;
        const auto kids = children(n);
        c.site = site(*kids.at(0));
        c.region = region(*kids.at(1));
      } else if (v == "Empty" || v == "Occupied") {
        c.kind = v == "Empty" ? CondKind::Empty : CondKind::Occupied;
        c.site = site(first_child(n));
      } else if (v == "Enemy" || v == "Friend") {
        c.kind = v == "Enemy" ? CondKind::Enemy : CondKind::Friend;
        const Node& who = first_child(n);
        const Node* at = named(who, "at");
        if (at == nullptr) unsupported(who, "'who' needs an at: site");
        c.site = site(*at);
      } else {
        unsupported(n, "unsupported condition 'is " + std::string(v) + "'");
      }
    } else if (n.head == "no") {
      c.kind = CondKind::NoMoves;
      c.role = lits.at(1)->text == "Mover" ? Role::Mover : Role::Next;
    } else if (n.head == "not" || n.head == "and" || n.head == "or") {
      c.kind = n.head == "not" ? CondKind::Not : n.head == "and" ? CondKind::And : CondKind::Or;
      for (const Node* k : children(n)) c.children.push_back(condition(*k));
    } else {
      unsupported(n, "unsupported condition '" + n.head + "'");
    }
    return c;
  }

  Clause clause(const Node& n) {
    Clause cl;
    if (const Node* cond = named(n, "if")) cl.condition = condition(*cond);
    if (const Node* apply = child(n, "apply")) {
      const Node& action = first_child(*apply);
      const SiteRef target = site(first_child(action));
      if (target == SiteRef::From) unsupported(action, "removing the moving piece is not supported");
      cl.removals.push_back(target);
    }
    return cl;
  }

  int effect(const Node& then) {
    const Node& enc = first_child(then);
    Enclose e;
    const Node* origin = child(enc, "from");
    if (origin == nullptr) unsupported(enc, "enclose needs an origin");
    e.origin = site(first_child(*origin));
    const auto lits = literals(enc);
    if (!lits.empty()) e.dirs = dir_class_from(lits[0]->text);
    if (const Node* b = child(enc, "between")) e.between = clause(*b);
    game.effects.push_back(std::move(e));
    if (game.effects.size() > 127) unsupported(then, "too many effects");
    return static_cast<int>(game.effects.size()) - 1;
  }

  MoveRule moves(const Node& n, bool in_piece) {
    MoveRule m;
    if (n.head == "forEach") {
      if (in_piece) unsupported(n, "forEach Piece inside a piece program");
      m.kind = RuleKind::ForEachPiece;
      return m;
    }
    if (n.head == "or") {
      m.kind = RuleKind::Or;
      game.needs_dedupe = true;
      for (const Node* k : children(n)) m.children.push_back(moves(*k, in_piece));
      return m;
    }
    const std::string_view v = gdl::leading_ident(n);
    if (v == "Add") {
      m.kind = RuleKind::Add;
      if (in_piece) game.needs_dedupe = true;
      const Node* to = child(n, "to");
      if (to == nullptr) unsupported(n, "Add needs a destination");
      m.add_region = region(first_child(*to));
      if (const Node* cond = named(*to, "if")) m.add_condition = condition(*cond);
    } else {
      m.kind = v == "Step" ? RuleKind::Step : v == "Slide" ? RuleKind::Slide : RuleKind::Hop;
      const auto lits = literals(n);
      if (lits.size() > 1) m.dirs = dir_class_from(lits[1]->text);
      if (const Node* to = child(n, "to")) m.to = clause(*to);
      if (const Node* b = child(n, "between")) m.between = clause(*b);
      if (m.kind == RuleKind::Step && !m.between.removals.empty()) unsupported(n, "Step has no between site");
    }
    if (const Node* then = child(n, "then")) m.effect = effect(*then);
    return m;
  }

  void piece(const Node& n) {
    const auto lits = literals(n);
    const std::string& name = lits.at(0)->text;
    const std::string& owner = lits.at(1)->text;
    std::optional<MoveRule> program;
    if (const auto kids = children(n); !kids.empty()) program = moves(*kids.front(), true);
    for (int p = 1; p <= 2; ++p) {
      if ((owner == "P1" && p != 1) || (owner == "P2" && p != 2)) continue;
      for (const PieceType& t : game.pieces)
        if (t.name == name && t.owner == p) unsupported(n, "piece '" + name + "' declared twice");
      game.pieces.push_back({name, p, program});
    }
    if (game.pieces.size() > 64) unsupported(n, "too many piece types");
  }

  void run(const gdl::GameTree& tree) {
    const Node& root = tree.root;
    game.name = literals(root).at(0)->text;
    const Node* players = child(root, "players");
    game.players = to_int(*literals(*players).at(0));
    if (game.players != 2) unsupported(*players, "only two-player games are supported");

    const Node* equipment = child(root, "equipment");
    const auto items = children(*equipment);
    for (const Node* item : items)
      if (item->head == "board") game.board = shape(first_child(*item), 0);
    for (const Node* item : items)
      if (item->head == "piece") piece(*item);
    for (int p = 1; p <= 2; ++p)
      for (std::size_t i = 0; i < game.pieces.size(); ++i)
        if (game.pieces[i].owner == p) {
          game.add_piece[p] = static_cast<int>(i);
          break;
        }

    const GameState blank;
    for (const Node* item : items) {
      if (item->head != "regions") continue;
      const int p = literals(*item).at(0)->text == "P1" ? 1 : 2;
      const SiteSet r = static_region(game, blank, region(first_child(*item)), p);
      game.regions[p].push_back(r);
      game.region_union[p] |= r;
    }

    const Node* rules = child(root, "rules");
    if (const Node* meta = child(*rules, "meta")) {
      (void)meta;
      game.no_repeat = true;
    }
    if (const Node* start = child(*rules, "start")) {
      for (const Node* place : children(*start)) {
        const std::string& ref = literals(*place).at(0)->text;
        const auto type = game.piece_by_ref(ref);
        if (!type) unsupported(*place, "start rule places unknown piece '" + ref + "'");
        game.start.push_back({*type, region(first_child(*place))});
      }
    }
    game.play = moves(first_child(*child(*rules, "play")), false);

    for (const Node* rule : children(*child(*rules, "end"))) {
      const auto kids = children(*rule);
      EndRule e;
      e.condition = condition(*kids.at(0));
      const auto res = literals(*kids.at(1));
      e.who = res.at(0)->text == "Mover" ? Role::Mover : Role::Next;
      const std::string& r = res.at(1)->text;
      e.result = r == "Win" ? Result::Win : r == "Loss" ? Result::Loss : Result::Draw;
      game.end.push_back(std::move(e));
    }
  }
};

}  // namespace

std::optional<int> CompiledGame::piece_by_ref(std::string_view ref) const {
  if (!ref.empty() && (ref.back() == '1' || ref.back() == '2')) {
    const int owner = ref.back() - '0';
    const std::string_view base = ref.substr(0, ref.size() - 1);
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (pieces[i].name == base && pieces[i].owner == owner) return static_cast<int>(i);
  }
  std::optional<int> found;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].name != ref) continue;
    if (found) return std::nullopt;  // ambiguous without an owner suffix
    found = static_cast<int>(i);
  }
  return found;
}

CompiledGame compile(const gdl::GameTree& tree) {
  const auto report = gdl::validate(tree, gdl::default_grammar());
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error(Errc::UnsupportedConstruct, v.message, v.span.begin);
  }
  Compiler c;
  c.run(tree);
  return std::move(c.game);
}

}  // namespace gavel::engine
