#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gavel/engine/board.hpp"
#include "gavel/gdl/tree.hpp"

namespace gavel::engine {

enum class SiteRef : std::uint8_t { To, From, Between, LastTo, LastFrom };

enum class RegionKind : std::uint8_t {
  Empty,
  Board,
  Top,
  Bottom,
  Left,
  Right,
  Corners,
  Mover,
  Next,
  Around,
  Expand,
};

struct RegionExpr {
  RegionKind kind = RegionKind::Board;
  SiteRef site = SiteRef::To;  // Around
  int steps = 1;               // Expand
  std::vector<RegionExpr> inner;  // Expand: exactly one
};

enum class CondKind : std::uint8_t {
  Line,
  Connected,
  In,
  Empty,
  Occupied,
  Enemy,
  Friend,
  NoMoves,
  Not,
  And,
  Or,
};

enum class ConnectTarget : std::uint8_t { SidesNoCorners, Corners, Sides, Regions };
enum class Role : std::uint8_t { Mover, Next };

struct Condition {
  CondKind kind = CondKind::Empty;
  int n = 0;                            // Line length / Connected count
  DirClass dirs = DirClass::Adjacent;   // Line, Connected
  ConnectTarget target = ConnectTarget::Sides;
  SiteRef site = SiteRef::To;
  RegionExpr region;                    // In
  Role role = Role::Next;               // NoMoves
  std::vector<Condition> children;      // Not / And / Or
};

/// `(to ...)` or `(between ...)` clause of a move rule.
struct Clause {
  std::optional<Condition> condition;
  std::vector<SiteRef> removals;
};

/// `(enclose (from site) Axes (between ...))`.
struct Enclose {
  SiteRef origin = SiteRef::LastTo;
  DirClass dirs = DirClass::Adjacent;
  Clause between;
};

enum class RuleKind : std::uint8_t { Add, Step, Slide, Hop, ForEachPiece, Or };

struct MoveRule {
  RuleKind kind = RuleKind::Add;
  DirClass dirs = DirClass::Adjacent;
  RegionExpr add_region;
  std::optional<Condition> add_condition;
  Clause to;
  Clause between;
  int effect = -1;                 // index into CompiledGame::effects
  std::vector<MoveRule> children;  // Or
};

struct PieceType {
  std::string name;
  int owner = 1;
  std::optional<MoveRule> moves;
};

struct Placement {
  int piece = 0;
  RegionExpr region;
};

enum class Result : std::uint8_t { Win, Loss, Draw };

struct EndRule {
  Condition condition;
  Role who = Role::Mover;
  Result result = Result::Win;
};

struct CompiledGame {
  std::string name;
  int players = 2;
  BoardGraph board;
  std::vector<PieceType> pieces;
  std::vector<Placement> start;
  MoveRule play;
  std::vector<EndRule> end;
  bool no_repeat = false;
  /// Per player (index 1, 2): declared regions and their union.
  std::vector<SiteSet> regions[3];
  SiteSet region_union[3];
  /// Piece type placed by Add moves for each player, or -1.
  int add_piece[3] = {-1, -1, -1};
  std::vector<Enclose> effects;
  /// Set when several rules can yield the same move.
  bool needs_dedupe = false;

  /// Piece type index for a start-rule reference such as "Counter1".
  std::optional<int> piece_by_ref(std::string_view ref) const;
};

/// Translates a validated tree into executable rules. Throws
/// Error(UnsupportedConstruct) for trees outside the engine's semantics.
CompiledGame compile(const gdl::GameTree& tree);

}  // namespace gavel::engine
