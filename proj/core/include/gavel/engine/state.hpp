#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gavel/engine/site_set.hpp"

namespace gavel::engine {

enum class MoveKind : std::uint8_t { Add, Step, Slide, Hop };

std::string_view to_string(MoveKind kind) noexcept;

struct Move {
  MoveKind kind = MoveKind::Add;
  std::int16_t from = -1;  // -1 for Add
  std::int16_t to = -1;
  std::int16_t piece = -1;  // piece type placed (Add) or moved
  std::array<std::int16_t, 2> captures{-1, -1};  // removals from to/between clauses
  std::int8_t effect = -1;  // `then` effect of the generating rule

  /// Moves are identified by kind and endpoints.
  friend bool operator==(const Move& a, const Move& b) noexcept {
    return a.kind == b.kind && a.from == b.from && a.to == b.to;
  }
};

std::string to_string(const Move& move);

struct Outcome {
  enum class Reason : std::uint8_t { EndRule, MoveLimit, NoMovesDefault };
  int winner = 0;  // 0 = draw
  Reason reason = Reason::EndRule;
  int rule = -1;   // end-rule index when reason = EndRule

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

std::string_view to_string(Outcome::Reason reason) noexcept;

/// Position value. Cells hold 0 for empty or piece-type index + 1.
struct GameState {
  std::array<std::uint8_t, kMaxSites> cells{};
  SiteSet occupied[3];  // [1], [2] by owner; [0] = both
  int mover = 1;
  int last_to = -1;
  int last_from = -1;
  std::array<int, 3> move_count{};
  std::uint64_t hash = 0;
  std::vector<std::uint64_t> history;
  std::optional<Outcome> terminal;
  std::vector<Move> legal;  // cached legal moves of `mover`; empty when terminal

  int piece_at(int site) const noexcept { return static_cast<int>(cells[site]) - 1; }
  bool empty(int site) const noexcept { return cells[site] == 0; }
};

inline constexpr int other(int player) noexcept { return 3 - player; }

}  // namespace gavel::engine
