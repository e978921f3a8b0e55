#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gavel/engine/game.hpp"
#include "gavel/engine/state.hpp"

namespace gavel::engine {

/// Applies the start rules. Throws Error(PlacementConflict) when two
/// placements target one site.
GameState initial_state(const CompiledGame& game);

/// Legal moves of the player to move (cached on the state).
const std::vector<Move>& legal_moves(const CompiledGame& game, const GameState& state);

/// Returns the successor state. Throws Error(IllegalMove) unless `move` is in
/// legal_moves(game, state).
GameState apply(const CompiledGame& game, const GameState& state, const Move& move);

/// In-place apply for moves taken from state.legal (no membership check).
void advance(const CompiledGame& game, GameState& state, const Move& move);

/// End rules evaluated for the player who made the last move.
std::optional<Outcome> outcome(const CompiledGame& game, const GameState& state);

inline std::uint64_t position_hash(const GameState& state) noexcept { return state.hash; }

// Lower-level access, mainly for tools and tests ---------------------------

std::uint64_t zobrist_piece(int site, int piece, int owner) noexcept;
std::uint64_t zobrist_mover(int player) noexcept;

/// Writes a cell (piece = -1 clears it), keeping occupancy and hash current.
void set_site(const CompiledGame& game, GameState& state, int site, int piece);

/// Rebuilds hash, resets history to the current position and recomputes the
/// legal-move cache and terminal flag, for hand-built positions.
void refresh(const CompiledGame& game, GameState& state);

/// Move generation for `player` without using the cache.
std::vector<Move> generate_moves(const CompiledGame& game, const GameState& state, int player);

/// Longest run of `player` pieces through `site` along the axes of `dirs`.
int line_length(const CompiledGame& game, const GameState& state, int player, int site, DirClass dirs);

/// Whether `player` has a run of at least n. through >= 0 restricts the check
/// to lines through that site; otherwise the whole board is scanned.
bool has_line(const CompiledGame& game, const GameState& state, int player, int n, DirClass dirs, int through = -1);

/// Whether some connected group of `player` touches at least k of the target
/// regions.
bool is_connected(const CompiledGame& game, const GameState& state, int player, int k, ConnectTarget target,
                  DirClass dirs = DirClass::Adjacent);

/// Region value with no move context (used for start rules and declarations).
SiteSet static_region(const CompiledGame& game, const GameState& state, const RegionExpr& region, int player);

}  // namespace gavel::engine
