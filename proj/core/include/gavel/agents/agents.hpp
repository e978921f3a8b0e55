#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gavel/common/rng.hpp"
#include "gavel/engine/engine.hpp"

namespace gavel::agents {

struct AgentConfig {
  enum class Kind { Random, Mcts };
  Kind kind = Kind::Random;
  int iterations = 1000;
  double think_time = 0;  // seconds; > 0 switches to a wall-clock budget
  double exploration_c = std::sqrt(2.0);
  std::uint64_t rng_seed = 0;
  /// Per-player move limit of the match; rollouts stop there and after
  /// 2 * move_limit plies, scoring a draw.
  int move_limit = 50;

  static AgentConfig random() { return {}; }
  static AgentConfig mcts(int iterations) {
    AgentConfig c;
    c.kind = Kind::Mcts;
    c.iterations = iterations;
    return c;
  }
  void check() const;
};

engine::Move random_move(const engine::CompiledGame& game, const engine::GameState& state, Rng& rng);

engine::Move mcts_move(const engine::CompiledGame& game, const engine::GameState& state, const AgentConfig& config,
                       Rng& rng);

/// Root statistics of one search, for diagnostics and tests.
struct SearchStats {
  std::vector<engine::Move> moves;
  std::vector<int> visits;
  std::vector<double> mean_value;
  int iterations = 0;
};

SearchStats mcts_search(const engine::CompiledGame& game, const engine::GameState& state, const AgentConfig& config,
                        Rng& rng);

engine::Move choose_move(const engine::CompiledGame& game, const engine::GameState& state, const AgentConfig& config,
                         Rng& rng);

struct TurnRecord {
  int player = 1;
  engine::Move move;
  int legal_count = 0;
  int occupied_delta = 0;  // sites occupied for the first time after this move
  int removed = 0;         // pieces taken off the board by this move
};

struct MatchTrace {
  std::vector<TurnRecord> turns;
  engine::Outcome outcome;
  std::array<int, 3> move_counts{};
  int initial_occupied = 0;  // sites filled by the start rules
  int board_sites = 0;

  /// Fraction of sites occupied at least once.
  double coverage() const;
};

MatchTrace play_match(const engine::CompiledGame& game, const std::array<AgentConfig, 2>& agents, int move_limit,
                      Rng& rng);
MatchTrace play_match(const engine::CompiledGame& game, const engine::GameState& start,
                      const std::array<AgentConfig, 2>& agents, int move_limit, Rng& rng);

}  // namespace gavel::agents
