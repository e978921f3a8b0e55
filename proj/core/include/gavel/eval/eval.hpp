#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "gavel/agents/agents.hpp"
#include "gavel/engine/engine.hpp"

namespace gavel::eval {

struct RandomEvalStats {
  int n = 0;
  double win_rate[3] = {0, 0, 0};  // [0] = draws, [1], [2] = players
  double balance_gate = 0;
  double agency_gate = 0;
  // Behaviour summaries reused for concept extraction.
  double mean_branching = 0;
  double mean_length = 0;  // plies per match
  double mean_coverage = 0;
  bool captures_observed = false;

  double draw_rate() const { return win_rate[0]; }
};

struct MetricVector {
  double balance = 0;
  double decisiveness = 0;
  double completion = 0;
  double agency = 0;
  double coverage = 0;
  double strategic_depth = 0;

  std::array<double, 6> values() const {
    return {balance, decisiveness, completion, agency, coverage, strategic_depth};
  }
  static constexpr std::array<std::string_view, 6> kNames = {"balance",  "decisiveness", "completion",
                                                             "agency",   "coverage",     "strategic_depth"};
};

enum class Stage : int { Uncompilable = -3, Unplayable = -2, Gated = -1, Scored = 0 };

std::string_view to_string(Stage stage) noexcept;

struct Fitness {
  double value = -3;
  Stage stage = Stage::Uncompilable;
  std::optional<MetricVector> metrics;
  std::optional<RandomEvalStats> stats;
  std::string detail;    // failure reason for non-scored stages
  int mcts_matches = 0;  // MCTS matches actually played
};

struct EvalParams {
  int random_playouts = 100;
  int mcts_playouts = 10;
  int move_limit = 50;
  agents::AgentConfig mcts = agents::AgentConfig::mcts(1000);
  double balance_threshold = 0.5;
  double agency_threshold = 0.5;
  std::uint64_t seed = 0;
  /// Stop after the gates; a passing game is reported as Scored with value 0
  /// and no metrics.
  bool gates_only = false;
};

RandomEvalStats random_eval(const engine::CompiledGame& game, int n, int move_limit, std::uint64_t seed);

/// Metrics from n MCTS-vs-MCTS matches; strategic_depth is left at 0.
MetricVector mcts_eval(const engine::CompiledGame& game, int n, const agents::AgentConfig& budget, int move_limit,
                       std::uint64_t seed, int* matches_played = nullptr);

/// Fraction of n MCTS-vs-random matches won by MCTS, alternating seats.
double strategic_depth(const engine::CompiledGame& game, int n, const agents::AgentConfig& budget, int move_limit,
                       std::uint64_t seed);

/// k / sum(1 / max(v, 0.01)). Throws Error(EmptyInput) for an empty list.
double hmean_floored(std::span<const double> values);

Fitness evaluate(std::string_view source, const EvalParams& params);
Fitness evaluate(const engine::CompiledGame& game, const EvalParams& params);

}  // namespace gavel::eval
