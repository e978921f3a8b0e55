#include "gavel/eval/eval.hpp"

#include <algorithm>
#include <cmath>

#include "gavel/common/error.hpp"
#include "gavel/gdl/parser.hpp"

namespace gavel::eval {

using agents::AgentConfig;
using engine::CompiledGame;

namespace {

// Seed streams keep the three playout families independent.
constexpr std::uint64_t kRandomStream = 0;
constexpr std::uint64_t kMctsStream = 1u << 20;
constexpr std::uint64_t kDepthStream = 2u << 20;

double agency_of(const agents::MatchTrace& t, int& turns) {
  int multi = 0;
  for (const auto& r : t.turns) multi += r.legal_count > 1 ? 1 : 0;
  turns += static_cast<int>(t.turns.size());
  return multi;
}

}  // namespace

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Uncompilable: return "uncompilable";
    case Stage::Unplayable: return "unplayable";
    case Stage::Gated: return "gated";
    case Stage::Scored: return "scored";
  }
  return "?";
}

RandomEvalStats random_eval(const CompiledGame& game, int n, int move_limit, std::uint64_t seed) {
  if (n < 1) throw Error(Errc::InvalidParams, "random_eval needs n >= 1");
  const engine::GameState start = engine::initial_state(game);
  RandomEvalStats st;
  st.n = n;
  int wins[3] = {0, 0, 0};
  int turns = 0;
  double multi = 0, legal_sum = 0, coverage = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, kRandomStream + i));
    const auto trace = agents::play_match(game, start, {AgentConfig::random(), AgentConfig::random()}, move_limit, rng);
    wins[trace.outcome.winner]++;
    multi += agency_of(trace, turns);
    for (const auto& r : trace.turns) {
      legal_sum += r.legal_count;
      if (r.removed > 0) st.captures_observed = true;
    }
    coverage += trace.coverage();
  }
  for (int p = 0; p < 3; ++p) st.win_rate[p] = static_cast<double>(wins[p]) / n;
  st.balance_gate = 1.0 - std::abs(st.win_rate[1] - st.win_rate[2]);
  st.agency_gate = turns > 0 ? multi / turns : 0.0;
  st.mean_branching = turns > 0 ? legal_sum / turns : 0.0;
  st.mean_length = static_cast<double>(turns) / n;
  st.mean_coverage = coverage / n;
  return st;
}

MetricVector mcts_eval(const CompiledGame& game, int n, const AgentConfig& budget, int move_limit, std::uint64_t seed,
                       int* matches_played) {
  if (n < 1) throw Error(Errc::InvalidParams, "mcts_eval needs n >= 1");
  const engine::GameState start = engine::initial_state(game);
  int wins[3] = {0, 0, 0};
  int completed = 0, turns = 0;
  double multi = 0, coverage = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, kMctsStream + i));
    const auto trace = agents::play_match(game, start, {budget, budget}, move_limit, rng);
    wins[trace.outcome.winner]++;
    if (trace.outcome.reason == engine::Outcome::Reason::EndRule) ++completed;
    multi += agency_of(trace, turns);
    coverage += trace.coverage();
    if (matches_played) ++*matches_played;
  }
  MetricVector m;
  m.balance = 1.0 - std::abs(wins[1] - wins[2]) / static_cast<double>(n);
  m.decisiveness = static_cast<double>(wins[1] + wins[2]) / n;
  m.completion = static_cast<double>(completed) / n;
  m.agency = turns > 0 ? multi / turns : 0.0;
  m.coverage = std::min(1.0, coverage / n);
  return m;
}

double strategic_depth(const CompiledGame& game, int n, const AgentConfig& budget, int move_limit,
                       std::uint64_t seed) {
  if (n < 1) throw Error(Errc::InvalidParams, "strategic_depth needs n >= 1");
  const engine::GameState start = engine::initial_state(game);
  int won = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, kDepthStream + i));
    const int seat = i % 2 == 0 ? 1 : 2;
    std::array<AgentConfig, 2> agents{AgentConfig::random(), AgentConfig::random()};
    agents[seat - 1] = budget;
    const auto trace = agents::play_match(game, start, agents, move_limit, rng);
    if (trace.outcome.winner == seat) ++won;
  }
  return static_cast<double>(won) / n;
}

double hmean_floored(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyInput, "harmonic mean of no values");
  double sum = 0;
  for (double v : values) sum += 1.0 / std::max(v, 0.01);
  return static_cast<double>(values.size()) / sum;
}

Fitness evaluate(const CompiledGame& game, const EvalParams& params) {
  Fitness f;
  try {
    const engine::GameState start = engine::initial_state(game);
    if (start.legal.empty()) {
      f.value = -2;
      f.stage = Stage::Unplayable;
      f.detail = "no legal move from the initial position";
      return f;
    }
  } catch (const Error& e) {
    f.value = -2;
    f.stage = Stage::Unplayable;
    f.detail = e.what();
    return f;
  }

  f.stats = random_eval(game, params.random_playouts, params.move_limit, params.seed);
  if (f.stats->balance_gate < params.balance_threshold || f.stats->agency_gate < params.agency_threshold) {
    f.value = -1;
    f.stage = Stage::Gated;
    f.detail = f.stats->balance_gate < params.balance_threshold ? "balance gate" : "agency gate";
    return f;
  }
  if (params.gates_only) {
    f.value = 0;
    f.stage = Stage::Scored;
    f.detail = "gates passed; scoring skipped";
    return f;
  }

  MetricVector m = mcts_eval(game, params.mcts_playouts, params.mcts, params.move_limit, params.seed, &f.mcts_matches);
  m.strategic_depth = strategic_depth(game, params.mcts_playouts, params.mcts, params.move_limit, params.seed);
  f.mcts_matches += params.mcts_playouts;
  const auto v = m.values();
  f.value = hmean_floored(v);
  f.stage = Stage::Scored;
  f.metrics = m;
  return f;
}

Fitness evaluate(std::string_view source, const EvalParams& params) {
  std::optional<CompiledGame> game;
  try {
    game = engine::compile(gdl::parse_game(source));
  } catch (const Error& e) {
    Fitness f;
    f.detail = e.what();
    return f;
  }
  return evaluate(*game, params);
}

}  // namespace gavel::eval
