#include "gavel/agents/agents.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "gavel/common/error.hpp"

namespace gavel::agents {

using engine::CompiledGame;
using engine::GameState;
using engine::Move;

namespace {

bool limit_reached(const GameState& s, int limit) {
  return limit > 0 && (s.move_count[1] >= limit || s.move_count[2] >= limit);
}

/// Winner of a finished rollout, 0 for draws and truncations.
int rollout(const CompiledGame& game, GameState& s, int limit, Rng& rng) {
  const int cap = 2 * limit;
  for (int ply = 0; !s.terminal; ++ply) {
    if (limit_reached(s, limit) || (cap > 0 && ply >= cap)) return 0;
    engine::advance(game, s, s.legal[rng.below(s.legal.size())]);
  }
  return s.terminal->winner;
}

double reward(int winner, int player) { return winner == 0 ? 0.5 : winner == player ? 1.0 : 0.0; }

struct TreeNode {
  GameState state;
  int parent = -1;
  int move_index = -1;  // index into the parent's legal list
  std::vector<int> children;
  std::size_t untried = 0;  // moves [0, untried) of `order` not yet expanded
  std::vector<int> order;
  int visits = 0;
  double value = 0;  // from the perspective of the parent's mover
  bool final = false;
};

}  // namespace

void AgentConfig::check() const {
  if (iterations < 1 && think_time <= 0) throw Error(Errc::InvalidParams, "agent budget must be positive");
  if (exploration_c < 0) throw Error(Errc::InvalidParams, "exploration constant must be >= 0");
}

Move random_move(const CompiledGame&, const GameState& state, Rng& rng) {
  if (state.terminal || state.legal.empty()) throw Error(Errc::NoLegalMoves, "no legal moves");
  return state.legal[rng.below(state.legal.size())];
}

SearchStats mcts_search(const CompiledGame& game, const GameState& root_state, const AgentConfig& config, Rng& rng) {
  config.check();
  if (root_state.terminal || root_state.legal.empty()) throw Error(Errc::NoLegalMoves, "no legal moves");
  const int limit = config.move_limit;

  std::vector<TreeNode> tree;
  tree.reserve(config.think_time > 0 ? 1024 : static_cast<std::size_t>(config.iterations) + 1);
  auto make_node = [&](GameState&& s, int parent, int move_index) {
    TreeNode n;
    n.state = std::move(s);
    n.parent = parent;
    n.move_index = move_index;
    n.final = n.state.terminal.has_value() || limit_reached(n.state, limit);
    if (!n.final) {
      n.order.resize(n.state.legal.size());
      for (std::size_t i = 0; i < n.order.size(); ++i) n.order[i] = static_cast<int>(i);
      n.untried = n.order.size();
    }
    tree.push_back(std::move(n));
    return static_cast<int>(tree.size()) - 1;
  };
  make_node(GameState(root_state), -1, -1);

  const auto start = std::chrono::steady_clock::now();
  auto out_of_budget = [&](int done) {
    if (config.think_time > 0)
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >= config.think_time;
    return done >= config.iterations;
  };

  int done = 0;
  for (; !out_of_budget(done); ++done) {
    int node = 0;
    // Selection
    while (!tree[node].final && tree[node].untried == 0) {
      const TreeNode& n = tree[node];
      const double log_n = std::log(static_cast<double>(n.visits));
      int best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int c : n.children) {
        const TreeNode& ch = tree[c];
        const double score = ch.value / ch.visits + config.exploration_c * std::sqrt(log_n / ch.visits);
        if (score > best_score) {
          best_score = score;
          best = c;
        }
      }
      node = best;
    }
    // Expansion
    if (!tree[node].final) {
      TreeNode& n = tree[node];
      const std::size_t pick = rng.below(n.untried);
      std::swap(n.order[pick], n.order[n.untried - 1]);
      const int mi = n.order[--n.untried];
      GameState next = n.state;
      engine::advance(game, next, n.state.legal[mi]);
      const int child = make_node(std::move(next), node, mi);
      tree[node].children.push_back(child);
      node = child;
    }
    // Simulation
    int winner;
    if (tree[node].state.terminal) {
      winner = tree[node].state.terminal->winner;
    } else if (tree[node].final) {
      winner = 0;
    } else {
      GameState s = tree[node].state;
      winner = rollout(game, s, limit, rng);
    }
    // Backpropagation
    for (int x = node; x >= 0; x = tree[x].parent) {
      TreeNode& n = tree[x];
      n.visits++;
      if (n.parent >= 0) n.value += reward(winner, tree[n.parent].state.mover);
    }
  }

  SearchStats stats;
  stats.iterations = done;
  for (int c : tree[0].children) {
    stats.moves.push_back(root_state.legal[tree[c].move_index]);
    stats.visits.push_back(tree[c].visits);
    stats.mean_value.push_back(tree[c].value / tree[c].visits);
  }
  return stats;
}

Move mcts_move(const CompiledGame& game, const GameState& state, const AgentConfig& config, Rng& rng) {
  const SearchStats stats = mcts_search(game, state, config, rng);
  if (stats.moves.empty()) return state.legal.front();
  // Most visited; ties go to the earliest move in legal order.
  std::size_t best = 0;
  auto legal_index = [&](std::size_t i) {
    return std::find(state.legal.begin(), state.legal.end(), stats.moves[i]) - state.legal.begin();
  };
  for (std::size_t i = 1; i < stats.moves.size(); ++i) {
    if (stats.visits[i] > stats.visits[best] ||
        (stats.visits[i] == stats.visits[best] && legal_index(i) < legal_index(best)))
      best = i;
  }
  return stats.moves[best];
}

Move choose_move(const CompiledGame& game, const GameState& state, const AgentConfig& config, Rng& rng) {
  if (config.kind == AgentConfig::Kind::Random) return random_move(game, state, rng);
  return mcts_move(game, state, config, rng);
}

double MatchTrace::coverage() const {
  if (board_sites <= 0) return 0;
  int total = initial_occupied;
  for (const TurnRecord& t : turns) total += t.occupied_delta;
  return static_cast<double>(total) / board_sites;
}

MatchTrace play_match(const CompiledGame& game, const std::array<AgentConfig, 2>& agents, int move_limit, Rng& rng) {
  return play_match(game, engine::initial_state(game), agents, move_limit, rng);
}

MatchTrace play_match(const CompiledGame& game, const GameState& start, const std::array<AgentConfig, 2>& agents,
                      int move_limit, Rng& rng) {
  MatchTrace trace;
  trace.board_sites = game.board.size();
  GameState s = start;
  engine::SiteSet ever = s.occupied[0];
  trace.initial_occupied = ever.count();
  while (!s.terminal) {
    if (limit_reached(s, move_limit)) {
      trace.outcome = engine::Outcome{0, engine::Outcome::Reason::MoveLimit, -1};
      break;
    }
    AgentConfig agent = agents[s.mover - 1];
    agent.move_limit = move_limit;
    TurnRecord turn;
    turn.player = s.mover;
    turn.legal_count = static_cast<int>(s.legal.size());
    turn.move = choose_move(game, s, agent, rng);
    const int before = s.occupied[0].count() + (turn.move.kind == engine::MoveKind::Add ? 1 : 0);
    engine::advance(game, s, turn.move);
    turn.removed = std::max(0, before - s.occupied[0].count());
    engine::SiteSet fresh = s.occupied[0];
    fresh.subtract(ever);
    turn.occupied_delta = fresh.count();
    ever |= fresh;
    trace.turns.push_back(turn);
  }
  if (s.terminal) trace.outcome = *s.terminal;
  trace.move_counts = s.move_count;
  return trace;
}

}  // namespace gavel::agents
