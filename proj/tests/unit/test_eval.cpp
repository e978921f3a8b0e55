#include <gtest/gtest.h>

#include "gavel/common/error.hpp"
#include "gavel/common/rng.hpp"
#include "gavel/eval/eval.hpp"
#include "support/gate_battery.hpp"
#include "support/support.hpp"

using namespace gavel;
using namespace gavel::eval;
using gavel::test::add_game;
using gavel::test::compile_corpus;
using gavel::test::compile_text;

namespace {

const std::string kFirstMoveWins =
    add_game("(square 3)", "(to (sites Empty))", "(if (is In (last To) (sites Board)) (result Mover Win))");
// A diamond has a single top site, so the only move fills it and play stops.
const std::string kSingleSite =
    add_game("(rotate 45 (square 2))", "(to (sites Top))", "(if (is Line 3) (result Mover Win))");
// Player 1's only move decides: top row wins for them, bottom row for player 2.
const std::string kCoinFlip =
    "(game \"T\" (players 2) (equipment { (board (square 2)) (piece \"Disc\" Each) })"
    " (rules (play (move Add (to (sites Empty))))"
    " (end { (if (is In (last To) (sites Top)) (result Mover Win))"
    "        (if (is In (last To) (sites Bottom)) (result Mover Loss)) })))";

}  // namespace

// ---------------------------------------------------------------- hmean

TEST(HMean, Examples) {
  const std::vector<double> ones(6, 1.0), halves(6, 0.5);
  const std::vector<double> one_zero = {1, 1, 1, 1, 1, 0};
  EXPECT_DOUBLE_EQ(hmean_floored(ones), 1.0);
  EXPECT_NEAR(hmean_floored(one_zero), 6.0 / 105.0, 1e-12);
  EXPECT_DOUBLE_EQ(hmean_floored(halves), 0.5);
}

TEST(HMean, EmptyInput) {
  try {
    hmean_floored({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyInput);
  }
}

TEST(HMean, BoundedAndMonotone) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(6);
    for (auto& x : v) x = rng.chance(0.2) ? 0.0 : rng.uniform();
    const double h = hmean_floored(v);
    double lo = 1, hi = 0;
    for (double x : v) {
      lo = std::min(lo, std::max(x, 0.01));
      hi = std::max(hi, std::max(x, 0.01));
    }
    // A mean lies between the smallest and largest floored value.
    EXPECT_GE(h, lo - 1e-15);
    EXPECT_LE(h, hi + 1e-15);
    EXPECT_GE(h, 0.01);
    EXPECT_LE(h, 1.0);
    // Raising any one coordinate never lowers the mean.
    auto w = v;
    const std::size_t i = rng.below(w.size());
    w[i] = std::min(1.0, w[i] + rng.uniform() * (1 - w[i]));
    EXPECT_GE(hmean_floored(w), h);
  }
}

// ---------------------------------------------------------------- random_eval

TEST(RandomEval, FirstMoveWinHasZeroBalance) {
  const auto st = random_eval(compile_text(kFirstMoveWins), 100, 50, 1);
  EXPECT_DOUBLE_EQ(st.win_rate[1], 1.0);
  EXPECT_DOUBLE_EQ(st.balance_gate, 0.0);
  EXPECT_DOUBLE_EQ(st.agency_gate, 1.0);
}

TEST(RandomEval, SingleChoiceHasZeroAgency) {
  const auto st = random_eval(compile_text(kSingleSite), 100, 50, 1);
  EXPECT_DOUBLE_EQ(st.agency_gate, 0.0);
  EXPECT_DOUBLE_EQ(st.draw_rate(), 1.0);
}

TEST(RandomEval, CoinFlipIsBalanced) {
  const auto st = random_eval(compile_text(kCoinFlip), 100, 50, 1);
  EXPECT_NEAR(st.balance_gate, 1.0, 0.1);
  EXPECT_NEAR(st.win_rate[1] + st.win_rate[2] + st.draw_rate(), 1.0, 1e-12);
}

TEST(RandomEval, HavabuCoverageIsLengthOverSites) {
  // Add-only: each ply fills exactly one new site.
  const auto st = random_eval(compile_corpus("havabu"), 50, 50, 3);
  EXPECT_NEAR(st.mean_coverage, st.mean_length / 64.0, 1e-12);
}

// ---------------------------------------------------------------- mcts_eval

TEST(MctsEval, MetricDefinitionsOnFixedOutcomes) {
  const auto budget = agents::AgentConfig::mcts(20);
  const auto win = mcts_eval(compile_text(kFirstMoveWins), 10, budget, 50, 1);
  EXPECT_DOUBLE_EQ(win.balance, 0.0);
  EXPECT_DOUBLE_EQ(win.decisiveness, 1.0);
  EXPECT_DOUBLE_EQ(win.completion, 1.0);
  EXPECT_DOUBLE_EQ(win.agency, 1.0);
  EXPECT_DOUBLE_EQ(win.coverage, 1.0 / 9.0);

  const auto stuck = mcts_eval(compile_text(kSingleSite), 10, budget, 50, 1);
  EXPECT_DOUBLE_EQ(stuck.balance, 1.0);
  EXPECT_DOUBLE_EQ(stuck.decisiveness, 0.0);
  EXPECT_DOUBLE_EQ(stuck.completion, 0.0);  // no-moves default is not an end rule
  EXPECT_DOUBLE_EQ(stuck.agency, 0.0);
  EXPECT_DOUBLE_EQ(stuck.coverage, 0.25);
}

TEST(MctsEval, MoveLimitTruncationIsNotCompletion) {
  int played = 0;
  const auto m = mcts_eval(compile_corpus("havabu"), 4, agents::AgentConfig::mcts(10), 1, 2, &played);
  EXPECT_EQ(played, 4);
  EXPECT_DOUBLE_EQ(m.decisiveness, 0.0);
  EXPECT_DOUBLE_EQ(m.completion, 0.0);
  EXPECT_DOUBLE_EQ(m.balance, 1.0);
  EXPECT_DOUBLE_EQ(m.coverage, 1.0 / 64.0);  // stops once either side has moved once
}

TEST(MctsEval, HavabuCoverageMatchesMatchLength) {
  const auto g = compile_corpus("havabu");
  const auto m = mcts_eval(g, 1, agents::AgentConfig::mcts(20), 50, 9);
  const double plies = m.coverage * 64;
  EXPECT_NEAR(plies, std::round(plies), 1e-9);
  EXPECT_GE(plies, 2);
}

TEST(StrategicDepth, SeatDecidedGameIsOneHalf) {
  EXPECT_DOUBLE_EQ(strategic_depth(compile_text(kFirstMoveWins), 10, agents::AgentConfig::mcts(20), 50, 1), 0.5);
}

TEST(StrategicDepth, TicTacToeRewardsSearch) {
  EXPECT_GE(strategic_depth(compile_corpus("tictactoe"), 10, agents::AgentConfig::mcts(1000), 50, 4), 0.8);
}

// ---------------------------------------------------------------- evaluate

TEST(Evaluate, GateBatteryStages) {
  for (const auto& c : test::gate_battery()) {
    SCOPED_TRACE(c.name);
    const auto f = evaluate(c.source, test::battery_params());
    EXPECT_EQ(f.stage, c.expected) << f.detail;
    if (f.stage == Stage::Scored) {
      ASSERT_TRUE(f.metrics);
      EXPECT_GE(f.value, 0.01);
      EXPECT_LE(f.value, 1.0);
      for (double v : f.metrics->values()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    } else {
      EXPECT_EQ(f.value, static_cast<double>(static_cast<int>(f.stage)));
      EXPECT_EQ(f.mcts_matches, 0);  // expensive stage never reached
    }
    if (f.stage == Stage::Gated) {
      ASSERT_TRUE(f.stats);
      EXPECT_TRUE(f.stats->balance_gate < 0.5 || f.stats->agency_gate < 0.5);
    }
  }
}

TEST(Evaluate, BatteryCoversEveryStage) {
  int per_stage[4] = {};
  for (const auto& c : test::gate_battery()) per_stage[static_cast<int>(c.expected) + 3]++;
  EXPECT_GE(test::gate_battery().size(), 12u);
  for (int n : per_stage) EXPECT_GE(n, 2);
}

TEST(Evaluate, Reproducible) {
  const auto src = test::corpus_source("tictactoe");
  const auto a = evaluate(src, test::battery_params()), b = evaluate(src, test::battery_params());
  EXPECT_EQ(a.value, b.value);
  ASSERT_TRUE(a.metrics && b.metrics);
  EXPECT_EQ(a.metrics->values(), b.metrics->values());
  EXPECT_EQ(a.stats->win_rate[1], b.stats->win_rate[1]);
}

TEST(Evaluate, GatesOnlyStopsBeforeSearch) {
  auto p = test::battery_params();
  p.gates_only = true;
  const auto f = evaluate(test::corpus_source("tictactoe"), p);
  EXPECT_EQ(f.stage, Stage::Scored);
  EXPECT_EQ(f.mcts_matches, 0);
  EXPECT_FALSE(f.metrics);
}
