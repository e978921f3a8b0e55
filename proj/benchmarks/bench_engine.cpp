#include <benchmark/benchmark.h>

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "gavel/agents/agents.hpp"
#include "gavel/engine/engine.hpp"
#include "gavel/eval/eval.hpp"
#include "gavel/gdl/parser.hpp"

using namespace gavel;

namespace {

std::string source(const std::string& name) {
  std::ifstream in(std::string(GAVEL_CORPUS_DIR) + "/" + name + ".lud");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const engine::CompiledGame& game(const std::string& name) {
  static std::map<std::string, engine::CompiledGame> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, engine::compile(gdl::parse_game(source(name)))).first;
  return it->second;
}

const char* const kGames[] = {"tictactoe", "havabu", "yavago", "hopthrough"};

void BM_Parse(benchmark::State& st) {
  const auto text = source(kGames[st.range(0)]);
  for (auto _ : st) benchmark::DoNotOptimize(gdl::parse_game(text));
  st.SetLabel(kGames[st.range(0)]);
}
BENCHMARK(BM_Parse)->DenseRange(0, 3);

void BM_RandomPlayout(benchmark::State& st) {
  const auto& g = game(kGames[st.range(0)]);
  Rng rng(1);
  long plies = 0;
  for (auto _ : st) {
    const auto trace = agents::play_match(g, {agents::AgentConfig::random(), agents::AgentConfig::random()}, 50, rng);
    plies += static_cast<long>(trace.turns.size());
  }
  st.counters["plies/s"] = benchmark::Counter(static_cast<double>(plies), benchmark::Counter::kIsRate);
  st.SetLabel(kGames[st.range(0)]);
}
BENCHMARK(BM_RandomPlayout)->DenseRange(0, 3);

void BM_MctsMove(benchmark::State& st) {
  const auto& g = game(kGames[st.range(0)]);
  const auto start = engine::initial_state(g);
  auto cfg = agents::AgentConfig::mcts(static_cast<int>(st.range(1)));
  Rng rng(2);
  for (auto _ : st) benchmark::DoNotOptimize(agents::mcts_move(g, start, cfg, rng));
  st.SetLabel(kGames[st.range(0)]);
}
BENCHMARK(BM_MctsMove)->ArgsProduct({{0, 1, 2, 3}, {100, 1000}})->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& st) {
  const auto text = source("havabu");
  eval::EvalParams p;
  p.mcts_playouts = 4;
  p.mcts = agents::AgentConfig::mcts(50);
  p.seed = 1;
  for (auto _ : st) benchmark::DoNotOptimize(eval::evaluate(text, p));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
