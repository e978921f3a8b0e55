#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include <unistd.h>

#include "gavel/common/error.hpp"
#include "gavel/engine/engine.hpp"
#include "gavel/hub/config.hpp"
#include "gavel/hub/run.hpp"
#include "gavel/hub/service.hpp"
#include "json.hpp"
#include "support/support.hpp"

using namespace gavel;
using namespace gavel::hub;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gavel-hub-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

/// Whole-corpus run with a tiny evaluation budget.
RunConfig tiny_config(const fs::path& out, int steps) {
  RunConfig c;
  c.seeds = {test::corpus_dir()};
  c.corpus = test::corpus_dir();
  c.macros = test::corpus_dir() / "macros";
  c.steps = steps;
  c.j = 2;
  c.k = 2;
  c.eval.n_random = 10;
  c.eval.n_mcts = 2;
  c.eval.mcts_iterations = 10;
  c.eval.move_limit = 20;
  c.workers = 1;
  c.snapshot_every = 2;
  c.output = out;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<json> events_of(const fs::path& dir) {
  std::vector<json> out;
  std::ifstream in(dir / "events.jsonl");
  for (std::string line; std::getline(in, line);) out.push_back(json::parse(line));
  return out;
}

/// Cells and sources of a run's final archive.
std::vector<std::pair<concepts::CellCoord, std::string>> elites(const fs::path& dir) {
  std::vector<std::pair<concepts::CellCoord, std::string>> out;
  const auto loaded = load_run(dir);
  for (const auto& [cell, rec] : loaded.state.archive.cells()) out.emplace_back(cell, rec.source);
  return out;
}

json call(Service& svc, std::string_view method, std::string_view path, const json& body, int expect) {
  const auto res = svc.handle(method, path, body.is_null() ? "" : body.dump());
  EXPECT_EQ(res.status, expect) << method << " " << path << ": " << res.body;
  return json::parse(res.body);
}

}  // namespace

// ---------------------------------------------------------------- config

TEST(Config, DefaultsFollowTheReferenceSettings) {
  const auto c = parse_run_config(R"({"seeds": "games"})", "/base");
  EXPECT_EQ(c.steps, 500);
  EXPECT_EQ(c.j, 3);
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.eval.n_random, 100);
  EXPECT_EQ(c.eval.n_mcts, 10);
  EXPECT_EQ(c.eval.move_limit, 50);
  EXPECT_DOUBLE_EQ(c.eval.balance_gate, 0.5);
  EXPECT_DOUBLE_EQ(c.eval.agency_gate, 0.5);
  EXPECT_EQ(c.archive.regions, 40);
  EXPECT_DOUBLE_EQ(c.archive.lo, -5);
  EXPECT_DOUBLE_EQ(c.archive.hi, 5);
  ASSERT_EQ(c.seeds.size(), 1u);
  EXPECT_EQ(c.seeds[0], fs::path("/base/games"));
}

TEST(Config, Errors) {
  for (const char* bad : {
           R"({"seeds": "g", "bogus": 1})",
           R"({"seeds": "g", "j": 0})",
           R"({"seeds": "g", "eval": {"balance_gate": 1.5}})",
           R"({"seeds": "g", "archive": {"lo": 5, "hi": -5}})",
           R"({"seeds": "g", "steps": "many"})",
           R"({"seeds": "g", "operator": {"kind": "oracle"}})",
           R"({})",
           "not json",
       }) {
    try {
      parse_run_config(bad).check();
      ADD_FAILURE() << "accepted " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::Config) << bad;
    }
  }
}

TEST(Config, RoundTrip) {
  auto c = tiny_config("/tmp/x", 7);
  c.op.ucb = true;
  const auto text = run_config_to_json(c);
  EXPECT_EQ(run_config_to_json(parse_run_config(text)), text);
}

TEST(Config, MissingPathsFailBeforeEvaluation) {
  auto c = tiny_config(scratch("missing"), 1);
  c.corpus = "/no/such/dir";
  EXPECT_THROW(evolve(c), Error);
  EXPECT_FALSE(fs::exists(c.output / "events.jsonl"));
}

// ---------------------------------------------------------------- runs

TEST(Run, ZeroStepsHoldsOnlySeeds) {
  const auto dir = scratch("zero");
  const auto summary = evolve(tiny_config(dir, 0));
  EXPECT_EQ(summary.steps_done, 0);
  EXPECT_EQ(summary.evaluations, 0);
  const auto loaded = load_run(dir);
  for (const auto& [cell, rec] : loaded.state.archive.cells()) {
    EXPECT_EQ(rec.lineage.op, "seed");
    EXPECT_EQ(loaded.state.archive.locate(rec.concepts), cell);
  }
  EXPECT_GE(loaded.state.archive.occupied(), 1);
  for (const auto& e : events_of(dir)) EXPECT_EQ(e.at("schema"), std::string(kEventSchema));
  for (const char* f : {"config.json", "projection.json", "archive.json", "report.json", "heatmap.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_THROW(evolve(tiny_config(dir, 0)), Error);  // refuses to overwrite a run
}

TEST(Run, ReproducibleAcrossInvocationsAndWorkerCounts) {
  const auto a = scratch("repro-a"), b = scratch("repro-b");
  evolve(tiny_config(a, 3));
  auto cb = tiny_config(b, 3);
  cb.workers = 3;
  evolve(cb);
  EXPECT_EQ(slurp(a / "events.jsonl"), slurp(b / "events.jsonl"));
  EXPECT_EQ(elites(a), elites(b));
}

TEST(Run, ResumeMatchesUninterruptedRun) {
  const auto full = scratch("full"), split = scratch("split"), torn = scratch("torn");
  evolve(tiny_config(full, 4));

  evolve(tiny_config(split, 4), {}, 2);
  EXPECT_EQ(load_run(split).state.steps_done, 2);
  const auto s = resume(split);
  EXPECT_TRUE(s.resumed);
  EXPECT_EQ(s.steps_done, 4);
  EXPECT_EQ(slurp(full / "events.jsonl"), slurp(split / "events.jsonl"));

  // Kill mid-step: drop the last step marker and leave half a line behind.
  evolve(tiny_config(torn, 4), {}, 3);
  {
    auto lines = events_of(torn);
    while (lines.back().at("type") != "step") lines.pop_back();
    lines.pop_back();
    std::ofstream out(torn / "events.jsonl", std::ios::trunc | std::ios::binary);
    for (const auto& l : lines) out << l.dump() << "\n";
    out << R"({"schema": "gavel.event/1", "type": "add", "rec)";
  }
  EXPECT_EQ(load_run(torn).state.steps_done, 2);
  resume(torn);
  EXPECT_EQ(slurp(full / "events.jsonl"), slurp(torn / "events.jsonl"));
  EXPECT_EQ(elites(full), elites(torn));
}

TEST(Run, EventHistoryIsMonotone) {
  const auto dir = scratch("monotone");
  evolve(tiny_config(dir, 3));
  double score = 0;
  int occupied = 0;
  for (const auto& e : events_of(dir)) {
    if (!e.contains("qd_score")) continue;
    EXPECT_GE(e.at("qd_score").get<double>(), score);
    EXPECT_GE(e.at("occupied").get<int>(), occupied);
    score = e.at("qd_score");
    occupied = e.at("occupied");
  }
  const auto seeds_only = load_run(dir, 0);
  EXPECT_LE(seeds_only.state.archive.occupied(), occupied);
  EXPECT_DOUBLE_EQ(qd::qd_score(load_run(dir).state.archive), score);
}

TEST(Run, HeatmapIsRegionsSquared) {
  const auto dir = scratch("heat");
  evolve(tiny_config(dir, 1));
  const auto loaded = load_run(dir);
  const auto doc = json::parse(heatmap_json(loaded.state.archive, 1));
  const int r = doc.at("regions");
  ASSERT_EQ(r, 40);
  ASSERT_EQ(doc.at("fitness").size(), 40u);
  int filled = 0;
  for (int row = 0; row < r; ++row) {
    ASSERT_EQ(doc["fitness"][row].size(), 40u);
    for (int i = 0; i < r; ++i) {
      const auto& v = doc["fitness"][row][i];
      if (v.is_null()) continue;
      ++filled;
      const auto* rec = loaded.state.archive.at({i, r - 1 - row});
      ASSERT_NE(rec, nullptr);
      EXPECT_DOUBLE_EQ(v.get<double>(), rec->fitness.value);
    }
  }
  EXPECT_EQ(filled, loaded.state.archive.occupied());
}

// ---------------------------------------------------------------- evaluation record

TEST(Evaluation, EmptyTextIsUncompilable) {
  const auto a = qd::assess("", eval::EvalParams{});
  const auto doc = json::parse(evaluation_json("empty", a, nullptr));
  EXPECT_EQ(doc.at("fitness").at("stage"), -3);
  EXPECT_DOUBLE_EQ(doc.at("fitness").at("value").get<double>(), -3.0);
  EXPECT_TRUE(doc.at("concepts").is_null());
}

// ---------------------------------------------------------------- service

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    svc = Service::from_games(load_games({test::corpus_dir()}, gdl::load_macros(test::corpus_dir() / "macros")));
  }
  Service svc;
};

TEST_F(ServiceTest, GamesListing) {
  const auto list = call(svc, "GET", "/games", nullptr, 200);
  std::set<std::string> ids;
  for (const auto& g : list.at("games")) ids.insert(g.at("id"));
  EXPECT_TRUE(ids.contains("hopthrough"));
  EXPECT_TRUE(ids.contains("havabu"));
  const auto g = call(svc, "GET", "/games/yavago", nullptr, 200);
  EXPECT_EQ(g.at("board").at("sites").size(), 61u);
  EXPECT_EQ(g.at("board").at("shape"), "hex");
  call(svc, "GET", "/games/nope", nullptr, 404);
}

TEST_F(ServiceTest, HopThroughOpeningHops) {
  const auto created = call(svc, "POST", "/matches", {{"game", "hopthrough"}, {"human_seat", 1}}, 201);
  const std::string id = created.at("id");
  const auto state = call(svc, "GET", "/matches/" + id, nullptr, 200);

  const auto g = engine::compile(gdl::parse_game(test::corpus_source("hopthrough")));
  const auto start = engine::initial_state(g);
  std::set<std::pair<int, int>> expected, served;
  for (const auto& m : engine::legal_moves(g, start)) expected.insert({m.from, m.to});
  for (const auto& m : state.at("legal")) served.insert({m.at("from").get<int>(), m.at("to").get<int>()});
  EXPECT_EQ(served, expected);
  EXPECT_EQ(state.at("mover"), 1);
  EXPECT_TRUE(state.at("human_to_move"));
}

TEST_F(ServiceTest, IllegalMoveLeavesStateUnchanged) {
  const std::string id = call(svc, "POST", "/matches", {{"game", "hopthrough"}, {"human_seat", 1}}, 201).at("id");
  const auto before = call(svc, "GET", "/matches/" + id, nullptr, 200);
  const auto err = call(svc, "POST", "/matches/" + id + "/moves", {{"move", {{"from", 0}, {"to", 63}}}}, 422);
  EXPECT_EQ(err.at("legal").size(), before.at("legal").size());
  EXPECT_EQ(call(svc, "GET", "/matches/" + id, nullptr, 200), before);
  call(svc, "POST", "/matches/" + id + "/moves", {{"move", {{"index", 9999}}}}, 422);
  call(svc, "POST", "/matches/" + id + "/moves", json("garbage"), 400);
}

TEST_F(ServiceTest, TurnOrderAndUnknownIds) {
  const std::string id =
      call(svc, "POST", "/matches", {{"game", "tictactoe"}, {"human_seat", 1}, {"agent", {{"kind", "random"}}}}, 201)
          .at("id");
  call(svc, "POST", "/matches/" + id + "/agent-move", nullptr, 409);  // human to move
  const auto after = call(svc, "POST", "/matches/" + id + "/moves", {{"move", {{"to", 4}}}}, 200);
  EXPECT_EQ(after.at("mover"), 2);
  call(svc, "POST", "/matches/" + id + "/moves", {{"move", {{"to", 0}}}}, 409);  // agent to move
  call(svc, "POST", "/matches/" + id + "/agent-move", nullptr, 200);
  call(svc, "GET", "/matches/m999999", nullptr, 404);
  call(svc, "POST", "/matches/m999999/moves", {{"to", 1}}, 404);
  call(svc, "POST", "/matches", {{"game", "nope"}}, 404);
  call(svc, "POST", "/matches", {{"human_seat", 1}}, 400);
}

TEST_F(ServiceTest, AgentMatchPlaysOutAndReplays) {
  const std::string id =
      call(svc, "POST", "/matches",
           {{"game", "tictactoe"}, {"human_seat", nullptr}, {"agent", {{"kind", "mcts"}, {"iterations", 50}, {"seed", 3}}}},
           201)
          .at("id");
  json state;
  for (int i = 0; i < 9; ++i) {
    state = call(svc, "POST", "/matches/" + id + "/agent-move", nullptr, 200);
    if (state.at("terminal")) break;
  }
  ASSERT_TRUE(state.at("terminal"));
  call(svc, "POST", "/matches/" + id + "/agent-move", nullptr, 409);

  const auto live = svc.session_state(id), replayed = svc.replay(id);
  ASSERT_TRUE(live && replayed);
  EXPECT_EQ(live->hash, replayed->hash);
  EXPECT_EQ(live->cells, replayed->cells);
  EXPECT_EQ(live->mover, replayed->mover);
  EXPECT_EQ(live->terminal.has_value(), replayed->terminal.has_value());
}

TEST_F(ServiceTest, ServesRunElites) {
  const auto dir = scratch("serve");
  evolve(tiny_config(dir, 0));
  auto run_svc = Service::from_run(dir);
  const auto list = call(run_svc, "GET", "/games", nullptr, 200);
  EXPECT_EQ(static_cast<int>(list.at("games").size()), load_run(dir).state.archive.occupied());
  for (const auto& g : list.at("games")) {
    EXPECT_TRUE(g.at("fitness").is_object());
    EXPECT_EQ(g.at("cell").size(), 2u);
  }
}
