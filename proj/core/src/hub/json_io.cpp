#include "json_io.hpp"

#include <cstdio>

#include "gavel/common/error.hpp"

namespace gavel::hub::io {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

json to_json(const eval::RandomEvalStats& s) {
  return {{"n", s.n},
          {"win_rate", {s.win_rate[0], s.win_rate[1], s.win_rate[2]}},
          {"balance_gate", s.balance_gate},
          {"agency_gate", s.agency_gate},
          {"mean_branching", s.mean_branching},
          {"mean_length", s.mean_length},
          {"mean_coverage", s.mean_coverage},
          {"captures_observed", s.captures_observed}};
}

eval::RandomEvalStats stats_from_json(const json& j) {
  eval::RandomEvalStats s;
  s.n = j.at("n").get<int>();
  for (int i = 0; i < 3; ++i) s.win_rate[i] = j.at("win_rate").at(i).get<double>();
  s.balance_gate = j.at("balance_gate").get<double>();
  s.agency_gate = j.at("agency_gate").get<double>();
  s.mean_branching = j.at("mean_branching").get<double>();
  s.mean_length = j.at("mean_length").get<double>();
  s.mean_coverage = j.at("mean_coverage").get<double>();
  s.captures_observed = j.at("captures_observed").get<bool>();
  return s;
}

json to_json(const eval::Fitness& f) {
  json j = {{"value", f.value},
            {"stage", static_cast<int>(f.stage)},
            {"stage_name", std::string(eval::to_string(f.stage))},
            {"detail", f.detail},
            {"mcts_matches", f.mcts_matches}};
  if (f.metrics) {
    json m = json::object();
    const auto v = f.metrics->values();
    for (std::size_t i = 0; i < v.size(); ++i) m[std::string(eval::MetricVector::kNames[i])] = v[i];
    j["metrics"] = m;
  } else {
    j["metrics"] = nullptr;
  }
  j["random_stats"] = f.stats ? to_json(*f.stats) : json(nullptr);
  return j;
}

eval::Fitness fitness_from_json(const json& j) {
  eval::Fitness f;
  f.value = j.at("value").get<double>();
  f.stage = static_cast<eval::Stage>(j.at("stage").get<int>());
  f.detail = j.value("detail", "");
  f.mcts_matches = j.value("mcts_matches", 0);
  if (j.contains("metrics") && !j["metrics"].is_null()) {
    const auto& m = j["metrics"];
    eval::MetricVector v;
    v.balance = m.at("balance").get<double>();
    v.decisiveness = m.at("decisiveness").get<double>();
    v.completion = m.at("completion").get<double>();
    v.agency = m.at("agency").get<double>();
    v.coverage = m.at("coverage").get<double>();
    v.strategic_depth = m.at("strategic_depth").get<double>();
    f.metrics = v;
  }
  if (j.contains("random_stats") && !j["random_stats"].is_null()) f.stats = stats_from_json(j["random_stats"]);
  return f;
}

json to_json(const qd::CandidateRecord& r) {
  return {{"id", r.id},
          {"source", r.source},
          {"fitness", to_json(r.fitness)},
          {"concepts", r.concepts.bits},
          {"catalog_version", r.concepts.catalog_version},
          {"x", r.x},
          {"y", r.y},
          {"cell", {r.cell.i, r.cell.j}},
          {"lineage",
           {{"parent", r.lineage.parent_id},
            {"span", {r.lineage.span.begin, r.lineage.span.end}},
            {"op", r.lineage.op},
            {"arm", r.lineage.arm},
            {"generation", r.lineage.generation}}},
          {"step", r.step},
          {"seq", r.seq}};
}

qd::CandidateRecord record_from_json(const json& j) {
  qd::CandidateRecord r;
  r.id = j.at("id").get<std::string>();
  r.source = j.at("source").get<std::string>();
  r.fitness = fitness_from_json(j.at("fitness"));
  r.concepts.bits = j.at("concepts").get<std::vector<double>>();
  r.concepts.catalog_version = j.at("catalog_version").get<int>();
  r.x = j.at("x").get<double>();
  r.y = j.at("y").get<double>();
  r.cell = {j.at("cell").at(0).get<int>(), j.at("cell").at(1).get<int>()};
  const auto& l = j.at("lineage");
  r.lineage.parent_id = l.at("parent").get<std::string>();
  r.lineage.span = {l.at("span").at(0).get<std::size_t>(), l.at("span").at(1).get<std::size_t>()};
  r.lineage.op = l.at("op").get<std::string>();
  r.lineage.arm = l.at("arm").get<std::string>();
  r.lineage.generation = l.at("generation").get<int>();
  r.step = j.at("step").get<int>();
  r.seq = j.at("seq").get<long long>();
  return r;
}

json to_json(const qd::BanditStats& b) {
  json arms = json::object();
  for (const auto& [name, a] : b.arms) arms[name] = {a.pulls, a.successes};
  return {{"arms", arms}, {"total_pulls", b.total_pulls}, {"c", b.c}};
}

qd::BanditStats bandit_from_json(const json& j) {
  qd::BanditStats b;
  for (const auto& [name, a] : j.at("arms").items()) b.arms[name] = {a.at(0).get<int>(), a.at(1).get<int>()};
  b.total_pulls = j.at("total_pulls").get<int>();
  b.c = j.at("c").get<double>();
  return b;
}

json to_json(const qd::ArchiveReport& r) {
  return {{"qd_score", r.qd_score},
          {"occupied", r.occupied},
          {"playable", r.playable},
          {"fitness_above_half", r.above_half},
          {"novel_cells", r.novel_cells},
          {"novel_playable", r.novel_playable},
          {"novel_fitness_above_half", r.novel_above_half}};
}

json to_json(const engine::Move& m) {
  return {{"kind", std::string(engine::to_string(m.kind))}, {"from", m.from}, {"to", m.to}, {"text", engine::to_string(m)}};
}

json board_to_json(const engine::BoardGraph& board) {
  json sites = json::array();
  for (int s = 0; s < board.size(); ++s) {
    const auto p = board.render(s);
    const auto [a, b] = board.lattice(s);
    json adj = json::array();
    for (int d : board.directions(engine::DirClass::Adjacent)) {
      const int n = board.neighbor(s, d);
      if (n >= 0) adj.push_back(n);
    }
    sites.push_back({{"site", s}, {"x", p.x}, {"y", p.y}, {"lattice", {a, b}}, {"adjacent", adj}});
  }
  return {{"shape", board.shape() == engine::ShapeKind::Square ? "square" : "hex"},
          {"dimension", board.dimension()},
          {"rotation", board.rotation()},
          {"description", board.describe()},
          {"sites", sites}};
}

}  // namespace gavel::hub::io
