#include "gavel/hub/run.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "gavel/common/error.hpp"
#include "gavel/engine/engine.hpp"
#include "gavel/gdl/parser.hpp"
#include "gavel/gdl/printer.hpp"
#include "json_io.hpp"

namespace gavel::hub {

namespace fs = std::filesystem;
using io::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(Errc::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

class EventLog {
 public:
  explicit EventLog(const fs::path& path) : out_(path, std::ios::binary | std::ios::app) {
    if (!out_) throw Error(Errc::Io, "cannot open " + path.string());
  }
  void append(json ev) {
    ev["schema"] = kEventSchema;
    out_ << ev.dump() << '\n';
    out_.flush();
    ++count_;
  }
  int count() const { return count_; }

 private:
  std::ofstream out_;
  int count_ = 0;
};

json cells_json(const std::set<qd::CellCoord>& cells) {
  json out = json::array();
  for (const auto& c : cells) out.push_back({c.i, c.j});
  return out;
}

json hashes_json(const std::vector<std::uint64_t>& hashes) {
  json out = json::array();
  for (auto h : hashes) out.push_back(io::hex64(h));
  return out;
}

json commit_event(const qd::CandidateRecord& rec, const qd::AddResult& res, const qd::Archive& archive) {
  json ev = {{"type", res.kind == qd::AddResult::Kind::Inserted ? "add" : "replace"},
             {"step", rec.step},
             {"record", io::to_json(rec)},
             {"qd_score", archive.history().back().qd_score_after},
             {"occupied", archive.occupied()}};
  if (res.old) ev["replaced"] = res.old->id;
  return ev;
}

struct ParsedLog {
  std::vector<json> events;  // complete prefix up to the last step boundary
  std::uintmax_t keep_bytes = 0;
  bool initialised = false;
};

/// Reads events up to the last completed boundary (init_done or step).
ParsedLog parse_log(const fs::path& path) {
  ParsedLog out;
  if (!fs::exists(path)) return out;
  const std::string text = read_file(path);
  std::vector<json> pending;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn final line
    json ev;
    try {
      ev = json::parse(std::string_view(text).substr(pos, nl - pos));
    } catch (const json::parse_error&) {
      break;
    }
    if (ev.value("schema", "") != kEventSchema) break;
    pos = nl + 1;
    const std::string type = ev.value("type", "");
    pending.push_back(std::move(ev));
    if (type == "init_done" || type == "step") {
      out.initialised = true;
      for (auto& e : pending) out.events.push_back(std::move(e));
      pending.clear();
      out.keep_bytes = pos;
    }
  }
  return out;
}

/// Everything needed to run steps for one configuration.
struct Engine {
  RunConfig config;
  gdl::MacroTable macros;
  std::vector<GameSource> seeds;
  std::vector<GameSource> corpus;
  mutate::SubtreeLibrary library;
  mutate::MutationOperator mutator;
  qd::Evaluator evaluator;
  qd::WorkerPool pool;

  explicit Engine(const RunConfig& c) : config(c), pool(c.resolved_workers()) {
    config.check_paths();
    if (!config.macros.empty()) macros = gdl::load_macros(config.macros);
    seeds = load_games(config.seeds, macros);
    if (seeds.empty()) throw Error(Errc::Config, "no seed games found");
    corpus = load_games({config.corpus}, macros);

    std::vector<gdl::GameTree> trees;
    for (const auto* list : {&corpus, &seeds})
      for (const auto& g : *list) trees.push_back(gdl::parse_game(g.source));
    library = mutate::SubtreeLibrary::harvest(trees);

    if (config.op.kind == OperatorConfig::Kind::Grammar) {
      const auto params = config.op.grammar;
      const auto* lib = &library;
      mutator = [params, lib](const mutate::MutationRequest& req, Rng& rng) {
        return mutate::grammar_mutate(req, gdl::default_grammar(), *lib, params, rng);
      };
    } else {
      const auto infill = config.op.infill;
      mutator = [infill](const mutate::MutationRequest& req, Rng&) {
        auto res = mutate::infill_mutate(req, infill);
        if (!res.ok())
          throw Error(Errc::Io, std::string("infill ") + std::string(mutate::to_string(res.status)) + ": " +
                                    res.message);
        return res.candidate;
      };
    }
    const auto eval_cfg = config.eval;
    evaluator = [eval_cfg](const std::string& source, std::uint64_t seed) {
      return qd::assess(source, eval_cfg.params(seed));
    };
  }

  qd::StepConfig step_config() const {
    qd::StepConfig s;
    s.j = config.j;
    s.k = config.k;
    s.master_seed = config.seed;
    s.op_tag = config.op.kind == OperatorConfig::Kind::Grammar ? "grammar" : "infill";
    return s;
  }
};

qd::RunState initialise(Engine& eng, const fs::path& dir, EventLog& log) {
  const auto corpus_vectors = corpus_concepts(eng.corpus, eng.config.eval, eng.config.seed, eng.pool);
  const auto projection = concepts::fit_projection(corpus_vectors, 2);
  write_atomic(dir / "projection.json", concepts::projection_to_json(projection));

  qd::RunState run{qd::Archive(projection, eng.config.archive), {}, {}, 0, 0};
  if (eng.config.op.ucb) run.bandit = qd::BanditStats{};
  for (const auto& v : corpus_vectors) run.archive.baseline_cells.insert(run.archive.locate(v));

  std::vector<qd::Assessment> results(eng.seeds.size());
  eng.pool.run(eng.seeds.size(), [&](std::size_t i) {
    const auto& src = eng.seeds[i].source;
    results[i] = eng.evaluator(src, qd::evaluation_seed(eng.config.seed, src));
  });

  std::vector<std::uint64_t> evaluated;
  json rejected = json::array();
  for (std::size_t i = 0; i < eng.seeds.size(); ++i) {
    const auto& g = eng.seeds[i];
    const std::uint64_t h = fnv1a(g.source);
    if (run.evaluated.contains(h)) continue;
    run.evaluated.insert(h);
    evaluated.push_back(h);
    if (results[i].fitness.stage == eval::Stage::Uncompilable) {
      rejected.push_back({{"name", g.name}, {"detail", results[i].fitness.detail}});
      continue;
    }
    qd::CandidateRecord rec;
    rec.id = run.next_id();
    rec.source = g.source;
    rec.fitness = std::move(results[i].fitness);
    rec.concepts = std::move(results[i].concepts);
    rec.lineage.op = "seed";
    rec.lineage.arm = g.name;
    rec.seq = run.next_seq++;
    const auto res = run.archive.add(std::move(rec));
    if (res.accepted()) log.append(commit_event(*run.archive.at(res.cell), res, run.archive));
  }
  log.append({{"type", "init_done"},
              {"seeds", eng.seeds.size()},
              {"corpus_games", eng.corpus.size()},
              {"baseline_cells", cells_json(run.archive.baseline_cells)},
              {"uncompilable_seeds", rejected},
              {"evaluated", hashes_json(evaluated)},
              {"next_seq", run.next_seq},
              {"qd_score", qd::qd_score(run.archive)},
              {"occupied", run.archive.occupied()}});
  return run;
}

/// Applies parsed events to a fresh state. `up_to_step` filters commits.
qd::RunState rebuild(const RunConfig& config, const concepts::Projection& projection, const std::vector<json>& events,
                     std::optional<int> up_to_step) {
  qd::RunState run{qd::Archive(projection, config.archive), {}, {}, 0, 0};
  if (config.op.ucb) run.bandit = qd::BanditStats{};
  for (const auto& ev : events) {
    const std::string type = ev.at("type").get<std::string>();
    const int step = ev.value("step", 0);
    if (up_to_step && step > *up_to_step) break;
    if (type == "add" || type == "replace") {
      auto rec = io::record_from_json(ev.at("record"));
      const auto stored = rec.cell;
      const auto res = run.archive.add(std::move(rec));
      if (!res.accepted() || !(res.cell == stored))
        throw Error(Errc::Io, "event log does not replay: record " + ev.at("record").at("id").get<std::string>());
    } else if (type == "init_done" || type == "step") {
      if (type == "init_done") {
        for (const auto& c : ev.at("baseline_cells"))
          run.archive.baseline_cells.insert({c.at(0).get<int>(), c.at(1).get<int>()});
      } else {
        run.steps_done = step;
        if (ev.contains("bandit") && !ev["bandit"].is_null()) run.bandit = io::bandit_from_json(ev["bandit"]);
      }
      for (const auto& h : ev.at("evaluated")) run.evaluated.insert(io::parse_hex64(h.get<std::string>()));
      run.next_seq = ev.at("next_seq").get<long long>();
    }
  }
  return run;
}

void write_outputs(const qd::RunState& run, const fs::path& dir, bool final_outputs) {
  const int step = run.steps_done;
  write_atomic(dir / "archive.json", archive_json(run.archive, step));
  if (!final_outputs) return;
  const fs::path elites = dir / "elites";
  fs::create_directories(elites);
  for (const auto& entry : fs::directory_iterator(elites))
    if (entry.path().extension() == ".lud") fs::remove(entry.path());
  for (const auto& [cell, rec] : run.archive.cells()) write_atomic(elites / (rec.id + ".lud"), rec.source + "\n");
  write_atomic(dir / "report.json", report_json(run.archive, step));
  write_atomic(dir / "heatmap.json", heatmap_json(run.archive, step));
}

RunSummary run_steps(Engine& eng, qd::RunState& run, const fs::path& dir, EventLog& log, const ProgressFn& progress,
                     std::optional<int> max_steps) {
  RunSummary summary;
  summary.dir = dir;
  const auto scfg = eng.step_config();
  int taken = 0;
  while (run.steps_done < eng.config.steps && (!max_steps || taken < *max_steps)) {
    auto hook = [&](const qd::CandidateRecord& rec, const qd::AddResult& res) {
      log.append(commit_event(rec, res, run.archive));
    };
    const auto rep = qd::step(run, eng.mutator, eng.evaluator, scfg, eng.pool, hook);
    ++taken;
    summary.evaluations += rep.evaluated;
    json errors = json::array();
    for (const auto& e : rep.errors) errors.push_back(e);
    log.append({{"type", "step"},
                {"step", rep.step},
                {"attempts", rep.attempts},
                {"request_failures", rep.request_failures},
                {"unchanged", rep.unchanged},
                {"duplicates", rep.duplicates},
                {"cached", rep.cached},
                {"evaluated_count", rep.evaluated},
                {"uncompilable", rep.uncompilable},
                {"inserted", rep.inserted},
                {"replaced", rep.replaced},
                {"rejected", rep.rejected},
                {"errors", errors},
                {"evaluated", hashes_json(rep.evaluated_hashes)},
                {"bandit", run.bandit ? io::to_json(*run.bandit) : json(nullptr)},
                {"next_seq", run.next_seq},
                {"qd_score", qd::qd_score(run.archive)},
                {"occupied", run.archive.occupied()}});
    if (rep.step % eng.config.snapshot_every == 0) {
      fs::create_directories(dir / "snapshots");
      char name[32];
      std::snprintf(name, sizeof name, "step-%06d.json", rep.step);
      write_atomic(dir / "snapshots" / name, archive_json(run.archive, rep.step));
      write_outputs(run, dir, false);
    }
    if (progress) progress(rep, run.archive);
  }
  write_outputs(run, dir, true);
  summary.report = qd::report(run.archive);
  summary.steps_done = run.steps_done;
  return summary;
}

RunConfig stored_config(const fs::path& dir) {
  return parse_run_config(read_file(dir / "config.json"));
}

RunConfig absolutise(RunConfig c) {
  for (auto& s : c.seeds) s = fs::absolute(s);
  c.corpus = fs::absolute(c.corpus);
  if (!c.macros.empty()) c.macros = fs::absolute(c.macros);
  c.output = fs::absolute(c.output);
  return c;
}

}  // namespace

std::vector<GameSource> load_games(const std::vector<fs::path>& paths, const gdl::MacroTable& macros) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".lud") found.push_back(entry.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    } else {
      throw Error(Errc::Io, "game path not found: " + p.string());
    }
  }
  std::vector<GameSource> out;
  for (const auto& f : files) {
    const std::string text = read_file(f);
    try {
      const auto tree = gdl::preprocess(gdl::parse_game(text), macros);
      out.push_back({f.stem().string(), f, gdl::print_canonical(tree)});
    } catch (const Error& e) {
      throw Error(e.code(), f.string() + ": " + e.what(), e.where());
    }
  }
  return out;
}

std::vector<concepts::ConceptVector> corpus_concepts(const std::vector<GameSource>& corpus, const EvalConfig& eval,
                                                     std::uint64_t master_seed, const qd::WorkerPool& pool) {
  std::vector<concepts::ConceptVector> out(corpus.size());
  pool.run(corpus.size(), [&](std::size_t i) {
    const auto& src = corpus[i].source;
    const auto tree = gdl::parse_game(src);
    const auto game = engine::compile(tree);
    std::optional<eval::RandomEvalStats> stats;
    try {
      if (!engine::initial_state(game).legal.empty())
        stats = eval::random_eval(game, eval.n_random, eval.move_limit, qd::evaluation_seed(master_seed, src));
    } catch (const Error&) {
    }
    out[i] = concepts::extract_concepts(game, tree, stats ? &*stats : nullptr);
  });
  return out;
}

std::vector<std::string> derive_variants(const std::vector<GameSource>& corpus, int n, std::uint64_t seed,
                                         const mutate::GrammarSamplerParams& params) {
  if (corpus.empty()) throw Error(Errc::EmptyInput, "no games to derive from");
  std::vector<gdl::GameTree> trees;
  std::vector<std::string> pool;
  std::unordered_set<std::string> seen;
  for (const auto& g : corpus) {
    trees.push_back(gdl::parse_game(g.source));
    pool.push_back(g.source);
    seen.insert(g.source);
  }
  const auto library = mutate::SubtreeLibrary::harvest(trees);
  Rng rng(seed);
  std::vector<std::string> out;
  const long long budget = 50LL * n + 100;
  for (long long tries = 0; static_cast<int>(out.size()) < n && tries < budget; ++tries) {
    const std::string parent = pool[rng.below(pool.size())];
    try {
      const auto req = mutate::make_request(parent, rng);
      const auto canon = mutate::canonical_text(mutate::grammar_mutate(req, gdl::default_grammar(), library, params, rng));
      if (!canon || seen.contains(*canon)) continue;
      engine::compile(gdl::parse_game(*canon));
      seen.insert(*canon);
      pool.push_back(*canon);
      out.push_back(*canon);
    } catch (const Error&) {
    }
  }
  return out;
}

RunSummary evolve(const RunConfig& input, const ProgressFn& progress, std::optional<int> max_steps) {
  const RunConfig config = absolutise(input);
  Engine eng(config);
  const fs::path dir = config.output;
  if (fs::exists(dir / "events.jsonl"))
    throw Error(Errc::Config, "run directory already has an event log: " + dir.string());
  fs::create_directories(dir);
  write_atomic(dir / "config.json", run_config_to_json(config));
  EventLog log(dir / "events.jsonl");
  auto run = initialise(eng, dir, log);
  write_outputs(run, dir, false);
  return run_steps(eng, run, dir, log, progress, max_steps);
}

RunSummary resume(const fs::path& dir, std::optional<int> steps, const ProgressFn& progress,
                  std::optional<int> max_steps) {
  RunConfig config = stored_config(dir);
  if (steps) config.steps = *steps;
  config.check();
  if (steps) write_atomic(dir / "config.json", run_config_to_json(config));
  Engine eng(config);

  const fs::path events = dir / "events.jsonl";
  auto parsed = parse_log(events);
  if (fs::exists(events)) fs::resize_file(events, parsed.keep_bytes);
  EventLog log(events);
  std::optional<qd::RunState> run;
  if (!parsed.initialised) {
    run.emplace(initialise(eng, dir, log));
  } else {
    const auto projection = concepts::projection_from_json(read_file(dir / "projection.json"));
    run.emplace(rebuild(config, projection, parsed.events, std::nullopt));
  }
  auto summary = run_steps(eng, *run, dir, log, progress, max_steps);
  summary.resumed = true;
  return summary;
}

LoadedRun load_run(const fs::path& dir, std::optional<int> up_to_step) {
  const RunConfig config = stored_config(dir);
  const auto parsed = parse_log(dir / "events.jsonl");
  if (!parsed.initialised) throw Error(Errc::Io, "run has no completed initialisation: " + dir.string());
  const auto projection = concepts::projection_from_json(read_file(dir / "projection.json"));
  return LoadedRun{config, rebuild(config, projection, parsed.events, up_to_step),
                   static_cast<int>(parsed.events.size())};
}

std::string heatmap_json(const qd::Archive& archive, int step) {
  const int r = archive.geometry().regions;
  json rows = json::array();
  for (int j = r - 1; j >= 0; --j) {
    json row = json::array();
    for (int i = 0; i < r; ++i) {
      const auto* rec = archive.at({i, j});
      row.push_back(rec ? json(rec->fitness.value) : json(nullptr));
    }
    rows.push_back(row);
  }
  json doc = {{"schema", kHeatmapSchema},
              {"step", step},
              {"regions", r},
              {"lo", archive.geometry().lo},
              {"hi", archive.geometry().hi},
              {"row_order", "y descending"},
              {"fitness", rows},
              {"baseline_cells", cells_json(archive.baseline_cells)},
              {"report", io::to_json(qd::report(archive))}};
  return doc.dump(1) + "\n";
}

std::string archive_json(const qd::Archive& archive, int step) {
  json elites = json::array();
  for (const auto& [cell, rec] : archive.cells()) {
    json e = io::to_json(rec);
    e["novel"] = !archive.baseline_cells.contains(cell);
    elites.push_back(std::move(e));
  }
  json doc = {{"schema", kArchiveSchema},
              {"step", step},
              {"geometry",
               {{"regions", archive.geometry().regions}, {"lo", archive.geometry().lo}, {"hi", archive.geometry().hi}}},
              {"report", io::to_json(qd::report(archive))},
              {"baseline_cells", cells_json(archive.baseline_cells)},
              {"elites", elites}};
  return doc.dump(1) + "\n";
}

std::string report_json(const qd::Archive& archive, int step) {
  json doc = io::to_json(qd::report(archive));
  doc["schema"] = kReportSchema;
  doc["step"] = step;
  return doc.dump(2) + "\n";
}

std::string evaluation_json(const std::string& name, const qd::Assessment& a, const qd::Archive* archive) {
  json doc = {{"schema", "gavel.evaluation/1"}, {"game", name}, {"fitness", io::to_json(a.fitness)}};
  if (a.concepts.bits.empty()) {
    doc["concepts"] = nullptr;
  } else {
    json c = json::object();
    const auto cat = concepts::catalog();
    for (std::size_t i = 0; i < cat.size() && i < a.concepts.bits.size(); ++i)
      c[std::string(cat[i].name)] = static_cast<int>(a.concepts.bits[i]);
    doc["concepts"] = c;
    if (archive) {
      double x = 0, y = 0;
      const auto cell = archive->locate(a.concepts, &x, &y);
      doc["projection"] = {{"x", x},
                           {"y", y},
                           {"cell", {cell.i, cell.j}},
                           {"novel", !archive->baseline_cells.contains(cell)}};
    }
  }
  return doc.dump(2) + "\n";
}

}  // namespace gavel::hub
