#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gavel/common/error.hpp"
#include "gavel/concepts/concepts.hpp"
#include "gavel/gdl/parser.hpp"
#include "gavel/gdl/preprocess.hpp"
#include "gavel/gdl/printer.hpp"
#include "gavel/hub/config.hpp"
#include "gavel/hub/run.hpp"
#include "gavel/hub/service.hpp"
#include "gavel/mutate/mutate.hpp"

namespace fs = std::filesystem;
using namespace gavel;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot write " + out);
  f << text;
}

gdl::MacroTable macros_from(const std::string& dir) {
  return dir.empty() ? gdl::MacroTable{} : gdl::load_macros(dir);
}

void print_progress(const qd::StepReport& rep, const qd::Archive& archive) {
  const auto r = qd::report(archive);
  std::fprintf(stderr, "step %d: evaluated %d, +%d new, %d replaced | cells %d, qd %.3f, playable %d\n", rep.step,
               rep.evaluated, rep.inserted, rep.replaced, r.occupied, r.qd_score, r.playable);
}

void print_summary(const hub::RunSummary& s) {
  const auto& r = s.report;
  std::printf("run: %s\nsteps: %d\nQD score: %.4f\noccupied cells: %d\n# playable: %d\n# fitness>0.5: %d\n"
              "novel cells: %d (playable %d, fitness>0.5 %d)\n",
              s.dir.string().c_str(), s.steps_done, r.qd_score, r.occupied, r.playable, r.above_half, r.novel_cells,
              r.novel_playable, r.novel_above_half);
}

std::vector<long long> parse_ll_list(const std::string& text) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gavel: evolve, evaluate and play board games written in the mini game description language"};
  app.require_subcommand(1);

  // evolve ------------------------------------------------------------------
  auto* evolve = app.add_subcommand("evolve", "Run MAP-Elites from seed games");
  std::string config_path, resume_dir, output_dir;
  std::optional<int> steps, workers, max_steps;
  std::optional<std::uint64_t> seed;
  evolve->add_option("-c,--config", config_path, "JSON run configuration");
  evolve->add_option("--resume", resume_dir, "Continue the run in this directory");
  evolve->add_option("--steps", steps, "Total steps (overrides the config)");
  evolve->add_option("--seed", seed, "Master RNG seed (overrides the config)");
  evolve->add_option("--workers", workers, "Evaluation workers, 0 = cores - 1");
  evolve->add_option("-o,--output", output_dir, "Run directory (overrides the config)");
  evolve->add_option("--max-steps", max_steps, "Stop after this many steps in this invocation");
  evolve->add_flag("-q,--quiet", "No per-step progress");

  // evaluate ----------------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate one game");
  std::string game_path, eval_macros, eval_corpus, eval_run, eval_out;
  bool stage_only = false;
  hub::EvalConfig eval_cfg;
  std::uint64_t eval_seed = 1;
  evaluate->add_option("game", game_path, "Game file")->required();
  evaluate->add_flag("--stage-only", stage_only, "Stop after the gates");
  evaluate->add_option("--macros", eval_macros, "Macro directory");
  evaluate->add_option("--corpus", eval_corpus, "Fit a projection on this corpus to report the archive cell");
  evaluate->add_option("--run", eval_run, "Use a run's projection to report the archive cell");
  evaluate->add_option("--n-random", eval_cfg.n_random, "Random playouts")->capture_default_str();
  evaluate->add_option("--n-mcts", eval_cfg.n_mcts, "MCTS playouts")->capture_default_str();
  evaluate->add_option("--iterations", eval_cfg.mcts_iterations, "MCTS iterations per move")->capture_default_str();
  evaluate->add_option("--move-limit", eval_cfg.move_limit, "Moves per player")->capture_default_str();
  evaluate->add_option("--seed", eval_seed, "Evaluation seed")->capture_default_str();
  evaluate->add_option("-o,--output", eval_out, "Output file (default stdout)");

  // preprocess ----------------------------------------------------------------
  auto* preprocess = app.add_subcommand("preprocess", "Expand macros and anonymise names");
  std::string pre_in, pre_macros, pre_out;
  preprocess->add_option("game", pre_in, "Game file")->required();
  preprocess->add_option("--macros", pre_macros, "Macro directory");
  preprocess->add_option("-o,--output", pre_out, "Output file (default stdout)");

  // stats ---------------------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "Novelty/validity table of mutation operators");
  std::string stats_corpus, stats_macros, stats_out, stats_endpoint;
  int stats_n = 1000;
  std::uint64_t stats_seed = 1;
  bool stats_controls = false;
  stats->add_option("--corpus", stats_corpus, "Games to mutate")->required();
  stats->add_option("--macros", stats_macros, "Macro directory");
  stats->add_option("-n,--attempts", stats_n, "Attempts per operator")->capture_default_str();
  stats->add_option("--seed", stats_seed, "Seed")->capture_default_str();
  stats->add_option("--endpoint", stats_endpoint, "Also measure an infill endpoint at this URL");
  stats->add_flag("--controls", stats_controls, "Add identity and garbage control rows");
  stats->add_option("-o,--output", stats_out, "Output file (default stdout)");

  // sweep ---------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Archive occupancy by dimensionality and cell budget");
  std::string sweep_corpus, sweep_macros, sweep_out, sweep_dims = "2,3,4,5",
                                                     sweep_cells = "100,500,1000,1500,2000,5000,10000";
  std::uint64_t sweep_seed = 1;
  hub::EvalConfig sweep_eval;
  std::vector<std::string> sweep_extra;
  sweep->add_option("--corpus", sweep_corpus, "Corpus directory")->required();
  sweep->add_option("--extra", sweep_extra, "Additional game files or directories");
  sweep->add_option("--macros", sweep_macros, "Macro directory");
  sweep->add_option("--dims", sweep_dims, "Comma-separated dimensionalities")->capture_default_str();
  sweep->add_option("--cells", sweep_cells, "Comma-separated target cell counts")->capture_default_str();
  sweep->add_option("--seed", sweep_seed, "Seed for behavioural concepts")->capture_default_str();
  sweep->add_option("-o,--output", sweep_out, "Output file (default stdout)");

  // derive ------------------------------------------------------------------
  auto* derive = app.add_subcommand("derive", "Write compilable grammar variants of a corpus as a reference set");
  std::string derive_corpus, derive_macros, derive_out;
  int derive_n = 500;
  std::uint64_t derive_seed = 1;
  derive->add_option("--corpus", derive_corpus, "Corpus directory")->required();
  derive->add_option("--macros", derive_macros, "Macro directory");
  derive->add_option("-n,--count", derive_n, "Number of variants")->capture_default_str();
  derive->add_option("--seed", derive_seed, "Seed")->capture_default_str();
  derive->add_option("-o,--output", derive_out, "Output directory")->required();

  // export-heatmap ----------------------------------------------------------
  auto* heat = app.add_subcommand("export-heatmap", "Best fitness per cell of a run");
  std::string heat_run, heat_out;
  std::optional<int> heat_step;
  heat->add_option("run", heat_run, "Run directory")->required();
  heat->add_option("--step", heat_step, "Archive state after this step (default: last)");
  heat->add_option("-o,--output", heat_out, "Output file (default stdout)");

  // serve -------------------------------------------------------------------
  auto* serve = app.add_subcommand("serve", "HTTP match and archive API");
  std::string serve_run, serve_macros, host = "127.0.0.1";
  std::vector<std::string> serve_games;
  int port = 8080;
  serve->add_option("--run", serve_run, "Serve the elites of a run");
  serve->add_option("--games", serve_games, "Serve game files or directories");
  serve->add_option("--macros", serve_macros, "Macro directory for --games");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (evolve->parsed()) {
      const bool quiet = evolve->count("--quiet") > 0;
      const hub::ProgressFn progress = quiet ? hub::ProgressFn{} : hub::ProgressFn(print_progress);
      hub::RunSummary summary;
      if (!resume_dir.empty()) {
        summary = hub::resume(resume_dir, steps, progress, max_steps);
      } else {
        if (config_path.empty()) throw Error(Errc::Config, "evolve needs --config or --resume");
        auto config = hub::load_run_config(config_path);
        if (steps) config.steps = *steps;
        if (seed) config.seed = *seed;
        if (workers) config.workers = *workers;
        if (!output_dir.empty()) config.output = output_dir;
        config.check_paths();
        summary = hub::evolve(config, progress, max_steps);
      }
      print_summary(summary);
    } else if (evaluate->parsed()) {
      eval::EvalParams params = eval_cfg.params(eval_seed);
      params.gates_only = stage_only;
      std::string text = read_file(game_path);
      std::string source = text;
      try {
        source = gdl::print_canonical(gdl::preprocess(gdl::parse_game(text), macros_from(eval_macros)));
      } catch (const Error&) {
        // Unparseable input is scored as uncompilable by assess().
      }
      const auto a = qd::assess(source, params);
      std::optional<qd::Archive> archive;
      if (!eval_run.empty()) {
        archive.emplace(std::move(hub::load_run(eval_run).state.archive));
      } else if (!eval_corpus.empty()) {
        const auto corpus = hub::load_games({eval_corpus}, macros_from(eval_macros));
        const auto vectors = hub::corpus_concepts(corpus, eval_cfg, eval_seed, qd::WorkerPool(1));
        archive.emplace(concepts::fit_projection(vectors, 2));
        for (const auto& v : vectors) archive->baseline_cells.insert(archive->locate(v));
      }
      emit(hub::evaluation_json(fs::path(game_path).stem().string(), a, archive ? &*archive : nullptr), eval_out);
    } else if (preprocess->parsed()) {
      const auto tree = gdl::preprocess(gdl::parse_game(read_file(pre_in)), macros_from(pre_macros));
      emit(gdl::print_canonical(tree) + "\n", pre_out);
    } else if (stats->parsed()) {
      const auto games = hub::load_games({stats_corpus}, macros_from(stats_macros));
      std::vector<std::string> corpus;
      std::vector<gdl::GameTree> trees;
      for (const auto& g : games) {
        corpus.push_back(g.source);
        trees.push_back(gdl::parse_game(g.source));
      }
      const auto library = mutate::SubtreeLibrary::harvest(trees);
      mutate::GrammarSamplerParams gp;
      std::vector<std::pair<std::string, mutate::MutationStatsRow>> rows;
      rows.emplace_back("grammar", mutate::mutation_stats(
                                       corpus,
                                       [&](const mutate::MutationRequest& r, Rng& rng) {
                                         return mutate::grammar_mutate(r, gdl::default_grammar(), library, gp, rng);
                                       },
                                       stats_n, stats_seed));
      if (!stats_endpoint.empty()) {
        mutate::InfillEndpointConfig ic;
        ic.url = stats_endpoint;
        rows.emplace_back("infill", mutate::mutation_stats(
                                        corpus,
                                        [&](const mutate::MutationRequest& r, Rng&) {
                                          auto res = mutate::infill_mutate(r, ic);
                                          if (!res.ok()) throw Error(Errc::Io, res.message);
                                          return res.candidate;
                                        },
                                        stats_n, stats_seed));
      }
      if (stats_controls) {
        rows.emplace_back("identity", mutate::mutation_stats(
                                          corpus, [](const mutate::MutationRequest& r, Rng&) { return r.parent; },
                                          stats_n, stats_seed));
        rows.emplace_back("garbage", mutate::mutation_stats(
                                         corpus,
                                         [](const mutate::MutationRequest& r, Rng&) {
                                           return r.prefix + "(((" + r.suffix;
                                         },
                                         stats_n, stats_seed));
      }
      emit(mutate::format_mutation_table(rows), stats_out);
    } else if (sweep->parsed()) {
      std::vector<fs::path> sweep_paths{sweep_corpus};
      sweep_paths.insert(sweep_paths.end(), sweep_extra.begin(), sweep_extra.end());
      const auto games = hub::load_games(sweep_paths, macros_from(sweep_macros));
      const auto vectors = hub::corpus_concepts(games, sweep_eval, sweep_seed, qd::WorkerPool(1));
      std::vector<int> dims;
      for (auto d : parse_ll_list(sweep_dims)) dims.push_back(static_cast<int>(d));
      const auto cells = parse_ll_list(sweep_cells);
      const auto rows = concepts::occupancy_sweep(vectors, dims, cells);
      std::ostringstream out;
      out << "Occupied cells for " << games.size() << " games\n";
      out << std::setw(6) << "Dims";
      for (auto c : cells) out << " | " << std::setw(7) << c;
      out << '\n';
      for (int d : dims) {
        out << std::setw(6) << d;
        for (const auto& r : rows)
          if (r.dims == d) out << " | " << std::setw(7) << r.occupied;
        out << '\n';
      }
      out << "\nRegions per axis\n";
      for (const auto& r : rows) {
        out << "D=" << r.dims << " C=" << r.target_cells << ": [";
        for (std::size_t i = 0; i < r.regions.size(); ++i) out << (i ? "," : "") << r.regions[i];
        out << "]\n";
      }
      emit(out.str(), sweep_out);
    } else if (derive->parsed()) {
      const auto games = hub::load_games({derive_corpus}, macros_from(derive_macros));
      const auto variants = hub::derive_variants(games, derive_n, derive_seed);
      fs::create_directories(derive_out);
      for (std::size_t i = 0; i < variants.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "variant-%04zu.lud", i + 1);
        emit(variants[i] + "\n", (fs::path(derive_out) / name).string());
      }
      std::fprintf(stderr, "wrote %zu variants to %s\n", variants.size(), derive_out.c_str());
    } else if (heat->parsed()) {
      const auto loaded = hub::load_run(heat_run, heat_step);
      emit(hub::heatmap_json(loaded.state.archive, loaded.state.steps_done), heat_out);
    } else if (serve->parsed()) {
      hub::Service service;
      if (!serve_run.empty()) {
        service = hub::Service::from_run(serve_run);
      } else if (!serve_games.empty()) {
        std::vector<fs::path> paths(serve_games.begin(), serve_games.end());
        service = hub::Service::from_games(hub::load_games(paths, macros_from(serve_macros)));
      } else {
        throw Error(Errc::Config, "serve needs --run or --games");
      }
      std::fprintf(stderr, "listening on http://%s:%d\n", host.c_str(), port);
      hub::serve(service, host, port);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return e.code() == Errc::Config || e.code() == Errc::Io ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
