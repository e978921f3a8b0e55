#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gavel/concepts/concepts.hpp"
#include "gavel/gdl/preprocess.hpp"
#include "gavel/hub/config.hpp"
#include "gavel/qd/archive.hpp"

namespace gavel::hub {

inline constexpr std::string_view kEventSchema = "gavel.event/1";
inline constexpr std::string_view kArchiveSchema = "gavel.archive/1";
inline constexpr std::string_view kReportSchema = "gavel.report/1";
inline constexpr std::string_view kHeatmapSchema = "gavel.heatmap/1";

struct GameSource {
  std::string name;  // file stem
  std::filesystem::path path;
  std::string source;  // preprocessed canonical text
};

/// Reads `.lud` files (directories are scanned non-recursively, sorted by
/// name), expands macros and anonymises names. Throws Error(Io) or parse
/// errors naming the file.
std::vector<GameSource> load_games(const std::vector<std::filesystem::path>& paths, const gdl::MacroTable& macros);

/// Concept vectors of the reference corpus, behavioural bits from random
/// play seeded per game text.
std::vector<concepts::ConceptVector> corpus_concepts(const std::vector<GameSource>& corpus, const EvalConfig& eval,
                                                     std::uint64_t master_seed, const qd::WorkerPool& pool);

/// `n` distinct compilable grammar variants grown from `corpus` (parents
/// drawn from the originals and earlier variants). Deterministic in `seed`.
std::vector<std::string> derive_variants(const std::vector<GameSource>& corpus, int n, std::uint64_t seed,
                                         const mutate::GrammarSamplerParams& params = {});

struct RunSummary {
  std::filesystem::path dir;
  qd::ArchiveReport report;
  int steps_done = 0;
  int evaluations = 0;  // candidate evaluations in this invocation
  bool resumed = false;
};

using ProgressFn = std::function<void(const qd::StepReport&, const qd::Archive&)>;

/// Fresh run into config.output. Fails with Error(Config) if the directory
/// already holds an event log. `max_steps` bounds the steps taken by this
/// invocation (the run can be continued with resume()).
RunSummary evolve(const RunConfig& config, const ProgressFn& progress = {}, std::optional<int> max_steps = {});

/// Continues a run from its event log, dropping a trailing incomplete step.
/// `steps` overrides the configured total.
RunSummary resume(const std::filesystem::path& dir, std::optional<int> steps = {}, const ProgressFn& progress = {},
                  std::optional<int> max_steps = {});

struct LoadedRun {
  RunConfig config;
  qd::RunState state;
  int events = 0;
};

/// Rebuilds the archive from a run directory. With `up_to_step`, only
/// changes committed at or before that step are applied (0 = seeds only).
LoadedRun load_run(const std::filesystem::path& dir, std::optional<int> up_to_step = {});

/// Best fitness per cell as a regions x regions matrix (null for empty cells).
std::string heatmap_json(const qd::Archive& archive, int step);

std::string archive_json(const qd::Archive& archive, int step);
std::string report_json(const qd::Archive& archive, int step);

/// Compact machine-readable evaluation record for one game.
std::string evaluation_json(const std::string& name, const qd::Assessment& a, const qd::Archive* archive);

}  // namespace gavel::hub
