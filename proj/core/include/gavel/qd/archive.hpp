#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "gavel/common/rng.hpp"
#include "gavel/concepts/concepts.hpp"
#include "gavel/eval/eval.hpp"
#include "gavel/gdl/tree.hpp"
#include "gavel/mutate/mutate.hpp"
#include "gavel/qd/bandit.hpp"

namespace gavel::qd {

using concepts::CellCoord;

struct Lineage {
  std::string parent_id;  // empty for seeds
  gdl::Span span;         // mutated span in the parent's canonical text
  std::string op;         // operator tag: "seed", "grammar", "infill", ...
  std::string arm;        // leading keyword of the replaced expression
  int generation = 0;
};

struct CandidateRecord {
  std::string id;
  std::string source;  // canonical text
  eval::Fitness fitness;
  concepts::ConceptVector concepts;
  double x = 0;
  double y = 0;
  CellCoord cell;
  Lineage lineage;
  // Logical timestamps: the step that produced the record and its position
  // in the run's commit order.
  int step = 0;
  long long seq = 0;
};

struct ArchiveGeometry {
  int regions = 40;
  double lo = -5;
  double hi = 5;
};

struct ArchiveEvent {
  enum class Kind { Add, Replace };
  Kind kind = Kind::Add;
  std::string id;
  std::string replaced_id;
  CellCoord cell;
  double fitness = 0;
  double qd_score_after = 0;
  int occupied_after = 0;
  int step = 0;
};

struct AddResult {
  enum class Kind { Inserted, Replaced, Rejected };
  Kind kind = Kind::Rejected;
  CellCoord cell;
  std::optional<CandidateRecord> old;

  bool accepted() const { return kind != Kind::Rejected; }
};

std::string_view to_string(AddResult::Kind kind) noexcept;

class Archive {
 public:
  Archive(concepts::Projection projection, ArchiveGeometry geometry = {});

  const concepts::Projection& projection() const { return projection_; }
  const ArchiveGeometry& geometry() const { return geometry_; }

  /// Projects concepts and buckets them into a cell.
  CellCoord locate(const concepts::ConceptVector& v, double* x = nullptr, double* y = nullptr) const;

  /// Fills x, y and cell from the record's concepts, then inserts on an empty
  /// cell or replaces an occupant of strictly lower fitness. Throws
  /// Error(InvalidParams) for uncompilable candidates.
  AddResult add(CandidateRecord record);

  const CandidateRecord* at(CellCoord cell) const;
  const std::map<CellCoord, CandidateRecord>& cells() const { return grid_; }
  int occupied() const { return static_cast<int>(grid_.size()); }
  bool empty() const { return grid_.empty(); }
  /// Running sum of (fitness + 2), updated by each accepted add.
  double score() const { return score_; }

  std::set<CellCoord> baseline_cells;
  const std::vector<ArchiveEvent>& history() const { return history_; }

 private:
  concepts::Projection projection_;
  ArchiveGeometry geometry_;
  std::map<CellCoord, CandidateRecord> grid_;
  std::vector<ArchiveEvent> history_;
  double score_ = 0;
};

AddResult archive_add(Archive& archive, CandidateRecord record);

/// j uniform draws with replacement over occupied cells, in cell order.
/// Throws Error(EmptyArchive).
std::vector<const CandidateRecord*> select_parents(const Archive& archive, int j, Rng& rng);

/// Sum of (fitness + 2) over occupied cells.
double qd_score(const Archive& archive);

struct ArchiveReport {
  double qd_score = 0;
  int occupied = 0;
  int playable = 0;      // fitness > 0
  int above_half = 0;    // fitness > 0.5
  int novel_playable = 0;
  int novel_above_half = 0;
  int novel_cells = 0;   // occupied cells outside the baseline
};

ArchiveReport report(const Archive& archive);

// Evolution step ---------------------------------------------------------------

struct Assessment {
  eval::Fitness fitness;
  concepts::ConceptVector concepts;  // empty when uncompilable
};

/// Full evaluation of a canonical source: Alg. 1 fitness plus concepts.
using Evaluator = std::function<Assessment(const std::string& source, std::uint64_t seed)>;

/// Compiles, evaluates and extracts concepts. Never throws for bad games.
Assessment assess(const std::string& source, const eval::EvalParams& params);

/// Per-candidate evaluation seed: depends only on the run seed and the text.
std::uint64_t evaluation_seed(std::uint64_t master_seed, std::string_view source);

/// Fixed-size pool mapping an index range through a function. Results are
/// returned in index order.
class WorkerPool {
 public:
  explicit WorkerPool(int workers);
  int workers() const { return workers_; }
  void run(std::size_t n, const std::function<void(std::size_t)>& fn) const;

  /// Logical cores minus one, at least one.
  static int default_workers();

 private:
  int workers_;
};

struct StepConfig {
  int j = 3;
  int k = 3;
  std::uint64_t master_seed = 1;
  std::string op_tag = "grammar";
};

struct StepReport {
  int step = 0;
  int attempts = 0;
  int request_failures = 0;  // no mutable site or operator error
  int unchanged = 0;
  int duplicates = 0;        // repeated within the batch
  int cached = 0;            // evaluated earlier in the run
  int evaluated = 0;
  int uncompilable = 0;
  int inserted = 0;
  int replaced = 0;
  int rejected = 0;
  std::vector<std::string> errors;
  std::vector<std::uint64_t> evaluated_hashes;  // fnv1a of evaluated texts, in commit order
};

/// Mutable state carried across steps of one run.
struct RunState {
  Archive archive;
  std::optional<BanditStats> bandit;
  std::unordered_set<std::uint64_t> evaluated;  // fnv1a of every evaluated text
  long long next_seq = 0;
  int steps_done = 0;

  std::string next_id();
};

/// Callback fired for each committed archive change.
using CommitHook = std::function<void(const CandidateRecord& record, const AddResult& result)>;

/// One MAP-Elites step: j parents, k mutations each, dedup, parallel
/// evaluation, archive adds in submission order. The step RNG is derived from
/// (master seed, step index) so resumed runs replay identically.
StepReport step(RunState& run, const mutate::MutationOperator& mutator, const Evaluator& evaluator,
                const StepConfig& config, const WorkerPool& pool, const CommitHook& on_commit = {});

}  // namespace gavel::qd
