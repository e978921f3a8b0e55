#include "gavel/qd/archive.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

#include "gavel/common/error.hpp"
#include "gavel/engine/engine.hpp"
#include "gavel/gdl/parser.hpp"

namespace gavel::qd {

std::string_view to_string(AddResult::Kind kind) noexcept {
  switch (kind) {
    case AddResult::Kind::Inserted: return "inserted";
    case AddResult::Kind::Replaced: return "replaced";
    case AddResult::Kind::Rejected: return "rejected";
  }
  return "?";
}

Archive::Archive(concepts::Projection projection, ArchiveGeometry geometry)
    : projection_(std::move(projection)), geometry_(geometry) {
  if (geometry_.regions < 1 || !(geometry_.lo < geometry_.hi))
    throw Error(Errc::InvalidParams, "archive needs regions >= 1 and lo < hi");
  if (projection_.dims() != 2) throw Error(Errc::InvalidParams, "archive projection must be two-dimensional");
}

CellCoord Archive::locate(const concepts::ConceptVector& v, double* x, double* y) const {
  const auto [px, py] = concepts::project(projection_, v);
  if (x) *x = px;
  if (y) *y = py;
  return concepts::cell_of(px, py, geometry_.regions, geometry_.lo, geometry_.hi);
}

AddResult Archive::add(CandidateRecord record) {
  if (record.fitness.stage == eval::Stage::Uncompilable)
    throw Error(Errc::InvalidParams, "uncompilable candidates cannot be archived");
  record.cell = locate(record.concepts, &record.x, &record.y);

  AddResult result;
  result.cell = record.cell;
  ArchiveEvent ev;
  ev.id = record.id;
  ev.cell = record.cell;
  ev.fitness = record.fitness.value;
  ev.step = record.step;

  auto it = grid_.find(record.cell);
  if (it == grid_.end()) {
    result.kind = AddResult::Kind::Inserted;
    ev.kind = ArchiveEvent::Kind::Add;
    score_ += record.fitness.value + 2;
    grid_.emplace(record.cell, std::move(record));
  } else if (record.fitness.value > it->second.fitness.value) {
    result.kind = AddResult::Kind::Replaced;
    ev.kind = ArchiveEvent::Kind::Replace;
    ev.replaced_id = it->second.id;
    score_ += record.fitness.value - it->second.fitness.value;
    result.old = std::move(it->second);
    it->second = std::move(record);
  } else {
    return result;
  }
  ev.qd_score_after = score_;
  ev.occupied_after = occupied();
  history_.push_back(std::move(ev));
  return result;
}

const CandidateRecord* Archive::at(CellCoord cell) const {
  const auto it = grid_.find(cell);
  return it == grid_.end() ? nullptr : &it->second;
}

AddResult archive_add(Archive& archive, CandidateRecord record) { return archive.add(std::move(record)); }

std::vector<const CandidateRecord*> select_parents(const Archive& archive, int j, Rng& rng) {
  if (archive.empty()) throw Error(Errc::EmptyArchive, "cannot select parents from an empty archive");
  std::vector<const CandidateRecord*> occupied;
  occupied.reserve(archive.cells().size());
  for (const auto& [cell, rec] : archive.cells()) occupied.push_back(&rec);
  std::vector<const CandidateRecord*> out;
  out.reserve(static_cast<std::size_t>(std::max(j, 0)));
  for (int i = 0; i < j; ++i) out.push_back(occupied[rng.below(occupied.size())]);
  return out;
}

double qd_score(const Archive& archive) { return archive.score(); }

ArchiveReport report(const Archive& archive) {
  ArchiveReport r;
  r.qd_score = qd_score(archive);
  r.occupied = archive.occupied();
  for (const auto& [cell, rec] : archive.cells()) {
    const bool novel = !archive.baseline_cells.contains(cell);
    const double f = rec.fitness.value;
    r.playable += f > 0;
    r.above_half += f > 0.5;
    r.novel_cells += novel;
    r.novel_playable += novel && f > 0;
    r.novel_above_half += novel && f > 0.5;
  }
  return r;
}

Assessment assess(const std::string& source, const eval::EvalParams& params) {
  Assessment a;
  std::optional<gdl::GameTree> tree;
  std::optional<engine::CompiledGame> game;
  try {
    tree = gdl::parse_game(source);
    game = engine::compile(*tree);
  } catch (const Error& e) {
    a.fitness.detail = e.what();
    return a;
  }
  a.fitness = eval::evaluate(*game, params);
  a.concepts = concepts::extract_concepts(*game, *tree, a.fitness.stats ? &*a.fitness.stats : nullptr);
  return a;
}

std::uint64_t evaluation_seed(std::uint64_t master_seed, std::string_view source) {
  return derive_seed(master_seed, fnv1a(source));
}

WorkerPool::WorkerPool(int workers) : workers_(std::max(1, workers)) {}

int WorkerPool::default_workers() {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, hw - 1);
}

void WorkerPool::run(std::size_t n, const std::function<void(std::size_t)>& fn) const {
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(workers_), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string RunState::next_id() {
  char buf[32];
  std::snprintf(buf, sizeof buf, "g%06lld", next_seq);
  return buf;
}

namespace {

struct Pending {
  std::string text;
  const CandidateRecord* parent = nullptr;
  mutate::MutationRequest request;
  Assessment result;
  std::string error;
};

}  // namespace

StepReport step(RunState& run, const mutate::MutationOperator& mutator, const Evaluator& evaluator,
                const StepConfig& config, const WorkerPool& pool, const CommitHook& on_commit) {
  if (config.j < 1 || config.k < 1) throw Error(Errc::InvalidParams, "j and k must be >= 1");
  StepReport rep;
  rep.step = run.steps_done + 1;
  const std::uint64_t step_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(rep.step));
  Rng rng(step_seed);

  // Parents are copied out: archive adds later in the step may replace them.
  std::vector<CandidateRecord> parents;
  for (const auto* p : select_parents(run.archive, config.j, rng)) parents.push_back(*p);

  std::vector<Pending> batch;
  std::unordered_set<std::uint64_t> in_batch;
  int attempt = 0;
  for (const auto& parent : parents) {
    for (int i = 0; i < config.k; ++i, ++attempt) {
      ++rep.attempts;
      Rng arng(derive_seed(step_seed, static_cast<std::uint64_t>(attempt) + 1));
      Pending p;
      p.parent = &parent;
      std::string candidate;
      try {
        p.request = run.bandit ? mutate::make_request(parent.source, arng, *run.bandit)
                               : mutate::make_request(parent.source, arng);
        candidate = mutator(p.request, arng);
      } catch (const std::exception& e) {
        ++rep.request_failures;
        rep.errors.push_back(e.what());
        continue;
      }
      p.text = mutate::canonical_text(candidate).value_or(candidate);
      if (p.text == parent.source) {
        ++rep.unchanged;
        continue;
      }
      const std::uint64_t h = fnv1a(p.text);
      if (in_batch.contains(h)) {
        ++rep.duplicates;
        continue;
      }
      if (run.evaluated.contains(h)) {
        ++rep.cached;
        continue;
      }
      in_batch.insert(h);
      batch.push_back(std::move(p));
    }
  }

  pool.run(batch.size(), [&](std::size_t i) {
    auto& p = batch[i];
    try {
      p.result = evaluator(p.text, evaluation_seed(config.master_seed, p.text));
    } catch (const std::exception& e) {
      p.error = e.what();
      p.result = Assessment{};
      p.result.fitness.detail = p.error;
    }
  });

  for (auto& p : batch) {
    ++rep.evaluated;
    const std::uint64_t h = fnv1a(p.text);
    run.evaluated.insert(h);
    rep.evaluated_hashes.push_back(h);
    if (!p.error.empty()) rep.errors.push_back(p.error);
    if (p.result.fitness.stage == eval::Stage::Uncompilable) {
      ++rep.uncompilable;
      continue;
    }
    CandidateRecord rec;
    rec.id = run.next_id();
    rec.source = p.text;
    rec.fitness = std::move(p.result.fitness);
    rec.concepts = std::move(p.result.concepts);
    rec.lineage.parent_id = p.parent->id;
    rec.lineage.span = p.request.site.span;
    rec.lineage.op = config.op_tag;
    rec.lineage.arm = p.request.arm;
    rec.lineage.generation = p.parent->lineage.generation + 1;
    rec.step = rep.step;
    rec.seq = run.next_seq++;
    const AddResult res = run.archive.add(std::move(rec));
    switch (res.kind) {
      case AddResult::Kind::Inserted: ++rep.inserted; break;
      case AddResult::Kind::Replaced: ++rep.replaced; break;
      case AddResult::Kind::Rejected: ++rep.rejected; break;
    }
    if (res.accepted()) {
      if (run.bandit) run.bandit->record_success(p.request.arm);
      if (on_commit) on_commit(*run.archive.at(res.cell), res);
    }
  }
  run.steps_done = rep.step;
  return rep;
}

}  // namespace gavel::qd
