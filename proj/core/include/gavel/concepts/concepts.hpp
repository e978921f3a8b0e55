#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gavel/engine/game.hpp"
#include "gavel/eval/eval.hpp"
#include "gavel/gdl/tree.hpp"

namespace gavel::concepts {

inline constexpr int kCatalogVersion = 1;

struct ConceptEntry {
  std::string_view name;
  enum class Source { Syntactic, Behavioral } source;
};

/// Fixed, ordered concept list.
std::span<const ConceptEntry> catalog();
int catalog_size();

struct ConceptVector {
  std::vector<double> bits;  // 0/1
  int catalog_version = kCatalogVersion;
};

/// Syntactic bits come from the tree and compiled game; behavioural bits are
/// thresholded from random-play statistics and stay 0 when none are given.
ConceptVector extract_concepts(const engine::CompiledGame& game, const gdl::GameTree& tree,
                               const eval::RandomEvalStats* stats = nullptr);

struct Projection {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;  // k rows of length d
  std::vector<double> scale;                    // per-component std-dev of corpus scores
  std::vector<double> explained_variance_ratio;
  double spread = 2.0;
  int catalog_version = kCatalogVersion;

  int dims() const { return static_cast<int>(components.size()); }
};

/// PCA over the corpus. Throws Error(DegenerateCorpus) when fewer than three
/// vectors are given or the covariance has rank < k.
Projection fit_projection(std::span<const ConceptVector> corpus, int k = 2);

/// Coordinates scaled to unit corpus variance times the spread factor.
std::vector<double> project_k(const Projection& p, const ConceptVector& v);
std::pair<double, double> project(const Projection& p, const ConceptVector& v);

struct CellCoord {
  int i = 0;
  int j = 0;
  friend auto operator<=>(const CellCoord&, const CellCoord&) = default;
};

/// Equal-width bucket in [lo, hi), clamped to [0, regions - 1].
int bucket(double x, int regions, double lo = -5, double hi = 5);
CellCoord cell_of(double x, double y, int regions_per_axis = 40, double lo = -5, double hi = 5);

/// Regions per axis for about `target_cells` cells over `dims` axes.
std::vector<int> archive_geometry(long long target_cells, int dims);

struct SweepRow {
  int dims = 0;
  long long target_cells = 0;
  std::vector<int> regions;
  int occupied = 0;
};

std::vector<SweepRow> occupancy_sweep(std::span<const ConceptVector> corpus, std::span<const int> dims,
                                      std::span<const long long> target_cells);

std::string projection_to_json(const Projection& p);
Projection projection_from_json(std::string_view text);

}  // namespace gavel::concepts
