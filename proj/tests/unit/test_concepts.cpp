#include <gtest/gtest.h>

#include <cmath>

#include "gavel/common/error.hpp"
#include "gavel/common/rng.hpp"
#include "gavel/concepts/concepts.hpp"
#include "gavel/hub/run.hpp"
#include "support/support.hpp"

using namespace gavel;
using namespace gavel::concepts;
using gavel::test::corpus_dir;
using gavel::test::corpus_source;

namespace {

int index_of(std::string_view name) {
  const auto cat = catalog();
  for (std::size_t i = 0; i < cat.size(); ++i)
    if (cat[i].name == name) return static_cast<int>(i);
  throw std::runtime_error("unknown concept " + std::string(name));
}

double bit(const ConceptVector& v, std::string_view name) { return v.bits[index_of(name)]; }

ConceptVector concepts_of(const std::string& name, bool with_stats = false) {
  const auto tree = gdl::parse_game(corpus_source(name));
  const auto game = engine::compile(tree);
  if (!with_stats) return extract_concepts(game, tree);
  const auto st = eval::random_eval(game, 30, 50, 1);
  return extract_concepts(game, tree, &st);
}

ConceptVector vec(std::initializer_list<std::pair<int, double>> set) {
  ConceptVector v;
  v.bits.assign(catalog_size(), 0.0);
  for (auto [i, x] : set) v.bits[i] = x;
  return v;
}

/// Concept vectors of every bundled game, hand-written and reference.
const std::vector<ConceptVector>& bundled() {
  static const std::vector<ConceptVector> out = [] {
    const auto games = hub::load_games({corpus_dir(), corpus_dir() / "reference"}, gdl::load_macros(corpus_dir() / "macros"));
    hub::EvalConfig cfg;
    cfg.n_random = 30;
    return hub::corpus_concepts(games, cfg, 1, qd::WorkerPool(1));
  }();
  return out;
}

}  // namespace

// ---------------------------------------------------------------- catalog

TEST(Catalog, NamesAreUniqueAndLargeEnough) {
  const auto cat = catalog();
  EXPECT_GE(cat.size(), 32u);
  EXPECT_EQ(static_cast<int>(cat.size()), catalog_size());
  std::set<std::string_view> names;
  for (const auto& e : cat) EXPECT_TRUE(names.insert(e.name).second) << e.name;
}

// ---------------------------------------------------------------- extraction

TEST(Extract, Havabu) {
  const auto v = concepts_of("havabu");
  EXPECT_EQ(bit(v, "board_hex"), 0);
  EXPECT_EQ(bit(v, "board_square"), 1);
  EXPECT_EQ(bit(v, "move_add"), 1);
  EXPECT_EQ(bit(v, "move_hop"), 0);
  EXPECT_EQ(bit(v, "end_connection"), 1);
  EXPECT_EQ(bit(v, "end_line"), 0);
}

TEST(Extract, YavaGo) {
  const auto v = concepts_of("yavago");
  EXPECT_EQ(bit(v, "capture_enclose"), 1);
  EXPECT_EQ(bit(v, "meta_no_repeat"), 1);
  EXPECT_EQ(bit(v, "end_line"), 1);
  EXPECT_EQ(bit(v, "board_hex"), 1);
}

TEST(Extract, HopThroughDiffersFromYavaGo) {
  const auto a = concepts_of("hopthrough", true), b = concepts_of("yavago", true);
  int diff = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) diff += a.bits[i] != b.bits[i];
  EXPECT_GE(diff, 5);
}

TEST(Extract, BehaviouralBitsNeedStats) {
  const auto bare = concepts_of("havabu"), full = concepts_of("havabu", true);
  bool some_behaviour = false;
  for (std::size_t i = 0; i < catalog().size(); ++i) {
    EXPECT_TRUE(bare.bits[i] == 0 || bare.bits[i] == 1);
    if (catalog()[i].source == ConceptEntry::Source::Behavioral) {
      EXPECT_EQ(bare.bits[i], 0) << catalog()[i].name;
      some_behaviour |= full.bits[i] == 1;
    } else {
      EXPECT_EQ(bare.bits[i], full.bits[i]) << catalog()[i].name;
    }
  }
  EXPECT_TRUE(some_behaviour);
  EXPECT_EQ(concepts_of("havabu").bits, bare.bits);
}

// ---------------------------------------------------------------- PCA

TEST(Projection, IdenticalVectorsAreDegenerate) {
  const std::vector<ConceptVector> corpus(5, vec({{0, 1}, {3, 1}}));
  try {
    fit_projection(corpus);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateCorpus);
  }
}

TEST(Projection, TooFewVectors) {
  const std::vector<ConceptVector> corpus = {vec({{0, 1}}), vec({{1, 1}})};
  EXPECT_THROW(fit_projection(corpus), Error);
}

TEST(Projection, RankOneIsDegenerate) {
  const std::vector<ConceptVector> corpus = {vec({}), vec({{4, 1}}), vec({{4, 1}}), vec({})};
  EXPECT_THROW(fit_projection(corpus), Error);
}

TEST(Projection, IndependentFactorsGiveAxisComponents) {
  // Bit 1 splits the corpus in half (variance 1/4); bit 2 is set in a quarter
  // of it (variance 3/16) independently of bit 1.
  const int b1[8] = {1, 1, 1, 1, 0, 0, 0, 0};
  const int b2[8] = {1, 0, 0, 0, 1, 0, 0, 0};
  std::vector<ConceptVector> corpus;
  for (int i = 0; i < 8; ++i) corpus.push_back(vec({{1, double(b1[i])}, {2, double(b2[i])}, {7, 1}}));
  const auto p = fit_projection(corpus);
  ASSERT_EQ(p.dims(), 2);
  for (int c = 0; c < catalog_size(); ++c) {
    EXPECT_NEAR(std::abs(p.components[0][c]), c == 1 ? 1.0 : 0.0, 1e-9);
    EXPECT_NEAR(std::abs(p.components[1][c]), c == 2 ? 1.0 : 0.0, 1e-9);
  }
  EXPECT_NEAR(p.scale[0], 0.5, 1e-12);
  EXPECT_NEAR(p.scale[1], std::sqrt(3.0 / 16), 1e-12);
  EXPECT_NEAR(p.explained_variance_ratio[0], 0.25 / (0.25 + 3.0 / 16), 1e-12);
}

TEST(Projection, CorrelatedPairGivesDiagonalComponents) {
  // Equal variances 1/4 and covariance 1/12: eigenvectors (1,1)/sqrt2 and
  // (1,-1)/sqrt2 with eigenvalues 1/4 +- 1/12.
  const int b1[6] = {0, 1, 0, 1, 1, 0};
  const int b2[6] = {0, 1, 1, 0, 1, 0};
  std::vector<ConceptVector> corpus;
  for (int i = 0; i < 6; ++i) corpus.push_back(vec({{1, double(b1[i])}, {2, double(b2[i])}}));
  const auto p = fit_projection(corpus);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(p.components[0][1]), r, 1e-9);
  EXPECT_NEAR(p.components[0][1] * p.components[0][2], 0.5, 1e-9);
  EXPECT_NEAR(p.components[1][1] * p.components[1][2], -0.5, 1e-9);
  EXPECT_NEAR(p.scale[0] * p.scale[0], 0.25 + 1.0 / 12, 1e-12);
  EXPECT_NEAR(p.scale[1] * p.scale[1], 0.25 - 1.0 / 12, 1e-12);
}

TEST(Projection, BundledCorpus) {
  const auto& corpus = bundled();
  ASSERT_GE(corpus.size(), 10u);
  const auto p = fit_projection(corpus);
  // Orthonormal rows.
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double dot = 0;
      for (int c = 0; c < catalog_size(); ++c) dot += p.components[a][c] * p.components[b][c];
      EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-9);
    }
  EXPECT_GT(p.scale[0], 0);
  EXPECT_GT(p.scale[1], 0);
  EXPECT_GT(p.explained_variance_ratio[0], 0);
  EXPECT_GE(p.explained_variance_ratio[0], p.explained_variance_ratio[1]);

  // The mean maps to the origin; projected corpus has variance spread^2.
  ConceptVector mean;
  mean.bits = p.mean;
  const auto [mx, my] = project(p, mean);
  EXPECT_NEAR(mx, 0, 1e-12);
  EXPECT_NEAR(my, 0, 1e-12);

  int inside = 0;
  double sx = 0, sxx = 0;
  for (const auto& v : corpus) {
    const auto [x, y] = project(p, v);
    inside += std::abs(x) <= 5 && std::abs(y) <= 5;
    sx += x;
    sxx += x * x;
  }
  const double n = corpus.size();
  EXPECT_NEAR(sx / n, 0, 1e-9);
  EXPECT_NEAR(sxx / n, p.spread * p.spread, 1e-9);
  EXPECT_GE(inside / n, 0.95);
}

TEST(Projection, SignFlipNegatesCoordinate) {
  auto p = fit_projection(bundled());
  const auto& v = bundled()[3];
  const auto [x, y] = project(p, v);
  for (auto& c : p.components[0]) c = -c;
  const auto [fx, fy] = project(p, v);
  EXPECT_DOUBLE_EQ(fx, -x);
  EXPECT_DOUBLE_EQ(fy, y);
}

TEST(Projection, DeterministicAndChecked) {
  const auto p = fit_projection(bundled());
  for (const auto& v : bundled()) EXPECT_EQ(project(p, v), project(p, v));
  ConceptVector shorter;
  shorter.bits.assign(catalog_size() - 1, 0.0);
  try {
    project(p, shorter);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CatalogMismatch);
  }
}

TEST(Projection, JsonRoundTrip) {
  const auto p = fit_projection(bundled());
  const auto q = projection_from_json(projection_to_json(p));
  EXPECT_EQ(q.mean, p.mean);
  EXPECT_EQ(q.components, p.components);
  EXPECT_EQ(q.scale, p.scale);
  EXPECT_EQ(q.spread, p.spread);
  for (const auto& v : bundled()) EXPECT_EQ(project(p, v), project(q, v));
}

// ---------------------------------------------------------------- cells

TEST(Cells, Examples) {
  EXPECT_EQ(cell_of(0, 0), (CellCoord{20, 20}));
  EXPECT_EQ(cell_of(-5, -5), (CellCoord{0, 0}));
  EXPECT_EQ(cell_of(5.3, 0), (CellCoord{39, 20}));
  EXPECT_EQ(cell_of(-100, 100), (CellCoord{0, 39}));
}

TEST(Cells, NonFinite) {
  for (double bad : {std::nan(""), double(INFINITY)}) {
    try {
      cell_of(bad, 0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::NonFinite);
    }
  }
}

TEST(Cells, TilingCoversEachPointOnce) {
  Rng rng(4);
  for (int t = 0; t < 5000; ++t) {
    const double x = -5 + 10 * rng.uniform(), y = -5 + 10 * rng.uniform();
    const auto c = cell_of(x, y);
    // Interval [lo + i*w, lo + (i+1)*w) must contain x.
    EXPECT_LE(-5 + c.i * 0.25, x + 1e-12);
    EXPECT_GT(-5 + (c.i + 1) * 0.25, x - 1e-12);
    EXPECT_LE(-5 + c.j * 0.25, y + 1e-12);
    EXPECT_GT(-5 + (c.j + 1) * 0.25, y - 1e-12);
  }
}

TEST(Geometry, Examples) {
  EXPECT_EQ(archive_geometry(1000, 4), (std::vector<int>{8, 5, 5, 5}));
  EXPECT_EQ(archive_geometry(1600, 2), (std::vector<int>{40, 40}));
  EXPECT_EQ(archive_geometry(100, 1), (std::vector<int>{100}));
  EXPECT_THROW(archive_geometry(0, 2), Error);
  EXPECT_THROW(archive_geometry(10, 0), Error);
}

TEST(Geometry, TotalStaysWithinBudget) {
  for (long long c = 1; c <= 5000; c += 7)
    for (int d = 1; d <= 6; ++d) {
      const auto r = archive_geometry(c, d);
      ASSERT_EQ(static_cast<int>(r.size()), d);
      long long b = 1;
      while (std::pow(double(b + 1), d) <= double(c)) ++b;
      long double total = 1, base = 1;
      for (int a = 0; a < d; ++a) {
        total *= r[a];
        base *= b;
        if (a > 0) EXPECT_EQ(r[a], b);
      }
      EXPECT_LE(total, c) << c << " " << d;
      EXPECT_GE(total, base) << c << " " << d;
    }
}

TEST(Sweep, SingleGame) {
  const std::vector<ConceptVector> one = {bundled()[0]};
  const int dims[] = {1, 2, 4};
  const long long cells[] = {10, 100, 1000};
  for (const auto& row : occupancy_sweep(one, dims, cells)) EXPECT_EQ(row.occupied, 1);
}

TEST(Sweep, PigeonholeBound) {
  const int dims[] = {2, 3, 4};
  const long long cells[] = {4, 50, 500, 5000};
  const auto rows = occupancy_sweep(bundled(), dims, cells);
  EXPECT_EQ(rows.size(), 12u);
  for (const auto& row : rows) {
    long long product = 1;
    for (int r : row.regions) product *= r;
    EXPECT_GE(row.occupied, 1);
    EXPECT_LE(row.occupied, std::min<long long>(bundled().size(), product));
    EXPECT_EQ(row.regions, archive_geometry(row.target_cells, row.dims));
  }
}
