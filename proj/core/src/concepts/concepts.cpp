#include "gavel/concepts/concepts.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <set>

#include "gavel/common/error.hpp"
#include "gavel/gdl/printer.hpp"
#include "json.hpp"

namespace gavel::concepts {

namespace {

using S = ConceptEntry::Source;

constexpr std::array<ConceptEntry, 40> kCatalog = {{
    {"board_square", S::Syntactic},
    {"board_hex", S::Syntactic},
    {"board_rotated", S::Syntactic},
    {"board_small", S::Syntactic},
    {"board_medium", S::Syntactic},
    {"board_large", S::Syntactic},
    {"move_add", S::Syntactic},
    {"move_step", S::Syntactic},
    {"move_slide", S::Syntactic},
    {"move_hop", S::Syntactic},
    {"move_for_each_piece", S::Syntactic},
    {"move_choice", S::Syntactic},
    {"placement_restricted", S::Syntactic},
    {"capture_enclose", S::Syntactic},
    {"capture_replacement", S::Syntactic},
    {"capture_hop", S::Syntactic},
    {"end_line", S::Syntactic},
    {"end_connection", S::Syntactic},
    {"end_race", S::Syntactic},
    {"end_no_moves", S::Syntactic},
    {"end_misere", S::Syntactic},
    {"meta_no_repeat", S::Syntactic},
    {"start_placement", S::Syntactic},
    {"regions_declared", S::Syntactic},
    {"asymmetric", S::Syntactic},
    {"directional_moves", S::Syntactic},
    {"orthogonal_relation", S::Syntactic},
    {"diagonal_relation", S::Syntactic},
    {"line_long", S::Syntactic},
    {"branching_gt_2", S::Behavioral},
    {"branching_gt_8", S::Behavioral},
    {"branching_gt_32", S::Behavioral},
    {"length_gt_10", S::Behavioral},
    {"length_gt_25", S::Behavioral},
    {"length_gt_45", S::Behavioral},
    {"draws_observed", S::Behavioral},
    {"coverage_gt_25", S::Behavioral},
    {"coverage_gt_50", S::Behavioral},
    {"coverage_gt_75", S::Behavioral},
    {"captures_observed", S::Behavioral},
}};

int index_of(std::string_view name) {
  for (std::size_t i = 0; i < kCatalog.size(); ++i)
    if (kCatalog[i].name == name) return static_cast<int>(i);
  return -1;
}

bool has_literal(const gdl::Node& n, std::string_view text) {
  for (const auto& a : n.args)
    if (const auto* l = std::get_if<gdl::Literal>(&a.value); l && l->text == text) return true;
  return false;
}

const gdl::Node* named_child(const gdl::Node& n, std::string_view key) {
  for (const auto& a : n.args)
    if (a.key == key)
      if (const auto* c = std::get_if<gdl::Node>(&a.value)) return c;
  return nullptr;
}

// Positional nodes (flattening brace groups).
std::vector<const gdl::Node*> kids(const gdl::Node& n) {
  std::vector<const gdl::Node*> out;
  for (const auto& a : n.args) {
    if (!a.key.empty()) continue;
    if (const auto* c = std::get_if<gdl::Node>(&a.value)) out.push_back(c);
    if (const auto* s = std::get_if<gdl::NodeSet>(&a.value))
      for (const auto& c : s->items) out.push_back(&c);
  }
  return out;
}

bool is_asymmetric(const gdl::GameTree& tree) {
  std::vector<std::string> programs[3];
  int regions[3] = {0, 0, 0};
  int placements[3] = {0, 0, 0};
  gdl::for_each_node(tree.root, [&](const gdl::Node& n) {
    if (n.head == "piece") {
      const auto ks = kids(n);
      const std::string prog = ks.empty() ? "" : gdl::print_inline(*ks.front());
      if (has_literal(n, "Each") || has_literal(n, "P1")) programs[1].push_back(prog);
      if (has_literal(n, "Each") || has_literal(n, "P2")) programs[2].push_back(prog);
    } else if (n.head == "regions") {
      regions[has_literal(n, "P1") ? 1 : 2]++;
    } else if (n.head == "place" && !n.args.empty()) {
      const auto* l = std::get_if<gdl::Literal>(&n.args.front().value);
      if (l && !l->text.empty()) placements[l->text.back() == '2' ? 2 : 1]++;
    }
  });
  std::sort(programs[1].begin(), programs[1].end());
  std::sort(programs[2].begin(), programs[2].end());
  return programs[1] != programs[2] || regions[1] != regions[2] || placements[1] != placements[2];
}

}  // namespace

std::span<const ConceptEntry> catalog() { return kCatalog; }
int catalog_size() { return static_cast<int>(kCatalog.size()); }

ConceptVector extract_concepts(const engine::CompiledGame& game, const gdl::GameTree& tree,
                               const eval::RandomEvalStats* stats) {
  ConceptVector v;
  v.bits.assign(kCatalog.size(), 0.0);
  auto set = [&](std::string_view name, bool on = true) {
    if (on) v.bits[index_of(name)] = 1.0;
  };

  const auto& board = game.board;
  set("board_square", board.shape() == engine::ShapeKind::Square);
  set("board_hex", board.shape() == engine::ShapeKind::Hex);
  set("board_rotated", board.rotation() != 0);
  set("board_small", board.size() <= 25);
  set("board_medium", board.size() > 25 && board.size() <= 64);
  set("board_large", board.size() > 64);
  set("meta_no_repeat", game.no_repeat);
  set("start_placement", !game.start.empty());
  set("regions_declared", !game.regions[1].empty() || !game.regions[2].empty());
  set("asymmetric", is_asymmetric(tree));

  bool in_end = false;
  std::function<void(const gdl::Node&)> walk = [&](const gdl::Node& n) {
    const std::string_view v0 = gdl::leading_ident(n);
    if (n.head == "move") {
      if (v0 == "Add") set("move_add");
      if (v0 == "Step") set("move_step");
      if (v0 == "Slide") set("move_slide");
      if (v0 == "Hop") set("move_hop");
      if (v0 == "Add")
        for (const auto* k : kids(n))
          if (k->head == "to" && named_child(*k, "if")) set("placement_restricted");
    }
    if (n.head == "forEach") set("move_for_each_piece");
    if (n.head == "or" && !in_end) set("move_choice");
    if (n.head == "enclose") set("capture_enclose");
    if (n.head == "remove") {
      const auto ks = kids(n);
      if (!ks.empty() && ks.front()->head == "to") set("capture_replacement");
    }
    if (n.head == "between" && !n.args.empty()) {
      // a between clause with an apply (not the bare `(between)` site)
      for (const auto* k : kids(n))
        if (k->head == "apply") set("capture_hop");
    }
    if (in_end && n.head == "is") {
      if (v0 == "Line") set("end_line");
      if (v0 == "Connected") set("end_connection");
      if (v0 == "In") set("end_race");
    }
    if (in_end && n.head == "no") set("end_no_moves");
    if (n.head == "is" && v0 == "Line") {
      for (const auto& a : n.args)
        if (const auto* l = std::get_if<gdl::Literal>(&a.value); l && l->kind == gdl::Literal::Kind::Int)
          set("line_long", std::stoi(l->text) >= 5);
    }
    if (n.head == "result") {
      const bool mover = has_literal(n, "Mover");
      if ((mover && has_literal(n, "Loss")) || (!mover && has_literal(n, "Win"))) set("end_misere");
    }
    for (const auto& a : n.args) {
      if (const auto* l = std::get_if<gdl::Literal>(&a.value); l && l->kind == gdl::Literal::Kind::Ident) {
        const std::string& t = l->text;
        if (t == "Forward" || t == "Backward" || t == "Forwards" || t == "Backwards" || t == "ForwardDiagonal")
          set("directional_moves");
        if (t == "Orthogonal" || t == "Forward" || t == "Backward") set("orthogonal_relation");
        if (t == "Diagonal" || t == "ForwardDiagonal") set("diagonal_relation");
      }
    }
    const bool was = in_end;
    if (n.head == "end") in_end = true;
    for (const auto& a : n.args) {
      if (const auto* c = std::get_if<gdl::Node>(&a.value)) walk(*c);
      if (const auto* s = std::get_if<gdl::NodeSet>(&a.value))
        for (const auto& c : s->items) walk(c);
    }
    in_end = was;
  };
  walk(tree.root);

  if (stats != nullptr) {
    set("branching_gt_2", stats->mean_branching > 2);
    set("branching_gt_8", stats->mean_branching > 8);
    set("branching_gt_32", stats->mean_branching > 32);
    set("length_gt_10", stats->mean_length > 10);
    set("length_gt_25", stats->mean_length > 25);
    set("length_gt_45", stats->mean_length > 45);
    set("draws_observed", stats->draw_rate() > 0);
    set("coverage_gt_25", stats->mean_coverage > 0.25);
    set("coverage_gt_50", stats->mean_coverage > 0.5);
    set("coverage_gt_75", stats->mean_coverage > 0.75);
    set("captures_observed", stats->captures_observed);
  }
  return v;
}

namespace {

void check_dims(const ConceptVector& v, std::size_t d) {
  if (v.bits.size() != d) throw Error(Errc::CatalogMismatch, "concept vector length does not match the projection");
}

Projection fit(std::span<const ConceptVector> corpus, int k, bool strict) {
  if (corpus.empty() || k < 1) throw Error(Errc::DegenerateCorpus, "empty corpus");
  if (strict && corpus.size() < 3) throw Error(Errc::DegenerateCorpus, "corpus needs at least three vectors");
  const std::size_t d = corpus.front().bits.size();
  if (static_cast<std::size_t>(k) > d) throw Error(Errc::InvalidParams, "more components than concepts");
  Eigen::MatrixXd x(corpus.size(), d);
  for (std::size_t r = 0; r < corpus.size(); ++r) {
    check_dims(corpus[r], d);
    for (std::size_t c = 0; c < d; ++c) x(r, c) = corpus[r].bits[c];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(corpus.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  const double total = values.sum();
  const double tol = 1e-12 * std::max(1.0, values.cwiseAbs().maxCoeff());

  Projection p;
  p.catalog_version = corpus.front().catalog_version;
  p.mean.assign(mean.data(), mean.data() + d);
  for (int i = 0; i < k; ++i) {
    const Eigen::Index col = static_cast<Eigen::Index>(d) - 1 - i;
    const double lambda = values(col);
    if (lambda <= tol) {
      if (strict) throw Error(Errc::DegenerateCorpus, "concept covariance has rank below " + std::to_string(k));
      // Flat axis: every corpus point projects to 0 there.
      std::vector<double> row(d, 0.0);
      p.components.push_back(row);
      p.scale.push_back(1.0);
      p.explained_variance_ratio.push_back(0.0);
      continue;
    }
    Eigen::VectorXd v = vectors.col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    p.components.emplace_back(v.data(), v.data() + d);
    p.scale.push_back(std::sqrt(lambda));
    p.explained_variance_ratio.push_back(total > 0 ? lambda / total : 0.0);
  }
  return p;
}

}  // namespace

Projection fit_projection(std::span<const ConceptVector> corpus, int k) { return fit(corpus, k, true); }

std::vector<double> project_k(const Projection& p, const ConceptVector& v) {
  check_dims(v, p.mean.size());
  if (v.catalog_version != p.catalog_version) throw Error(Errc::CatalogMismatch, "catalog version mismatch");
  std::vector<double> out;
  for (int i = 0; i < p.dims(); ++i) {
    double s = 0;
    for (std::size_t c = 0; c < p.mean.size(); ++c) s += p.components[i][c] * (v.bits[c] - p.mean[c]);
    out.push_back(s / p.scale[i] * p.spread);
  }
  return out;
}

std::pair<double, double> project(const Projection& p, const ConceptVector& v) {
  if (p.dims() < 2) throw Error(Errc::InvalidParams, "projection has fewer than two components");
  const auto c = project_k(p, v);
  return {c[0], c[1]};
}

int bucket(double x, int regions, double lo, double hi) {
  if (!std::isfinite(x)) throw Error(Errc::NonFinite, "coordinate is not finite");
  const double width = (hi - lo) / regions;
  const double b = std::floor((x - lo) / width);
  return static_cast<int>(std::clamp(b, 0.0, static_cast<double>(regions - 1)));
}

CellCoord cell_of(double x, double y, int regions_per_axis, double lo, double hi) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw Error(Errc::NonFinite, "coordinate is not finite");
  return {bucket(x, regions_per_axis, lo, hi), bucket(y, regions_per_axis, lo, hi)};
}

std::vector<int> archive_geometry(long long target_cells, int dims) {
  if (target_cells < 1 || dims < 1) throw Error(Errc::InvalidParams, "archive geometry needs C >= 1 and D >= 1");
  auto power = [](long long b, int e) {
    long double r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
  };
  long long b = static_cast<long long>(std::floor(std::pow(static_cast<double>(target_cells), 1.0 / dims)));
  b = std::max(1LL, b);
  while (power(b + 1, dims) <= target_cells) ++b;
  while (b > 1 && power(b, dims) > target_cells) --b;
  std::vector<int> regions(dims, static_cast<int>(b));
  regions[0] = static_cast<int>(target_cells / static_cast<long long>(power(b, dims - 1)));
  return regions;
}

std::vector<SweepRow> occupancy_sweep(std::span<const ConceptVector> corpus, std::span<const int> dims,
                                      std::span<const long long> target_cells) {
  std::vector<SweepRow> rows;
  for (int d : dims) {
    const Projection p = fit(corpus, d, false);
    std::vector<std::vector<double>> coords;
    for (const auto& v : corpus) coords.push_back(project_k(p, v));
    for (long long c : target_cells) {
      SweepRow row;
      row.dims = d;
      row.target_cells = c;
      row.regions = archive_geometry(c, d);
      std::set<std::vector<int>> cells;
      for (const auto& x : coords) {
        std::vector<int> cell(d);
        for (int a = 0; a < d; ++a) cell[a] = bucket(x[a], row.regions[a]);
        cells.insert(cell);
      }
      row.occupied = static_cast<int>(cells.size());
      rows.push_back(row);
    }
  }
  return rows;
}

std::string projection_to_json(const Projection& p) {
  nlohmann::json j;
  j["schema"] = "gavel.projection/1";
  j["catalog_version"] = p.catalog_version;
  j["mean"] = p.mean;
  j["components"] = p.components;
  j["scale"] = p.scale;
  j["explained_variance_ratio"] = p.explained_variance_ratio;
  j["spread"] = p.spread;
  std::vector<std::string> names;
  for (const auto& e : kCatalog) names.emplace_back(e.name);
  j["concepts"] = names;
  return j.dump(2);
}

Projection projection_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Projection p;
    p.catalog_version = j.at("catalog_version").get<int>();
    p.mean = j.at("mean").get<std::vector<double>>();
    p.components = j.at("components").get<std::vector<std::vector<double>>>();
    p.scale = j.at("scale").get<std::vector<double>>();
    p.explained_variance_ratio = j.at("explained_variance_ratio").get<std::vector<double>>();
    p.spread = j.value("spread", 2.0);
    if (p.catalog_version != kCatalogVersion || p.mean.size() != kCatalog.size())
      throw Error(Errc::CatalogMismatch, "projection was fitted on a different concept catalog");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Io, std::string("invalid projection file: ") + e.what());
  }
}

}  // namespace gavel::concepts
