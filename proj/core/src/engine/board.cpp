#include "gavel/engine/board.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gavel/common/error.hpp"

namespace gavel::engine {

namespace {

constexpr std::array<std::string_view, 8> kClassNames = {"Orthogonal", "Diagonal", "Adjacent", "Forward",
                                                         "Backward", "Forwards", "Backwards", "ForwardDiagonal"};

}  // namespace

DirClass dir_class_from(std::string_view name) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i)
    if (kClassNames[i] == name) return static_cast<DirClass>(i);
  throw Error(Errc::UnsupportedConstruct, "unknown direction '" + std::string(name) + "'");
}

std::string_view to_string(DirClass dir) noexcept { return kClassNames[static_cast<std::size_t>(dir)]; }

BoardGraph BoardGraph::square(int n, double rotation_degrees) {
  if (n < 1 || n * n > kMaxSites) throw Error(Errc::UnsupportedConstruct, "square board size out of range");
  BoardGraph g;
  g.shape_ = ShapeKind::Square;
  g.dimension_ = n;
  g.rotation_ = rotation_degrees;
  g.min_a_ = 0;
  g.min_b_ = 0;
  g.span_ = n;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g.lattice_.emplace_back(c, r);
  const double mid = (n - 1) / 2.0;
  for (auto [c, r] : g.lattice_) g.render_.push_back({c - mid, r - mid});
  g.build({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}, true);

  const int k = n - 1;
  std::array<std::pair<int, int>, 4> corners = {{{0, 0}, {k, 0}, {k, k}, {0, k}}};
  for (auto [c, r] : corners) {
    SiteSet s;
    s.set(g.site_at(c, r));
    if (std::none_of(g.corner_list_.begin(), g.corner_list_.end(), [&](const SiteSet& o) { return o == s; }))
      g.corner_list_.push_back(s);
  }
  std::array<SiteSet, 4> sides;
  for (int i = 0; i < g.size(); ++i) {
    auto [c, r] = g.lattice_[i];
    if (r == 0) sides[0].set(i);
    if (c == k) sides[1].set(i);
    if (r == k) sides[2].set(i);
    if (c == 0) sides[3].set(i);
  }
  g.sides_.assign(sides.begin(), sides.end());
  g.compute_render_regions();
  return g;
}

BoardGraph BoardGraph::hex(int n, double rotation_degrees) {
  if (n < 1 || 3 * n * n - 3 * n + 1 > kMaxSites) throw Error(Errc::UnsupportedConstruct, "hex board size out of range");
  BoardGraph g;
  g.shape_ = ShapeKind::Hex;
  g.dimension_ = n;
  g.rotation_ = rotation_degrees;
  const int k = n - 1;
  g.min_a_ = -k;
  g.min_b_ = -k;
  g.span_ = 2 * k + 1;
  for (int r = -k; r <= k; ++r)
    for (int q = -k; q <= k; ++q)
      if (std::abs(q + r) <= k) g.lattice_.emplace_back(q, r);
  const double root3 = std::numbers::sqrt3;
  for (auto [q, r] : g.lattice_) g.render_.push_back({root3 * (q + r / 2.0), 1.5 * r});
  g.build({{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}},
          {{1, 1}, {-1, 2}, {-2, 1}, {-1, -1}, {1, -2}, {2, -1}}, false);

  std::array<std::pair<int, int>, 6> corners = {{{k, 0}, {0, k}, {-k, k}, {-k, 0}, {0, -k}, {k, -k}}};
  for (auto [q, r] : corners) {
    SiteSet s;
    s.set(g.site_at(q, r));
    if (std::none_of(g.corner_list_.begin(), g.corner_list_.end(), [&](const SiteSet& o) { return o == s; }))
      g.corner_list_.push_back(s);
  }
  std::array<SiteSet, 6> sides;
  for (int i = 0; i < g.size(); ++i) {
    auto [q, r] = g.lattice_[i];
    if (q + r == k) sides[0].set(i);
    if (r == k) sides[1].set(i);
    if (q == -k) sides[2].set(i);
    if (q + r == -k) sides[3].set(i);
    if (r == -k) sides[4].set(i);
    if (q == k) sides[5].set(i);
  }
  g.sides_.assign(sides.begin(), sides.end());
  g.compute_render_regions();
  return g;
}

std::string BoardGraph::describe() const {
  std::ostringstream out;
  out << (shape_ == ShapeKind::Square ? "square " : "hex ") << dimension_;
  if (rotation_ != 0) out << " rotated " << rotation_;
  return out.str();
}

int BoardGraph::site_at(int a, int b) const {
  const int i = a - min_a_, j = b - min_b_;
  if (i < 0 || j < 0 || i >= span_ || j >= span_) return -1;
  return index_[j * span_ + i];
}

void BoardGraph::build(const std::vector<std::pair<int, int>>& orth, const std::vector<std::pair<int, int>>& diag,
                       bool adjacent_includes_diagonal) {
  index_.assign(static_cast<std::size_t>(span_) * span_, -1);
  for (int i = 0; i < size(); ++i) {
    auto [a, b] = lattice_[i];
    index_[(b - min_b_) * span_ + (a - min_a_)] = i;
    all_.set(i);
  }
  vectors_ = orth;
  vectors_.insert(vectors_.end(), diag.begin(), diag.end());
  const int nd = direction_count();
  opposite_.assign(nd, -1);
  for (int d = 0; d < nd; ++d)
    for (int e = 0; e < nd; ++e)
      if (vectors_[e].first == -vectors_[d].first && vectors_[e].second == -vectors_[d].second) opposite_[d] = e;

  neighbors_.assign(static_cast<std::size_t>(size()) * nd, -1);
  for (int i = 0; i < size(); ++i)
    for (int d = 0; d < nd; ++d)
      neighbors_[i * nd + d] = site_at(lattice_[i].first + vectors_[d].first, lattice_[i].second + vectors_[d].second);

  const int n_orth = static_cast<int>(orth.size());
  auto is_orth = [&](int d) { return d < n_orth; };
  auto is_adj = [&](int d) { return is_orth(d) || adjacent_includes_diagonal; };
  // Forward for player 1 is increasing row; player 2 mirrors it.
  auto dy = [&](int d, int player) { return player == 1 ? vectors_[d].second : -vectors_[d].second; };
  for (int p = 1; p <= 2; ++p) {
    for (int d = 0; d < nd; ++d) {
      auto add = [&](DirClass c) { class_dirs_[static_cast<int>(c)][p - 1].push_back(d); };
      if (is_orth(d)) add(DirClass::Orthogonal);
      if (!is_orth(d)) add(DirClass::Diagonal);
      if (is_adj(d)) add(DirClass::Adjacent);
      if (is_orth(d) && dy(d, p) > 0) add(DirClass::Forward);
      if (is_orth(d) && dy(d, p) < 0) add(DirClass::Backward);
      if (is_adj(d) && dy(d, p) > 0) add(DirClass::Forwards);
      if (is_adj(d) && dy(d, p) < 0) add(DirClass::Backwards);
      if (!is_orth(d) && dy(d, p) > 0) add(DirClass::ForwardDiagonal);
    }
  }
  for (int c = 0; c < 8; ++c) {
    for (int d : class_dirs_[c][0]) {
      auto [da, db] = vectors_[d];
      if (db > 0 || (db == 0 && da > 0)) class_axes_[c].push_back(d);
    }
  }
}

void BoardGraph::compute_render_regions() {
  const double theta = rotation_ * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  for (Point& p : render_) p = {p.x * cs - p.y * sn, p.x * sn + p.y * cs};
  double min_x = 1e18, max_x = -1e18, min_y = 1e18, max_y = -1e18;
  for (const Point& p : render_) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  constexpr double eps = 1e-6;
  for (int i = 0; i < size(); ++i) {
    const Point& p = render_[i];
    if (p.y >= max_y - eps) top_.set(i);
    if (p.y <= min_y + eps) bottom_.set(i);
    if (p.x <= min_x + eps) left_.set(i);
    if (p.x >= max_x - eps) right_.set(i);
  }
  for (const SiteSet& c : corner_list_) corners_ |= c;
  for (const SiteSet& s : sides_) {
    boundary_ |= s;
    SiteSet inner = s;
    inner.subtract(corners_);
    sides_no_corners_.push_back(inner);
  }
}

std::span<const int> BoardGraph::directions(DirClass cls, int player) const {
  return class_dirs_[static_cast<int>(cls)][player == 2 ? 1 : 0];
}

std::span<const int> BoardGraph::axes(DirClass cls) const {
  switch (cls) {
    case DirClass::Orthogonal:
    case DirClass::Diagonal:
    case DirClass::Adjacent: return class_axes_[static_cast<int>(cls)];
    default: return class_axes_[static_cast<int>(DirClass::Adjacent)];
  }
}

SiteSet BoardGraph::neighbourhood(const SiteSet& sites, DirClass cls) const {
  SiteSet out;
  const auto dirs = directions(cls, 1);
  sites.for_each([&](int s) {
    for (int d : dirs) {
      const int t = neighbor(s, d);
      if (t >= 0) out.set(t);
    }
  });
  return out;
}

}  // namespace gavel::engine
