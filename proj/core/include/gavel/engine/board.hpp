#pragma once

#include <span>
#include <string>
#include <vector>

#include "gavel/engine/site_set.hpp"

namespace gavel::engine {

enum class DirClass : std::uint8_t {
  Orthogonal,
  Diagonal,
  Adjacent,
  Forward,
  Backward,
  Forwards,
  Backwards,
  ForwardDiagonal,
};

DirClass dir_class_from(std::string_view name);
std::string_view to_string(DirClass dir) noexcept;

enum class ShapeKind { Square, Hex };

struct Point {
  double x = 0, y = 0;
};

/// Board topology. Sites sit on an integer lattice: (column, row) for square
/// boards and axial (q, r) for hexagonal ones. Render coordinates are the
/// lattice embedded in the plane and rotated; row/r grows towards the top.
/// Top/Bottom/Left/Right follow render coordinates, so rotation changes them;
/// sides and corners are topological.
class BoardGraph {
 public:
  static BoardGraph square(int n, double rotation_degrees = 0);
  static BoardGraph hex(int n, double rotation_degrees = 0);

  int size() const noexcept { return static_cast<int>(lattice_.size()); }
  ShapeKind shape() const noexcept { return shape_; }
  int dimension() const noexcept { return dimension_; }
  double rotation() const noexcept { return rotation_; }
  std::string describe() const;

  /// Number of lattice direction vectors (orthogonal then diagonal).
  int direction_count() const noexcept { return static_cast<int>(vectors_.size()); }
  /// Neighbour of `site` along direction index `dir`, or -1 off-board.
  int neighbor(int site, int dir) const noexcept { return neighbors_[site * direction_count() + dir]; }
  int opposite(int dir) const noexcept { return opposite_[dir]; }

  /// Direction indices of a class as seen by `player` (1 or 2); Forward for
  /// player 1 points up, for player 2 down.
  std::span<const int> directions(DirClass cls, int player = 1) const;
  /// One direction per undirected axis of the class (for line counting).
  std::span<const int> axes(DirClass cls) const;

  const SiteSet& all() const noexcept { return all_; }
  const SiteSet& top() const noexcept { return top_; }
  const SiteSet& bottom() const noexcept { return bottom_; }
  const SiteSet& left() const noexcept { return left_; }
  const SiteSet& right() const noexcept { return right_; }
  const SiteSet& corners() const noexcept { return corners_; }
  const SiteSet& boundary() const noexcept { return boundary_; }
  /// One set per board side, corners included.
  const std::vector<SiteSet>& sides() const noexcept { return sides_; }
  const std::vector<SiteSet>& sides_no_corners() const noexcept { return sides_no_corners_; }
  /// One singleton set per corner.
  const std::vector<SiteSet>& corner_list() const noexcept { return corner_list_; }

  Point render(int site) const { return render_[site]; }
  std::pair<int, int> lattice(int site) const { return lattice_[site]; }
  int site_at(int a, int b) const;

  /// Sites adjacent (under `cls`) to any member of `sites`.
  SiteSet neighbourhood(const SiteSet& sites, DirClass cls) const;

 private:
  void build(const std::vector<std::pair<int, int>>& orth, const std::vector<std::pair<int, int>>& diag,
             bool adjacent_includes_diagonal);
  void compute_render_regions();

  ShapeKind shape_ = ShapeKind::Square;
  int dimension_ = 0;
  double rotation_ = 0;
  int min_a_ = 0, min_b_ = 0, span_ = 0;
  std::vector<std::pair<int, int>> lattice_;
  std::vector<int> index_;  // dense lookup over the lattice bounding box
  std::vector<Point> render_;
  std::vector<std::pair<int, int>> vectors_;
  std::vector<int> opposite_;
  std::vector<int> neighbors_;
  // [class][player 0/1] -> direction indices
  std::vector<int> class_dirs_[8][2];
  std::vector<int> class_axes_[8];
  SiteSet all_, top_, bottom_, left_, right_, corners_, boundary_;
  std::vector<SiteSet> sides_, sides_no_corners_, corner_list_;
};

}  // namespace gavel::engine
