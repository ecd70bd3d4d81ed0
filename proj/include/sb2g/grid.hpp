#ifndef SB2G_GRID_HPP
#define SB2G_GRID_HPP

#include "sb2g/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sb2g {

enum class CellState : std::uint8_t { free, occupied, stair, unknown };

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Planar occupancy grid. Cell (0,0) is at `origin` (lower-left corner);
/// x grows with column, y with row.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double cell_size, Vec2 origin = Vec2::Zero(),
                CellState fill = CellState::free);

  /// Text rows use '#' occupied, '.' free, 'S' stair zone, '?' unknown.
  /// rows[0] is the top (largest y) row.
  static OccupancyGrid from_rows(const std::vector<std::string>& rows, double cell_size,
                                 Vec2 origin = Vec2::Zero());
  std::vector<std::string> to_rows() const;

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  const Vec2& origin() const { return origin_; }
  std::size_t cell_count() const { return cells_.size(); }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  CellState at(Cell c) const { return in_bounds(c) ? cells_[index(c)] : CellState::occupied; }
  void set(Cell c, CellState s) { cells_[index(c)] = s; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }
  Cell cell_at(std::size_t i) const { return {static_cast<int>(i % width_), static_cast<int>(i / width_)}; }

  Cell cell_of(const Vec2& p) const;
  Vec2 center_of(Cell c) const;
  CellState state_at(const Vec2& p) const { return at(cell_of(p)); }
  bool is_free(const Vec2& p) const { return state_at(p) == CellState::free; }

  /// True when the open segment a->b crosses no occupied cell. Unknown cells
  /// block only when `unknown_blocks` is set.
  bool line_of_sight(const Vec2& a, const Vec2& b, bool unknown_blocks = false) const;

  /// Cells visited by the segment a->b in traversal order.
  std::vector<Cell> trace(const Vec2& a, const Vec2& b) const;

  /// Visits the cells of segment a->b in order until `visit` returns false.
  /// Returns false when stopped early.
  template <typename Visit>
  bool walk(const Vec2& a, const Vec2& b, Visit&& visit) const;

 private:
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 1.0;
  Vec2 origin_ = Vec2::Zero();
  std::vector<CellState> cells_;
};

template <typename Visit>
bool OccupancyGrid::walk(const Vec2& a, const Vec2& b, Visit&& visit) const {
  Cell c = cell_of(a);
  const Cell end = cell_of(b);
  const Vec2 d = b - a;
  const int step_x = d.x() > 0 ? 1 : (d.x() < 0 ? -1 : 0);
  const int step_y = d.y() > 0 ? 1 : (d.y() < 0 ? -1 : 0);
  constexpr double inf = 1e300;
  auto boundary = [&](int idx, int step, double o) { return o + (idx + (step > 0 ? 1 : 0)) * cell_size_; };
  double t_max_x = step_x != 0 ? (boundary(c.x, step_x, origin_.x()) - a.x()) / d.x() : inf;
  double t_max_y = step_y != 0 ? (boundary(c.y, step_y, origin_.y()) - a.y()) / d.y() : inf;
  const double t_dx = step_x != 0 ? cell_size_ / std::abs(d.x()) : inf;
  const double t_dy = step_y != 0 ? cell_size_ / std::abs(d.y()) : inf;
  const int limit = std::abs(end.x - c.x) + std::abs(end.y - c.y) + 2;
  for (int i = 0; i <= limit; ++i) {
    if (!visit(c)) return false;
    if (c == end) break;
    if (t_max_x < t_max_y) {
      if (t_max_x > 1.0) break;
      c.x += step_x;
      t_max_x += t_dx;
    } else {
      if (t_max_y > 1.0) break;
      c.y += step_y;
      t_max_y += t_dy;
    }
  }
  return true;
}

/// Boolean traversability mask derived from a map by inflating every
/// non-free cell by `inflation` meters.
class NavGrid {
 public:
  NavGrid() = default;
  NavGrid(const OccupancyGrid& map, double inflation);

  const OccupancyGrid& map() const { return map_; }
  bool passable(Cell c) const { return map_.in_bounds(c) && mask_[map_.index(c)] != 0; }
  bool passable(const Vec2& p) const { return passable(map_.cell_of(p)); }
  bool segment_passable(const Vec2& a, const Vec2& b) const;

  /// Nearest passable cell to `p` within `radius` meters.
  std::optional<Cell> nearest_passable(const Vec2& p, double radius) const;

 private:
  OccupancyGrid map_;
  std::vector<std::uint8_t> mask_;
};

struct GridPath {
  std::vector<Vec2> waypoints;
  double length = 0.0;
};

/// 8-connected A* (no corner cutting). Empty optional when unreachable.
std::optional<GridPath> astar(const NavGrid& nav, const Vec2& start, const Vec2& goal);

/// Drops intermediate waypoints while the straight segment stays passable.
GridPath shortcut(const NavGrid& nav, const GridPath& path);

struct DistanceField {
  std::vector<double> distance;  // +inf where unreachable
  std::vector<int> parent;       // -1 at the source and unreachable cells
  std::vector<std::size_t> order;  // cells in non-decreasing distance
};

/// Dijkstra flood over passable cells from `start`.
DistanceField flood(const NavGrid& nav, const Vec2& start);
GridPath path_from_field(const NavGrid& nav, const DistanceField& field, Cell target);

}  // namespace sb2g

#endif  // SB2G_GRID_HPP
