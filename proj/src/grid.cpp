#include "sb2g/grid.hpp"

#include <cmath>
#include <limits>
#include <queue>

namespace sb2g {

OccupancyGrid::OccupancyGrid(int width, int height, double cell_size, Vec2 origin, CellState fill)
    : width_(width), height_(height), cell_size_(cell_size), origin_(origin) {
  if (width <= 0 || height <= 0) throw ScenarioError("map", "grid dimensions must be positive");
  if (!(cell_size > 0.0)) throw ScenarioError("map.cell_size", "must be > 0");
  cells_.assign(static_cast<std::size_t>(width) * height, fill);
}

OccupancyGrid OccupancyGrid::from_rows(const std::vector<std::string>& rows, double cell_size, Vec2 origin) {
  if (rows.empty()) throw ScenarioError("map.rows", "no rows");
  const int w = static_cast<int>(rows.front().size());
  const int h = static_cast<int>(rows.size());
  OccupancyGrid g(w, h, cell_size, origin);
  for (int r = 0; r < h; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != w)
      throw ScenarioError("map.rows[" + std::to_string(r) + "]", "row width differs from the first row");
    for (int x = 0; x < w; ++x) {
      CellState s;
      switch (row[static_cast<std::size_t>(x)]) {
        case '#': s = CellState::occupied; break;
        case '.': s = CellState::free; break;
        case 'S': s = CellState::stair; break;
        case '?': s = CellState::unknown; break;
        default:
          throw ScenarioError("map.rows[" + std::to_string(r) + "]",
                              std::string("unexpected character '") + row[static_cast<std::size_t>(x)] + "'");
      }
      g.set({x, h - 1 - r}, s);
    }
  }
  return g;
}

std::vector<std::string> OccupancyGrid::to_rows() const {
  std::vector<std::string> rows(static_cast<std::size_t>(height_), std::string(static_cast<std::size_t>(width_), '.'));
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) {
      char ch = '.';
      switch (at({x, y})) {
        case CellState::free: ch = '.'; break;
        case CellState::occupied: ch = '#'; break;
        case CellState::stair: ch = 'S'; break;
        case CellState::unknown: ch = '?'; break;
      }
      rows[static_cast<std::size_t>(height_ - 1 - y)][static_cast<std::size_t>(x)] = ch;
    }
  return rows;
}

Cell OccupancyGrid::cell_of(const Vec2& p) const {
  return {static_cast<int>(std::floor((p.x() - origin_.x()) / cell_size_)),
          static_cast<int>(std::floor((p.y() - origin_.y()) / cell_size_))};
}

Vec2 OccupancyGrid::center_of(Cell c) const {
  return origin_ + Vec2((c.x + 0.5) * cell_size_, (c.y + 0.5) * cell_size_);
}

bool OccupancyGrid::line_of_sight(const Vec2& a, const Vec2& b, bool unknown_blocks) const {
  const Cell end = cell_of(b);
  return walk(a, b, [&](Cell c) {
    if (c == end) return true;
    const CellState s = at(c);
    if (s == CellState::occupied) return false;
    if (unknown_blocks && s == CellState::unknown) return false;
    return true;
  });
}

std::vector<Cell> OccupancyGrid::trace(const Vec2& a, const Vec2& b) const {
  std::vector<Cell> out;
  walk(a, b, [&](Cell c) {
    out.push_back(c);
    return true;
  });
  return out;
}

NavGrid::NavGrid(const OccupancyGrid& map, double inflation) : map_(map) {
  mask_.assign(map_.cell_count(), 1);
  const int r = static_cast<int>(std::ceil(inflation / map_.cell_size() - 1e-9));
  const double r2 = (inflation / map_.cell_size() + 0.5) * (inflation / map_.cell_size() + 0.5);
  for (int y = 0; y < map_.height(); ++y)
    for (int x = 0; x < map_.width(); ++x) {
      if (map_.at({x, y}) == CellState::free) continue;
      mask_[map_.index({x, y})] = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const Cell n{x + dx, y + dy};
          if (!map_.in_bounds(n) || dx * dx + dy * dy > r2) continue;
          mask_[map_.index(n)] = 0;
        }
    }
}

bool NavGrid::segment_passable(const Vec2& a, const Vec2& b) const {
  return map_.walk(a, b, [&](Cell c) { return passable(c); });
}

std::optional<Cell> NavGrid::nearest_passable(const Vec2& p, double radius) const {
  const Cell c0 = map_.cell_of(p);
  const int r = static_cast<int>(std::ceil(radius / map_.cell_size()));
  std::optional<Cell> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const Cell c{c0.x + dx, c0.y + dy};
      if (!passable(c)) continue;
      const double d = (map_.center_of(c) - p).norm();
      if (d <= radius && d < best_d) {
        best_d = d;
        best = c;
      }
    }
  return best;
}

namespace {

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

bool can_step(const NavGrid& nav, Cell from, int k) {
  const Cell to{from.x + kDx[k], from.y + kDy[k]};
  if (!nav.passable(to)) return false;
  if (k >= 4) return nav.passable(Cell{from.x + kDx[k], from.y}) && nav.passable(Cell{from.x, from.y + kDy[k]});
  return true;
}

double step_cost(const NavGrid& nav, int k) { return (k < 4 ? 1.0 : std::numbers::sqrt2) * nav.map().cell_size(); }

GridPath build_path(const NavGrid& nav, const std::vector<int>& parent, std::size_t target, const Vec2& goal_point) {
  const auto& map = nav.map();
  std::vector<Vec2> rev;
  for (int i = static_cast<int>(target); i >= 0; i = parent[static_cast<std::size_t>(i)])
    rev.push_back(map.center_of(map.cell_at(static_cast<std::size_t>(i))));
  GridPath path;
  path.waypoints.assign(rev.rbegin(), rev.rend());
  if (!path.waypoints.empty()) path.waypoints.back() = goal_point;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i)
    path.length += (path.waypoints[i] - path.waypoints[i - 1]).norm();
  return path;
}

}  // namespace

std::optional<GridPath> astar(const NavGrid& nav, const Vec2& start, const Vec2& goal) {
  const auto& map = nav.map();
  const Cell s = map.cell_of(start);
  const Cell g = map.cell_of(goal);
  if (!map.in_bounds(s) || !nav.passable(g)) return std::nullopt;
  const std::size_t n = map.cell_count();
  std::vector<double> cost(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  auto heuristic = [&](Cell c) { return (map.center_of(c) - map.center_of(g)).norm(); };
  cost[map.index(s)] = 0.0;
  open.emplace(heuristic(s), map.index(s));
  while (!open.empty()) {
    const auto [f, i] = open.top();
    open.pop();
    if (closed[i]) continue;
    closed[i] = 1;
    const Cell c = map.cell_at(i);
    if (c == g) {
      GridPath p = build_path(nav, parent, i, goal);
      p.waypoints.front() = start;
      return p;
    }
    for (int k = 0; k < 8; ++k) {
      // The start cell may sit inside the inflation band; allow leaving it.
      if (!can_step(nav, c, k) && !(c == s && nav.passable(Cell{c.x + kDx[k], c.y + kDy[k]}))) continue;
      const Cell nb{c.x + kDx[k], c.y + kDy[k]};
      const std::size_t j = map.index(nb);
      const double nc = cost[i] + step_cost(nav, k);
      if (nc < cost[j]) {
        cost[j] = nc;
        parent[j] = static_cast<int>(i);
        open.emplace(nc + heuristic(nb), j);
      }
    }
  }
  return std::nullopt;
}

GridPath shortcut(const NavGrid& nav, const GridPath& path) {
  if (path.waypoints.size() <= 2) return path;
  GridPath out;
  std::size_t i = 0;
  out.waypoints.push_back(path.waypoints.front());
  while (i + 1 < path.waypoints.size()) {
    std::size_t j = path.waypoints.size() - 1;
    while (j > i + 1 && !nav.segment_passable(path.waypoints[i], path.waypoints[j])) --j;
    out.waypoints.push_back(path.waypoints[j]);
    i = j;
  }
  for (std::size_t k = 1; k < out.waypoints.size(); ++k)
    out.length += (out.waypoints[k] - out.waypoints[k - 1]).norm();
  return out;
}

DistanceField flood(const NavGrid& nav, const Vec2& start) {
  const auto& map = nav.map();
  const std::size_t n = map.cell_count();
  DistanceField f;
  f.distance.assign(n, std::numeric_limits<double>::infinity());
  f.parent.assign(n, -1);
  const Cell s = map.cell_of(start);
  if (!map.in_bounds(s)) return f;
  std::vector<std::uint8_t> closed(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  f.distance[map.index(s)] = 0.0;
  open.emplace(0.0, map.index(s));
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (closed[i]) continue;
    closed[i] = 1;
    f.order.push_back(i);
    const Cell c = map.cell_at(i);
    for (int k = 0; k < 8; ++k) {
      if (!can_step(nav, c, k) && !(c == s && nav.passable(Cell{c.x + kDx[k], c.y + kDy[k]}))) continue;
      const Cell nb{c.x + kDx[k], c.y + kDy[k]};
      const std::size_t j = map.index(nb);
      const double nd = d + step_cost(nav, k);
      if (nd < f.distance[j]) {
        f.distance[j] = nd;
        f.parent[j] = static_cast<int>(i);
        open.emplace(nd, j);
      }
    }
  }
  return f;
}

GridPath path_from_field(const NavGrid& nav, const DistanceField& field, Cell target) {
  const std::size_t i = nav.map().index(target);
  return build_path(nav, field.parent, i, nav.map().center_of(target));
}

}  // namespace sb2g
