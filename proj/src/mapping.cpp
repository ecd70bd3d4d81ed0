#include "sb2g/mapping.hpp"

#include <cmath>

namespace sb2g {

MapKnowledge::MapKnowledge(const WorldScenario& scenario) : inflation_(scenario.robot.inflation) {
  for (const auto& f : scenario.floors) {
    known_.emplace_back(f.width(), f.height(), f.cell_size(), f.origin(), CellState::unknown);
    covered_.emplace_back(f.cell_count(), 0);
  }
  nav_.resize(known_.size());
  dirty_.assign(known_.size(), 1);
}

void MapKnowledge::scan(const OccupancyGrid& truth, int floor, const Vec2& origin, double range) {
  auto& known = known_.at(static_cast<std::size_t>(floor));
  bool changed = false;
  constexpr int rays = 360;
  for (int i = 0; i < rays; ++i) {
    const double a = 2.0 * std::numbers::pi * i / rays;
    const Vec2 end = origin + range * Vec2(std::cos(a), std::sin(a));
    truth.walk(origin, end, [&](Cell c) {
      if (!truth.in_bounds(c)) return false;
      const CellState s = truth.at(c);
      if (known.at(c) != s) {
        known.set(c, s);
        changed = true;
      }
      return s != CellState::occupied && s != CellState::unknown;
    });
  }
  if (changed) dirty_[static_cast<std::size_t>(floor)] = 1;
}

int MapKnowledge::mark_covered(const RobotState& robot, double half_angle, double radius) {
  const auto f = static_cast<std::size_t>(robot.floor);
  const auto& known = known_.at(f);
  auto& cov = covered_.at(f);
  const Cell c0 = known.cell_of(robot.position);
  const int r = static_cast<int>(std::ceil(radius / known.cell_size()));
  int added = 0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const Cell c{c0.x + dx, c0.y + dy};
      if (!known.in_bounds(c) || known.at(c) != CellState::free) continue;
      const std::size_t i = known.index(c);
      if (cov[i]) continue;
      const Vec2 p = known.center_of(c);
      const double d = (p - robot.position).norm();
      if (d > radius) continue;
      if (d > 0.5) {
        if (bearing_to(robot, p) > half_angle) continue;
        if (!known.line_of_sight(robot.position, p, true)) continue;
      }
      cov[i] = 1;
      ++added;
    }
  return added;
}

void MapKnowledge::reset_coverage(int floor) {
  auto& cov = covered_.at(static_cast<std::size_t>(floor));
  std::fill(cov.begin(), cov.end(), 0);
}

const NavGrid& MapKnowledge::nav(int floor) const {
  const auto f = static_cast<std::size_t>(floor);
  if (dirty_[f]) {
    nav_[f] = NavGrid(known_[f], inflation_);
    dirty_[f] = 0;
  }
  return nav_[f];
}

bool MapKnowledge::covered(int floor, Cell c) const {
  const auto& k = known(floor);
  return k.in_bounds(c) && covered_[static_cast<std::size_t>(floor)][k.index(c)] != 0;
}

}  // namespace sb2g
