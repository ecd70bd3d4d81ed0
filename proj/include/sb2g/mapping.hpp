#ifndef SB2G_MAPPING_HPP
#define SB2G_MAPPING_HPP

#include "sb2g/grid.hpp"
#include "sb2g/scenario.hpp"

#include <cstdint>
#include <vector>

namespace sb2g {

/// The robot's own map of every floor (revealed by range scans) and the
/// cells its camera footprint has swept.
class MapKnowledge {
 public:
  MapKnowledge() = default;
  explicit MapKnowledge(const WorldScenario& scenario);

  /// Reveals cells along 360 rays from `origin`, stopping at obstacles.
  void scan(const OccupancyGrid& truth, int floor, const Vec2& origin, double range);

  /// Marks known free cells inside the camera wedge of `robot` out to
  /// `radius`. Returns the number of newly covered cells.
  int mark_covered(const RobotState& robot, double half_angle, double radius);

  void reset_coverage(int floor);

  const OccupancyGrid& known(int floor) const { return known_.at(static_cast<std::size_t>(floor)); }
  const NavGrid& nav(int floor) const;
  bool covered(int floor, Cell c) const;
  const std::vector<std::uint8_t>& coverage(int floor) const { return covered_.at(static_cast<std::size_t>(floor)); }
  int floors() const { return static_cast<int>(known_.size()); }
  double inflation() const { return inflation_; }

 private:
  std::vector<OccupancyGrid> known_;
  std::vector<std::vector<std::uint8_t>> covered_;
  mutable std::vector<NavGrid> nav_;
  mutable std::vector<std::uint8_t> dirty_;
  double inflation_ = 0.25;
};

}  // namespace sb2g

#endif  // SB2G_MAPPING_HPP
