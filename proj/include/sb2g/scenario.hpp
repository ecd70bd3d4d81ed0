#ifndef SB2G_SCENARIO_HPP
#define SB2G_SCENARIO_HPP

#include "sb2g/belief_filter.hpp"
#include "sb2g/config.hpp"
#include "sb2g/grid.hpp"
#include "sb2g/sensing.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sb2g {

constexpr int kScenarioFormatVersion = 1;

/// Rectangle climbed from the stair object's position, opposite its facing
/// direction. Traversal lands on `exit` one floor up.
struct StairZone {
  ObjectId object = 0;
  double length = 3.0;
  double width = 1.2;
  Pose2 exit;
};

struct WorldScenario {
  std::string name;
  std::vector<OccupancyGrid> floors;
  std::vector<StairZone> stairs;
  SensorModel sensor;
  std::vector<ObjectTruth> objects;
  RobotConfig robot;
  Thresholds thresholds;
  PlannerConfig planner;
  CoverageConfig coverage;
  FilterConfig filter;
  RewardSpec reward;
  double budget = 700.0;
  double tick_rate = 10.0;
  std::uint64_t seed = 1;

  double dt() const { return 1.0 / tick_rate; }
  const OccupancyGrid& floor(int f) const { return floors.at(static_cast<std::size_t>(f)); }
  const ObjectTruth* object(ObjectId id) const;
  const StairZone* stair_for(ObjectId id) const;
  int task_count() const;

  /// Throws ScenarioError naming the offending field.
  void validate() const;
};

/// Geometry helpers for stair zones.
struct StairFrame {
  Vec2 origin;
  Vec2 ascent;   // unit vector up the stairs
  Vec2 lateral;  // unit vector to the left of ascent
  double length;
  double width;

  bool contains(const Vec2& p) const;
  double along(const Vec2& p) const { return (p - origin).dot(ascent); }
  double across(const Vec2& p) const { return (p - origin).dot(lateral); }
};

StairFrame stair_frame(const ObjectTruth& stair, const StairZone& zone);
StairFrame stair_frame(const Vec2& position, double orientation, double length, double width);

WorldScenario parse_scenario(const nlohmann::json& j);
/// Parse from text; JSON syntax errors report line and column.
WorldScenario parse_scenario_text(const std::string& text);
WorldScenario load_scenario(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const WorldScenario& s);

struct GenerationSpec {
  int count = 6;
  std::vector<std::string> labels;  // cycled over placements
  double min_separation = 3.0;
  int floor = 0;
};

/// Replaces the object list with `count` objects placed uniformly over free
/// cells, at least `min_separation` apart and facing away from the nearest wall.
WorldScenario generate_scenario(const WorldScenario& base, const GenerationSpec& spec, std::uint64_t seed);

}  // namespace sb2g

#endif  // SB2G_SCENARIO_HPP
