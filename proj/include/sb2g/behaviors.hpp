#ifndef SB2G_BEHAVIORS_HPP
#define SB2G_BEHAVIORS_HPP

#include "sb2g/active_search.hpp"
#include "sb2g/mapping.hpp"
#include "sb2g/scenario.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace sb2g {

// ---------------------------------------------------------------------------
// Low-level motion

/// Turn toward `heading` in place.
ControlInput face(const RobotState& robot, double heading, const VelocityLimits& limits);

/// Moves toward `goal` using lateral velocity where useful while steering the
/// heading toward `heading`. Speed tapers inside one metre of the goal.
ControlInput drive_to(const RobotState& robot, const Vec2& goal, double heading, const VelocityLimits& limits);

/// Follows a waypoint list; consumed waypoints are erased from the front.
/// With `nav`, a waypoint is only skipped when the next one is in clear view.
ControlInput pure_pursuit(const RobotState& robot, std::vector<Vec2>& path, double lookahead,
                          const VelocityLimits& limits, const NavGrid* nav = nullptr);

// ---------------------------------------------------------------------------
// Geometric coverage

struct CoverageStep {
  ControlInput u;
  bool complete = false;
};

class CoveragePlanner {
 public:
  CoverageStep step(const RobotState& robot, const MapKnowledge& maps, const CoverageConfig& config,
                    const VelocityLimits& limits, double time);
  void reset() { target_.reset(); }
  std::optional<Cell> target() const { return target_; }

 private:
  bool choose_target(const RobotState& robot, const MapKnowledge& maps, const CoverageConfig& config);

  std::optional<Cell> target_;
  int floor_ = -1;
  std::vector<Vec2> path_;
  double planned_at_ = -1e300;
};

// ---------------------------------------------------------------------------
// Active semantic search

struct SearchStep {
  ControlInput u;
  bool replanned = false;
  SearchPlan plan;  // filled when replanned
};

class SearchBehavior {
 public:
  /// `seed_source` is drawn once per replan. Once the label and position of
  /// `target` are settled, the behavior closes in on it instead of planning.
  SearchStep step(const ObjectBelief& target, SemanticClassId label, const RobotState& robot,
                  const WorldScenario& scenario, const MapKnowledge& maps, double time,
                  std::mt19937_64& seed_source);
  void reset();

 private:
  Pose2 waypoint_;
  bool recovery_ = false;
  double planned_at_ = -1e300;
  std::optional<Pose2> approach_;
  std::vector<Vec2> approach_path_;
  double approach_planned_at_ = -1e300;
};

// ---------------------------------------------------------------------------
// Task behaviors

/// Pose the robot adopts to work on an object: `standoff` metres along the
/// believed facing direction, looking back at the object.
Pose2 standoff_pose(const ObjectBelief& belief, double standoff);

class InspectBehavior {
 public:
  ControlInput step(const ObjectBelief& target, double standoff, const RobotState& robot, const WorldScenario& scenario,
                    const MapKnowledge& maps, double time);
  void reset();

 private:
  std::optional<Pose2> goal_;
  std::vector<Vec2> path_;
  double planned_at_ = -1e300;
  bool triggered_ = false;
};

class ClimbBehavior {
 public:
  ControlInput step(const ObjectBelief& target, double standoff, const RobotState& robot, const WorldScenario& scenario,
                    const MapKnowledge& maps, double time);
  void reset();

 private:
  std::vector<Vec2> path_;
  std::optional<Pose2> goal_;
  double planned_at_ = -1e300;
  bool climbing_ = false;
  Vec2 line_origin_ = Vec2::Zero();
  double line_heading_ = 0.0;
};

/// Goal pose for a task behavior: the standoff pose when it is reachable with
/// a view of the object, otherwise the best reachable pose on the standoff
/// circle. Empty when nothing is reachable.
std::optional<Pose2> reachable_standoff(const ObjectBelief& target, double standoff, const RobotState& robot,
                                        const MapKnowledge& maps);

}  // namespace sb2g

#endif  // SB2G_BEHAVIORS_HPP
