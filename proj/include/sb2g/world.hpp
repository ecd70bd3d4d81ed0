#ifndef SB2G_WORLD_HPP
#define SB2G_WORLD_HPP

#include "sb2g/scenario.hpp"

#include <random>
#include <string>
#include <vector>

namespace sb2g {

struct WorldEvent {
  enum class Kind { collision, inspection_succeeded, inspection_failed, stair_failure, ascended, gait_changed };
  Kind kind;
  ObjectId object = -1;
  std::string detail;
};

std::string to_string(WorldEvent::Kind k);

/// Ground truth: true robot state, object states and run accounting.
class World {
 public:
  explicit World(const WorldScenario& scenario);

  /// Advances one tick. Actions are adjudicated before motion.
  std::vector<WorldEvent> step(const ControlInput& u, double dt, std::mt19937_64& motion_rng);

  const WorldScenario& scenario() const { return *scenario_; }
  const RobotState& robot() const { return robot_; }
  const std::vector<ObjectTruth>& objects() const { return objects_; }
  double time() const { return time_; }
  long tick() const { return tick_; }
  double path_length() const { return path_length_; }
  double rewards() const { return rewards_; }
  int stair_failures() const { return stair_failures_; }
  int tasks_completed() const { return tasks_completed_; }
  int active_stair() const { return active_stair_; }

  /// Debug and test hook; bypasses all adjudication.
  void set_robot(const RobotState& r) { robot_ = r; }

 private:
  bool cell_blocks(const Vec2& p) const;
  void adjudicate(const DiscreteAction& action, std::vector<WorldEvent>& events);
  void move(const Vec2& target, double heading, std::vector<WorldEvent>& events);

  const WorldScenario* scenario_;
  RobotState robot_;
  std::vector<ObjectTruth> objects_;
  double time_ = 0.0;
  long tick_ = 0;
  double path_length_ = 0.0;
  double rewards_ = 0.0;
  int stair_failures_ = 0;
  int tasks_completed_ = 0;
  int active_stair_ = -1;     // zone currently being climbed
  int stair_contact_ = -1;    // zone whose failed entry was already reported
};

}  // namespace sb2g

#endif  // SB2G_WORLD_HPP
