#ifndef SB2G_CONFIG_HPP
#define SB2G_CONFIG_HPP

#include "sb2g/types.hpp"

namespace sb2g {

/// Receding-horizon search budget for active semantic search.
struct PlannerConfig {
  double horizon = 8.0;       // seconds
  int action_samples = 8;     // candidate next poses per node
  int steps = 4;              // tree depth; horizon / steps seconds per step
  double entropy_weight = 0.1;
  int outcome_samples = 3;    // detection draws per node, plus the miss branch
  double min_displacement = 0.5;
  double max_displacement = 2.0;

  double step_duration() const { return horizon / steps; }
  void validate() const;
};

/// Belief-set thresholds gating graph transitions.
struct Thresholds {
  double search_probability = 0.7;
  double search_std = 5.0;
  double confident_probability = 0.9;
  double confident_std = 1.0;
  double confident_distance = 2.5;
  double absent_probability = 0.2;
  // Relaxed confident set used to abort a task behavior.
  double abort_std_factor = 2.0;

  void validate() const;
};

struct CoverageConfig {
  double footprint_radius = 4.0;
  double lidar_range = 10.0;
  int candidate_cells = 64;
  double lookahead = 0.6;
};

struct RewardSpec {
  double cost_per_meter = 1.0;
  double cost_per_second = 0.05;
  double stair_failure_penalty = 50.0;
};

struct RobotConfig {
  RobotState start;
  VelocityLimits limits;
  double motion_noise_std = 0.01;   // meters per tick, each axis
  double heading_noise_std = 0.0;   // radians per tick
  bool perfect_localization = true;
  double localization_std = 0.05;   // pose-fix noise when localization is imperfect
  double inflation = 0.25;          // planning clearance, meters
};

}  // namespace sb2g

#endif  // SB2G_CONFIG_HPP
