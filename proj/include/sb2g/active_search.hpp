#ifndef SB2G_ACTIVE_SEARCH_HPP
#define SB2G_ACTIVE_SEARCH_HPP

#include "sb2g/belief_filter.hpp"
#include "sb2g/config.hpp"
#include "sb2g/grid.hpp"
#include "sb2g/sensing.hpp"

#include <cstdint>
#include <vector>

namespace sb2g {

/// What the planner may assume about the world: the sensor model and the
/// robot's own map. Unknown cells block both motion and line of sight.
struct SearchWorld {
  const SensorModel* sensor = nullptr;
  const NavGrid* nav = nullptr;
  const OccupancyGrid* known = nullptr;
  PlannerConfig config;
};

enum class SearchMethod { branch_and_bound, exhaustive };

struct SearchStats {
  long nodes = 0;   // beliefs evaluated
  long pruned = 0;  // actions abandoned before all outcomes were summed
};

struct SearchPlan {
  std::vector<Pose2> candidates;  // root candidates; index 0 stays put
  std::vector<bool> valid;
  int best = 0;
  double value = 0.0;
  bool recovery = false;  // only the stay candidate was collision free
  SearchStats stats;
};

/// Per-label detection probability of an object believed at `target`.
LabelVector detection_vector(const RobotState& robot, const Vec2& target, int target_floor,
                             const SensorModel& sensor, const OccupancyGrid* known);

/// One weighted observation outcome of a node.
struct SearchOutcome {
  double weight = 0.0;
  ObjectBelief belief;
};

/// Candidate poses of a tree node. Deterministic in `seed`.
void sample_candidates(const ObjectBelief& target, const RobotState& robot, const SearchWorld& world,
                       std::uint64_t seed, std::vector<Pose2>& poses, std::vector<bool>& valid);

/// Outcomes of visiting `pose`: the miss branch first, then sampled
/// detections. Zero-weight branches are omitted. With `leaf`, detection
/// outcomes carry only the updated labels and position covariance.
void sample_outcomes(const ObjectBelief& target, const RobotState& pose, const SearchWorld& world,
                     std::uint64_t seed, std::vector<SearchOutcome>& out, bool leaf = false);

/// Receding-horizon entropy minimisation over a sparsely sampled tree.
/// Both methods expand the identical tree for a given seed.
SearchPlan plan_active_search(const ObjectBelief& target, const RobotState& robot, const SearchWorld& world,
                              std::uint64_t seed, SearchMethod method = SearchMethod::branch_and_bound);

}  // namespace sb2g

#endif  // SB2G_ACTIVE_SEARCH_HPP
