#ifndef SB2G_BELIEF_FILTER_HPP
#define SB2G_BELIEF_FILTER_HPP

#include "sb2g/sensing.hpp"
#include "sb2g/types.hpp"

#include <span>
#include <vector>

namespace sb2g {

struct FilterConfig {
  double spawn_inflation = 4.0;
  double label_smoothing = 0.1;
  double negative_update_interval = 1.0;  // seconds, per object
  Mat3 process_noise = Vec3(0.001, 0.001, 0.0005).asDiagonal();  // per second
};

struct FilterEvent {
  enum class Kind { spawn, degenerate_reset };
  Kind kind;
  ObjectId object;
};

struct ObjectUpdate {
  ObjectBelief belief;
  bool degenerate_reset = false;
};

/// Unicycle motion with body-frame longitudinal and lateral velocity.
Vec3 propagate_pose(const Vec3& pose, const ControlInput& u, double dt);

/// Robot pose prediction; object beliefs are static and pass through.
GeoSemanticBelief predict(const GeoSemanticBelief& belief, const ControlInput& u, double dt,
                          const Mat3& process_noise);

/// EKF correction of the robot pose with a direct pose fix.
RobotPoseBelief localize(const RobotPoseBelief& prior, const Vec3& fix, const Mat3& fix_cov);

/// Kalman update of a Gaussian position with an identity measurement model.
void kalman_position_update(Vec2& mean, Mat2& cov, const Vec2& z, const Mat2& r);

/// Label likelihood of one detection for every class hypothesis:
/// confusion(l, z.label) * score_likelihood(z.score | l, d).
LabelVector detection_label_likelihood(const Observation& z, double distance, const SensorModel& sensor);

ObjectUpdate update_object(const ObjectBelief& belief, const Observation& z, const RobotState& robot,
                           const SensorModel& sensor);

/// Negative-information update for an object that was not detected.
ObjectUpdate update_no_detection(const ObjectBelief& belief, const RobotState& robot, const SensorModel& sensor,
                                 const OccupancyGrid* occlusion = nullptr);

ObjectBelief spawn_track(const Observation& z, const RobotState& robot, const SensorModel& sensor,
                         const FilterConfig& config);

/// One filter step for a detector frame: spawn, update, and negative updates
/// for unseen tracks inside the field of view.
GeoSemanticBelief ingest(const GeoSemanticBelief& belief, std::span<const Observation> observations,
                         const RobotState& robot, const SensorModel& sensor, const OccupancyGrid* occlusion,
                         const FilterConfig& config, std::vector<FilterEvent>* events = nullptr);

/// Points a pending track at the task its engaged label implies.
void retarget_pending(ObjectBelief& belief, Affordance affordance);

}  // namespace sb2g

#endif  // SB2G_BELIEF_FILTER_HPP
