#include "sb2g/belief_filter.hpp"

#include <algorithm>
#include <set>

namespace sb2g {

Vec3 propagate_pose(const Vec3& pose, const ControlInput& u, double dt) {
  const double c = std::cos(pose(2));
  const double s = std::sin(pose(2));
  Vec3 out;
  out(0) = pose(0) + dt * (c * u.vx - s * u.vy);
  out(1) = pose(1) + dt * (s * u.vx + c * u.vy);
  out(2) = wrap_angle(pose(2) + dt * u.omega);
  return out;
}

GeoSemanticBelief predict(const GeoSemanticBelief& belief, const ControlInput& u, double dt,
                          const Mat3& process_noise) {
  GeoSemanticBelief out = belief;
  out.time = belief.time + dt;
  if (u.vx == 0.0 && u.vy == 0.0 && u.omega == 0.0) return out;
  const double th = belief.robot.mean(2);
  const double c = std::cos(th);
  const double s = std::sin(th);
  Mat3 f = Mat3::Identity();
  f(0, 2) = dt * (-s * u.vx - c * u.vy);
  f(1, 2) = dt * (c * u.vx - s * u.vy);
  out.robot.mean = propagate_pose(belief.robot.mean, u, dt);
  out.robot.cov = f * belief.robot.cov * f.transpose() + process_noise * dt;
  return out;
}

RobotPoseBelief localize(const RobotPoseBelief& prior, const Vec3& fix, const Mat3& fix_cov) {
  RobotPoseBelief out = prior;
  const Mat3 s = prior.cov + fix_cov;
  if (s.determinant() <= 0.0) return out;
  const Mat3 k = prior.cov * s.inverse();
  Vec3 innovation = fix - prior.mean;
  innovation(2) = wrap_angle(innovation(2));
  out.mean = prior.mean + k * innovation;
  out.mean(2) = wrap_angle(out.mean(2));
  const Mat3 ik = Mat3::Identity() - k;
  out.cov = ik * prior.cov * ik.transpose() + k * fix_cov * k.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

void kalman_position_update(Vec2& mean, Mat2& cov, const Vec2& z, const Mat2& r) {
  const Mat2 s = cov + r;
  if (!(s.determinant() > 0.0)) {
    // Both prior and measurement are exact; nothing to fuse.
    if (cov.isZero(0.0)) return;
    mean = z;
    cov.setZero();
    return;
  }
  const Mat2 k = cov * s.inverse();
  mean = mean + k * (z - mean);
  const Mat2 ik = Mat2::Identity() - k;
  cov = ik * cov * ik.transpose() + k * r * k.transpose();
  cov = 0.5 * (cov + cov.transpose());
}

LabelVector detection_label_likelihood(const Observation& z, double distance, const SensorModel& sensor) {
  const int n = sensor.labels.size();
  LabelVector lik(n);
  for (int l = 0; l < n; ++l) {
    const SemanticClassId id{l};
    const double c = class_likelihood(sensor.noise, id, z.label);
    lik(l) = c == 0.0 ? 0.0 : c * score_likelihood(z.score, sensor.labels.at(id).score, distance, sensor.noise.score_std);
  }
  return lik;
}

namespace {

LabelVector posterior_or_uniform(const LabelVector& weights, bool& degenerate) {
  try {
    degenerate = false;
    return normalize_label_distribution(weights);
  } catch (const DegenerateEvidence&) {
    degenerate = true;
    return uniform_labels(static_cast<int>(weights.size()));
  }
}

}  // namespace

ObjectUpdate update_object(const ObjectBelief& belief, const Observation& z, const RobotState& robot,
                           const SensorModel& sensor) {
  ObjectUpdate out{belief, false};
  auto& b = out.belief;
  const double gamma = sensor.labels.at(z.label).gamma;
  const auto r = pose_measurement_covariance(robot, belief.mean, sensor.noise, gamma);

  kalman_position_update(b.mean, b.cov, z.position, r.position);

  const double sq = belief.heading_var + r.orientation;
  if (sq > 0.0) {
    const double k = belief.heading_var / sq;
    b.heading_mean = wrap_angle(belief.heading_mean + k * wrap_angle(z.orientation - belief.heading_mean));
    b.heading_var = (1.0 - k) * belief.heading_var;
  }

  const double d = (belief.mean - robot.position).norm();
  const LabelVector lik = detection_label_likelihood(z, d, sensor);
  b.labels = posterior_or_uniform(belief.labels.cwiseProduct(lik), out.degenerate_reset);
  return out;
}

ObjectUpdate update_no_detection(const ObjectBelief& belief, const RobotState& robot, const SensorModel& sensor,
                                 const OccupancyGrid* occlusion) {
  ObjectUpdate out{belief, false};
  const int n = sensor.labels.size();
  LabelVector w(n);
  bool informative = false;
  for (int l = 0; l < n; ++l) {
    const double pd =
        detection_probability(robot, belief.mean, belief.floor, sensor.detection(SemanticClassId{l}), occlusion, true);
    if (pd > 0.0) informative = true;
    w(l) = belief.labels(l) * (1.0 - pd);
  }
  if (!informative) return out;
  out.belief.labels = posterior_or_uniform(w, out.degenerate_reset);
  return out;
}

ObjectBelief spawn_track(const Observation& z, const RobotState& robot, const SensorModel& sensor,
                         const FilterConfig& config) {
  const int n = sensor.labels.size();
  ObjectBelief b;
  b.id = z.object_id;
  b.floor = robot.floor;
  b.mean = z.position;
  const auto r = pose_measurement_covariance(robot, z.position, sensor.noise, sensor.labels.at(z.label).gamma);
  b.cov = r.position * config.spawn_inflation;
  b.heading_mean = z.orientation;
  b.heading_var = r.orientation * config.spawn_inflation;
  b.labels = LabelVector::Constant(n, config.label_smoothing / n);
  b.labels(z.label.index) += 1.0 - config.label_smoothing;
  b.status = initial_status(sensor.labels.at(z.label).affordance);
  if (b.status == AffordanceStatus::dismissed) b.status = AffordanceStatus::to_be_inspected;
  return b;
}

GeoSemanticBelief ingest(const GeoSemanticBelief& belief, std::span<const Observation> observations,
                         const RobotState& robot, const SensorModel& sensor, const OccupancyGrid* occlusion,
                         const FilterConfig& config, std::vector<FilterEvent>* events) {
  GeoSemanticBelief out = belief;
  std::set<ObjectId> seen;
  for (const auto& z : observations) {
    seen.insert(z.object_id);
    auto it = out.objects.find(z.object_id);
    if (it == out.objects.end()) {
      out.objects.emplace(z.object_id, spawn_track(z, robot, sensor, config));
      if (events) events->push_back({FilterEvent::Kind::spawn, z.object_id});
      continue;
    }
    auto upd = update_object(it->second, z, robot, sensor);
    it->second = upd.belief;
    if (upd.degenerate_reset && events) events->push_back({FilterEvent::Kind::degenerate_reset, z.object_id});
  }
  for (auto& [id, track] : out.objects) {
    if (seen.count(id) || is_resolved(track.status)) continue;
    if (out.time - track.last_negative_update < config.negative_update_interval) continue;
    if (!in_field_of_view(robot, track.mean, track.floor, sensor.fov_half_angle, sensor.max_range, occlusion, true))
      continue;
    auto upd = update_no_detection(track, robot, sensor, occlusion);
    track = upd.belief;
    track.last_negative_update = out.time;
    if (upd.degenerate_reset && events) events->push_back({FilterEvent::Kind::degenerate_reset, id});
  }
  return out;
}

void retarget_pending(ObjectBelief& belief, Affordance affordance) {
  if (is_resolved(belief.status)) return;
  if (affordance == Affordance::ascend)
    belief.status = AffordanceStatus::to_be_ascended;
  else if (affordance == Affordance::inspect)
    belief.status = AffordanceStatus::to_be_inspected;
}

}  // namespace sb2g
