#include "sb2g/sensing.hpp"

#include <cmath>
#include <limits>

namespace sb2g {

void DetectionParams::validate() const {
  if (!(base_probability > 0.0 && base_probability <= 1.0))
    throw ScenarioError("detection.p0", "must be in (0, 1]");
  if (!(optimal_distance >= 0.0)) throw ScenarioError("detection.m0", "must be >= 0");
  if (!(decay > 0.0)) throw ScenarioError("detection.v0", "must be > 0");
  if (!(fov_half_angle > 0.0 && fov_half_angle <= std::numbers::pi))
    throw ScenarioError("sensor.fov_half_angle", "must be in (0, pi]");
  if (!(max_range > 0.0)) throw ScenarioError("sensor.max_range", "must be > 0");
}

void NoiseModelParams::validate(int label_count) const {
  for (double s : {position.distance, position.bearing, position.label, orientation.distance, orientation.bearing,
                   orientation.label})
    if (!(s >= 0.0)) throw ScenarioError("sensor.noise", "noise coefficients must be >= 0");
  if (confusion.rows() != label_count || confusion.cols() != label_count)
    throw ScenarioError("sensor.confusion", "must be a square matrix over the label registry");
  for (int r = 0; r < label_count; ++r) {
    double sum = 0.0;
    for (int c = 0; c < label_count; ++c) {
      if (!(confusion(r, c) >= 0.0))
        throw ScenarioError("sensor.confusion[" + std::to_string(r) + "]", "entries must be >= 0");
      sum += confusion(r, c);
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ScenarioError("sensor.confusion[" + std::to_string(r) + "]", "row must sum to 1");
  }
  if (!(score_std > 0.0)) throw ScenarioError("sensor.score_std", "must be > 0");
}

DetectionParams SensorModel::detection(SemanticClassId label) const {
  const auto& info = labels.at(label);
  return {info.base_detection, info.optimal_detection_distance, info.detection_decay, fov_half_angle, max_range};
}

void SensorModel::validate() const {
  for (int i = 0; i < labels.size(); ++i) detection(SemanticClassId{i}).validate();
  noise.validate(labels.size());
  if (!(period > 0.0)) throw ScenarioError("sensor.period", "must be > 0");
}

double bearing_to(const RobotState& robot, const Vec2& target) {
  const Vec2 d = target - robot.position;
  if (d.squaredNorm() == 0.0) return 0.0;
  return std::abs(wrap_angle(std::atan2(d.y(), d.x()) - robot.heading));
}

bool in_field_of_view(const RobotState& robot, const Vec2& target, int target_floor, double half_angle,
                      double max_range, const OccupancyGrid* occlusion, bool unknown_blocks) {
  if (target_floor != robot.floor) return false;
  const double d = (target - robot.position).norm();
  if (d > max_range) return false;
  if (bearing_to(robot, target) > half_angle) return false;
  if (occlusion && !occlusion->line_of_sight(robot.position, target, unknown_blocks)) return false;
  return true;
}

double detection_probability(const RobotState& robot, const Vec2& target, int target_floor,
                             const DetectionParams& params, const OccupancyGrid* occlusion, bool unknown_blocks) {
  if (!in_field_of_view(robot, target, target_floor, params.fov_half_angle, params.max_range, occlusion,
                        unknown_blocks))
    return 0.0;
  const double d = (target - robot.position).norm();
  return params.base_probability * std::exp(-std::abs(params.optimal_distance - d) / params.decay);
}

double detection_probability(const RobotState& robot, const ObjectTruth& object, const DetectionParams& params,
                             const OccupancyGrid* occlusion) {
  return detection_probability(robot, object.position, object.floor, params, occlusion);
}

MeasurementCovariance pose_measurement_covariance(const RobotState& robot, const Vec2& object,
                                                  const NoiseModelParams& noise, double gamma) {
  const double d = (object - robot.position).norm();
  const double beta = bearing_to(robot, object);
  const double sp = noise.position.distance * d + noise.position.bearing * beta + noise.position.label * gamma;
  const double sq =
      noise.orientation.distance * d + noise.orientation.bearing * beta + noise.orientation.label * gamma;
  MeasurementCovariance c;
  c.position = Mat2::Identity() * (sp * sp);
  c.orientation = sq * sq;
  return c;
}

double expected_score(const ScoreParams& params, double d) {
  return params.peak * std::exp(-std::abs(params.optimal_distance - d) / params.decay);
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x, double var) {
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace

double score_likelihood(double score, const ScoreParams& params, double d, double score_std) {
  if (score < 0.0 || score > 1.0) return 0.0;
  const double mean = expected_score(params, d);
  const double mass = normal_cdf((1.0 - mean) / score_std) - normal_cdf((0.0 - mean) / score_std);
  return normal_pdf(score - mean, score_std * score_std) / mass;
}

ScoreDensity::ScoreDensity(const ScoreParams& params, double d, double score_std)
    : mean(expected_score(params, d)), std(score_std) {
  inv_mass = 1.0 / (normal_cdf((1.0 - mean) / score_std) - normal_cdf((0.0 - mean) / score_std));
}

double ScoreDensity::operator()(double score) const {
  if (score < 0.0 || score > 1.0) return 0.0;
  return normal_pdf(score - mean, std * std) * inv_mass;
}

double pose_likelihood(const Observation& z, const Vec2& position, double orientation,
                       const MeasurementCovariance& cov) {
  const Vec2 r = z.position - position;
  const double dq = wrap_angle(z.orientation - orientation);
  const double det = cov.position.determinant();
  double p_pos;
  if (det > 0.0) {
    const double m = r.dot(cov.position.inverse() * r);
    p_pos = std::exp(-0.5 * m) / (2.0 * std::numbers::pi * std::sqrt(det));
  } else {
    p_pos = r.squaredNorm() == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  double p_q;
  if (cov.orientation > 0.0) {
    p_q = normal_pdf(dq, cov.orientation);
  } else {
    p_q = dq == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return p_pos * p_q;
}

double class_likelihood(const NoiseModelParams& noise, SemanticClassId truth, SemanticClassId detected) {
  return noise.confusion(truth.index, detected.index);
}

double observation_likelihood(const Observation& z, const ObjectTruth& object, const RobotState& robot,
                              const SensorModel& sensor) {
  const auto& info = sensor.labels.at(object.label);
  const auto cov = pose_measurement_covariance(robot, object.position, sensor.noise, info.gamma);
  const double d = (object.position - robot.position).norm();
  const double p_pq = pose_likelihood(z, object.position, object.orientation, cov);
  const double p_l = class_likelihood(sensor.noise, object.label, z.label);
  const double p_s = score_likelihood(z.score, info.score, d, sensor.noise.score_std);
  return p_pq * p_l * p_s;
}

std::vector<Observation> sample_observations(const RobotState& robot, std::span<const ObjectTruth> truths,
                                             const SensorModel& sensor, const OccupancyGrid* occlusion,
                                             SensorStreams rng) {
  std::vector<Observation> out;
  if (!robot.sensor_active) return out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& obj : truths) {
    const double u = unit(rng.detection);
    const double pd = detection_probability(robot, obj, sensor.detection(obj.label), occlusion);
    if (!(u < pd)) continue;
    const auto& info = sensor.labels.at(obj.label);
    const auto cov = pose_measurement_covariance(robot, obj.position, sensor.noise, info.gamma);
    Observation z;
    z.object_id = obj.id;
    const double ex = gauss(rng.measurement);
    const double ey = gauss(rng.measurement);
    const double eq = gauss(rng.measurement);
    z.position = obj.position + Vec2(std::sqrt(cov.position(0, 0)) * ex, std::sqrt(cov.position(1, 1)) * ey);
    z.orientation = wrap_angle(obj.orientation + std::sqrt(cov.orientation) * eq);
    const double ul = unit(rng.measurement);
    double acc = 0.0;
    z.label = SemanticClassId{sensor.labels.size() - 1};
    for (int c = 0; c < sensor.labels.size(); ++c) {
      acc += sensor.noise.confusion(obj.label.index, c);
      if (ul < acc) {
        z.label = SemanticClassId{c};
        break;
      }
    }
    const double d = (obj.position - robot.position).norm();
    z.score = sample_score(info.score, d, sensor.noise.score_std, rng.measurement);
    out.push_back(z);
  }
  return out;
}

}  // namespace sb2g
