#ifndef SB2G_SENSING_HPP
#define SB2G_SENSING_HPP

#include "sb2g/grid.hpp"
#include "sb2g/types.hpp"

#include <algorithm>
#include <random>
#include <span>
#include <vector>

namespace sb2g {

struct DetectionParams {
  double base_probability = 0.9;  // p_0
  double optimal_distance = 2.0;  // m_0
  double decay = 4.0;             // v_0
  double fov_half_angle = std::numbers::pi / 4.0;
  double max_range = 10.0;

  void validate() const;
};

/// Affine noise coefficients: std = distance*d + bearing*beta + label*gamma.
struct PoseNoise {
  double distance = 0.0;
  double bearing = 0.0;
  double label = 0.0;
};

struct NoiseModelParams {
  PoseNoise position;
  PoseNoise orientation;
  Eigen::MatrixXd confusion;  // confusion(true, detected)
  double score_std = 0.1;

  void validate(int label_count) const;
};

struct SensorModel {
  LabelRegistry labels;
  NoiseModelParams noise;
  double fov_half_angle = std::numbers::pi / 4.0;
  double max_range = 10.0;
  double period = 0.5;  // seconds between detector frames

  DetectionParams detection(SemanticClassId label) const;
  void validate() const;
};

/// Absolute bearing of `target` from the robot heading, in [0, pi].
double bearing_to(const RobotState& robot, const Vec2& target);

/// Angular wedge, range, floor and (optionally) grid line of sight.
bool in_field_of_view(const RobotState& robot, const Vec2& target, int target_floor, double half_angle,
                      double max_range, const OccupancyGrid* occlusion, bool unknown_blocks = false);

double detection_probability(const RobotState& robot, const Vec2& target, int target_floor,
                             const DetectionParams& params, const OccupancyGrid* occlusion = nullptr,
                             bool unknown_blocks = false);
double detection_probability(const RobotState& robot, const ObjectTruth& object, const DetectionParams& params,
                             const OccupancyGrid* occlusion = nullptr);

struct MeasurementCovariance {
  Mat2 position = Mat2::Zero();
  double orientation = 0.0;  // variance, rad^2
};

MeasurementCovariance pose_measurement_covariance(const RobotState& robot, const Vec2& object,
                                                  const NoiseModelParams& noise, double gamma);

/// Mean detector score at distance d.
double expected_score(const ScoreParams& params, double d);

/// Gaussian centred on expected_score(d), truncated to [0, 1].
double score_likelihood(double score, const ScoreParams& params, double d, double score_std);

/// score_likelihood with the distance-dependent terms evaluated once.
struct ScoreDensity {
  double mean = 0.0;
  double std = 1.0;
  double inv_mass = 1.0;

  ScoreDensity() = default;
  ScoreDensity(const ScoreParams& params, double d, double score_std);
  double operator()(double score) const;
};

double pose_likelihood(const Observation& z, const Vec2& position, double orientation,
                       const MeasurementCovariance& cov);
double class_likelihood(const NoiseModelParams& noise, SemanticClassId truth, SemanticClassId detected);

/// Product of the pose, class and score factors for hypothesis `object`.
double observation_likelihood(const Observation& z, const ObjectTruth& object, const RobotState& robot,
                              const SensorModel& sensor);

struct SensorStreams {
  std::mt19937_64& detection;
  std::mt19937_64& measurement;
};

/// Draws a score from the truncated score density.
template <typename Rng>
double sample_score(const ScoreParams& params, double d, double score_std, Rng& rng);

/// One Bernoulli detection draw per object, then pose, class and score
/// draws for each detected object.
std::vector<Observation> sample_observations(const RobotState& robot, std::span<const ObjectTruth> truths,
                                             const SensorModel& sensor, const OccupancyGrid* occlusion,
                                             SensorStreams rng);

template <typename Rng>
double sample_score(const ScoreParams& params, double d, double score_std, Rng& rng) {
  const double mean = expected_score(params, d);
  std::normal_distribution<double> n(mean, score_std);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double s = n(rng);
    if (s >= 0.0 && s <= 1.0) return s;
  }
  return std::clamp(mean, 0.0, 1.0);
}

}  // namespace sb2g

#endif  // SB2G_SENSING_HPP
