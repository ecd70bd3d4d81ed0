#include "sb2g/sensing.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sb2g;

namespace {

RobotState robot_at(double x, double y, double heading) {
  RobotState r;
  r.position = Vec2(x, y);
  r.heading = heading;
  return r;
}

double gauss(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

double phi(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

}  // namespace

TEST(DetectionProbability, PeakAtOptimalDistance) {
  DetectionParams p;
  p.base_probability = 0.9;
  p.optimal_distance = 2.0;
  EXPECT_NEAR(detection_probability(robot_at(0, 0, 0), Vec2(2, 0), 0, p), 0.9, 1e-12);
}

TEST(DetectionProbability, ZeroBehindRobot) {
  DetectionParams p;
  EXPECT_EQ(detection_probability(robot_at(0, 0, 0), Vec2(-2, 0), 0, p), 0.0);
}

TEST(DetectionProbability, DecaysWithDistanceOffset) {
  DetectionParams p;
  p.base_probability = 0.8;
  p.optimal_distance = 2.0;
  p.decay = 3.0;
  EXPECT_NEAR(detection_probability(robot_at(0, 0, 0), Vec2(5, 0), 0, p), 0.29430, 1e-5);
  EXPECT_NEAR(detection_probability(robot_at(0, 0, 0), Vec2(5, 0), 0, p), 0.8 * std::exp(-1.0), 1e-15);
}

TEST(DetectionProbability, OtherFloorAndOcclusion) {
  DetectionParams p;
  EXPECT_EQ(detection_probability(robot_at(1, 1, 0), Vec2(3, 1), 1, p), 0.0);
  auto grid = OccupancyGrid::from_rows({"#########", "#...#...#", "#########"}, 1.0);
  EXPECT_EQ(detection_probability(robot_at(1.5, 1.5, 0), Vec2(6.5, 1.5), 0, p, &grid), 0.0);
  EXPECT_GT(detection_probability(robot_at(1.5, 1.5, 0), Vec2(3.5, 1.5), 0, p, &grid), 0.0);
}

TEST(PoseMeasurementCovariance, DistanceTermOnly) {
  NoiseModelParams n;
  n.position.distance = 0.05;
  const auto c = pose_measurement_covariance(robot_at(0, 0, 0), Vec2(4, 0), n, 1.0);
  EXPECT_NEAR(c.position(0, 0), 0.04, 1e-15);
  EXPECT_NEAR(c.position(1, 1), 0.04, 1e-15);
  EXPECT_EQ(c.position(0, 1), 0.0);
}

TEST(PoseMeasurementCovariance, NoNoiseIsExact) {
  NoiseModelParams n;
  const auto c = pose_measurement_covariance(robot_at(0, 0, 0), Vec2(3, 1), n, 2.0);
  EXPECT_TRUE(c.position.isZero(0.0));
  EXPECT_EQ(c.orientation, 0.0);
}

TEST(PoseMeasurementCovariance, AffineInDistanceBearingAndLabel) {
  NoiseModelParams n;
  n.position = {0.02, 0.1, 0.05};
  const Vec2 obj = 2.0 * Vec2(std::cos(0.5), std::sin(0.5));
  const auto c = pose_measurement_covariance(robot_at(0, 0, 0), obj, n, 2.0);
  EXPECT_NEAR(c.position(0, 0), 0.0361, 1e-12);
  EXPECT_NEAR(c.position(1, 1), 0.0361, 1e-12);
}

TEST(ExpectedScore, PeaksAtOptimalDistance) {
  ScoreParams s{0.9, 1.5, 4.0};
  EXPECT_DOUBLE_EQ(expected_score(s, 1.5), 0.9);
  EXPECT_LT(expected_score(s, 1.0), 0.9);
  EXPECT_LT(expected_score(s, 2.0), 0.9);
  EXPECT_NEAR(expected_score(s, 5.5), 0.33110, 1e-5);
}

TEST(ScoreLikelihood, TruncatedGaussianIntegratesToOne) {
  ScoreParams s{0.9, 1.5, 4.0};
  const int n = 20000;
  double mass = 0.0;
  for (int i = 0; i < n; ++i) mass += score_likelihood((i + 0.5) / n, s, 3.0, 0.1) / n;
  EXPECT_NEAR(mass, 1.0, 1e-6);
  EXPECT_EQ(score_likelihood(1.01, s, 3.0, 0.1), 0.0);
  EXPECT_EQ(score_likelihood(-0.01, s, 3.0, 0.1), 0.0);
  const ScoreDensity dens(s, 3.0, 0.1);
  EXPECT_NEAR(dens(0.42), score_likelihood(0.42, s, 3.0, 0.1), 1e-12);
}

TEST(ObservationLikelihood, ProductOfFactors) {
  const auto sc = fixtures::load("office-small");
  const auto& sensor = sc.sensor;
  const RobotState r = robot_at(0, 0, 0.1);
  ObjectTruth o;
  o.position = Vec2(3.0, 0.8);
  o.orientation = 2.0;
  o.label = SemanticClassId{1};
  Observation z;
  z.position = Vec2(3.2, 0.6);
  z.orientation = 2.3;
  z.label = SemanticClassId{0};
  z.score = 0.55;

  // Independent evaluation of each factor.
  const double d = o.position.norm();
  const double beta = std::abs(std::atan2(0.8, 3.0) - 0.1);
  const auto& info = sensor.labels.at(o.label);
  const double sp = 0.1 * d + 0.3 * beta + 0.1 * info.gamma;
  const double sq = 0.02 * d + 0.05 * beta + 0.02 * info.gamma;
  const double pos = gauss(3.2, 3.0, sp * sp) * gauss(0.6, 0.8, sp * sp);
  const double ori = gauss(2.3, 2.0, sq * sq);
  const double conf = 0.1;
  const double mu = info.score.peak * std::exp(-std::abs(info.score.optimal_distance - d) / info.score.decay);
  const double sc_pdf = gauss(0.55, mu, 0.01) / (phi((1 - mu) / 0.1) - phi(-mu / 0.1));
  EXPECT_NEAR(observation_likelihood(z, o, r, sensor), pos * ori * conf * sc_pdf, 1e-9 * pos * ori * conf * sc_pdf);
}

TEST(ObservationLikelihood, ZeroConfusionEntryVanishes) {
  const auto sc = fixtures::load("office-small");
  ObjectTruth o;
  o.position = Vec2(3.0, 0.0);
  o.label = SemanticClassId{0};  // fire extinguisher is never reported as stairs
  Observation z;
  z.position = o.position;
  z.label = SemanticClassId{2};
  z.score = 0.5;
  EXPECT_EQ(observation_likelihood(z, o, robot_at(0, 0, 0), sc.sensor), 0.0);
}

class SensorSampling : public ::testing::Test {
 protected:
  void SetUp() override {
    scenario = fixtures::load("office-small");
    object.id = 7;
    object.position = Vec2(3.0, 0.5);
    object.orientation = 1.0;
    object.label = SemanticClassId{0};
  }
  WorldScenario scenario;
  ObjectTruth object;
  RobotState robot = robot_at(0, 0, 0);
};

TEST_F(SensorSampling, DetectionRateAndMeasurementMoments) {
  const int n = 100000;
  std::mt19937_64 det(11), meas(12);
  const auto& sensor = scenario.sensor;
  const double pd = detection_probability(robot, object, sensor.detection(object.label));
  const auto cov = pose_measurement_covariance(robot, object.position, sensor.noise, 1.0);

  int hits = 0;
  Vec2 sum = Vec2::Zero();
  Mat2 sq = Mat2::Zero();
  std::vector<int> label_counts(static_cast<std::size_t>(sensor.labels.size()), 0);
  for (int i = 0; i < n; ++i) {
    const auto zs = sample_observations(robot, std::span(&object, 1), sensor, nullptr, {det, meas});
    if (zs.empty()) continue;
    ++hits;
    const Vec2 e = zs[0].position - object.position;
    sum += e;
    sq += e * e.transpose();
    ++label_counts[static_cast<std::size_t>(zs[0].label.index)];
  }
  EXPECT_NEAR(static_cast<double>(hits) / n, pd, 0.01);

  const Vec2 mean = sum / hits;
  const Mat2 var = sq / hits - mean * mean.transpose();
  const double s2 = cov.position(0, 0);
  const double se_mean = std::sqrt(s2 / hits);
  const double se_var = s2 * std::sqrt(2.0 / hits);
  EXPECT_LT(std::abs(mean.x()), 3 * se_mean);
  EXPECT_LT(std::abs(mean.y()), 3 * se_mean);
  EXPECT_LT(std::abs(var(0, 0) - s2), 3 * se_var);
  EXPECT_LT(std::abs(var(1, 1) - s2), 3 * se_var);
  EXPECT_LT(std::abs(var(0, 1)), 3 * s2 / std::sqrt(hits));

  for (int c = 0; c < sensor.labels.size(); ++c)
    EXPECT_NEAR(static_cast<double>(label_counts[static_cast<std::size_t>(c)]) / hits, sensor.noise.confusion(0, c),
                0.01);
}

TEST_F(SensorSampling, ScoreSamplesFollowTruncatedNormal) {
  const ScoreParams s{0.9, 1.5, 4.0};
  const double d = 4.0, sd = 0.1;
  std::mt19937_64 rng(5);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_score(s, d, sd, rng);
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
    sum += x;
  }
  const double mu = expected_score(s, d);
  const double a = -mu / sd, b = (1 - mu) / sd;
  auto pdf = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); };
  const double mean = mu + sd * (pdf(a) - pdf(b)) / (phi(b) - phi(a));
  EXPECT_LT(std::abs(sum / n - mean), 3 * sd / std::sqrt(n));
}

TEST_F(SensorSampling, InactiveSensorSeesNothing) {
  std::mt19937_64 det(1), meas(2);
  robot.sensor_active = false;
  for (int i = 0; i < 100; ++i)
    EXPECT_TRUE(sample_observations(robot, std::span(&object, 1), scenario.sensor, nullptr, {det, meas}).empty());
}
