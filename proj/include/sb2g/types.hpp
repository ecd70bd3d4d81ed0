#ifndef SB2G_TYPES_HPP
#define SB2G_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sb2g {

// Registries larger than this are rejected at load time so label vectors
// never touch the heap.
constexpr int kMaxLabels = 8;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using LabelVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxLabels, 1>;

using ObjectId = int;

// ---------------------------------------------------------------------------
// Errors

class DegenerateEvidence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTransition : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Angles

/// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  if (a > -std::numbers::pi && a <= std::numbers::pi) return a;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Robot

enum class Gait { walk, stair };

struct Pose2 {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
};

struct RobotState {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
  int floor = 0;
  Gait gait = Gait::walk;
  bool sensor_active = true;

  Pose2 pose() const { return {position, heading}; }
};

// ---------------------------------------------------------------------------
// Semantic classes

struct SemanticClassId {
  int index = 0;
  friend auto operator<=>(const SemanticClassId&, const SemanticClassId&) = default;
};

/// What a behavior does with an object of this class once confident.
enum class Affordance { inspect, ascend, none };

struct ScoreParams {
  double peak = 0.9;              // p_l
  double optimal_distance = 1.5;  // m_l
  double decay = 4.0;             // v_l
};

struct LabelInfo {
  std::string name;
  double gamma = 1.0;
  ScoreParams score;
  double standoff = 1.0;
  Affordance affordance = Affordance::inspect;
  double reward = 100.0;
  // Per-label detection model; the sensor field of view is shared.
  double base_detection = 0.9;
  double optimal_detection_distance = 2.0;
  double detection_decay = 4.0;
};

class LabelRegistry {
 public:
  LabelRegistry() = default;
  explicit LabelRegistry(std::vector<LabelInfo> labels);

  int size() const { return static_cast<int>(labels_.size()); }
  const LabelInfo& at(SemanticClassId id) const { return labels_.at(static_cast<std::size_t>(id.index)); }
  std::optional<SemanticClassId> find(const std::string& name) const;
  SemanticClassId require(const std::string& name) const;
  const std::vector<LabelInfo>& all() const { return labels_; }

 private:
  std::vector<LabelInfo> labels_;
};

// ---------------------------------------------------------------------------
// Affordance status

enum class AffordanceStatus { to_be_inspected, inspected, to_be_ascended, ascended, dismissed };

bool is_resolved(AffordanceStatus s);
bool is_allowed_transition(AffordanceStatus from, AffordanceStatus to);
/// Throws InvalidTransition when the move is not monotone.
AffordanceStatus advance_status(AffordanceStatus from, AffordanceStatus to);
AffordanceStatus initial_status(Affordance a);

// ---------------------------------------------------------------------------
// World objects and measurements

struct ObjectTruth {
  ObjectId id = 0;
  Vec2 position = Vec2::Zero();
  double orientation = 0.0;  // facing direction
  SemanticClassId label;
  AffordanceStatus status = AffordanceStatus::to_be_inspected;
  int floor = 0;
};

struct Observation {
  ObjectId object_id = 0;
  Vec2 position = Vec2::Zero();
  double orientation = 0.0;
  SemanticClassId label;
  double score = 0.0;
};

struct TriggerInspect {
  ObjectId object_id = 0;
  Vec2 believed_position = Vec2::Zero();
};

struct SetGait {
  Gait gait = Gait::walk;
};

using DiscreteAction = std::variant<std::monostate, TriggerInspect, SetGait>;

struct ControlInput {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
  DiscreteAction action;

  bool is_zero() const {
    return vx == 0.0 && vy == 0.0 && omega == 0.0 && std::holds_alternative<std::monostate>(action);
  }
};

struct VelocityLimits {
  double v_max = 1.0;
  double v_max_lateral = 0.5;
  double omega_max = 1.0;
  double stair_speed = 0.3;
};

ControlInput clamp_to_limits(ControlInput u, const VelocityLimits& limits, Gait gait = Gait::walk);
bool within_limits(const ControlInput& u, const VelocityLimits& limits);

// ---------------------------------------------------------------------------
// Beliefs

struct ObjectBelief {
  ObjectId id = 0;
  int floor = 0;
  Vec2 mean = Vec2::Zero();
  Mat2 cov = Mat2::Identity();
  double heading_mean = 0.0;
  double heading_var = 1.0;
  LabelVector labels;
  AffordanceStatus status = AffordanceStatus::to_be_inspected;
  double last_negative_update = -1e300;

  /// sqrt of the largest diagonal entry of the position covariance.
  double position_std() const { return std::sqrt(std::max(cov(0, 0), cov(1, 1))); }
  double probability(SemanticClassId l) const { return labels(l.index); }
};

struct RobotPoseBelief {
  Vec3 mean = Vec3::Zero();  // x, y, heading
  Mat3 cov = Mat3::Zero();
  int floor = 0;
  Gait gait = Gait::walk;

  RobotState as_state() const;
};

struct GeoSemanticBelief {
  RobotPoseBelief robot;
  std::map<ObjectId, ObjectBelief> objects;
  double time = 0.0;
};

/// Returns weights scaled to sum to one. Throws DegenerateEvidence when
/// every weight is zero; callers reset to uniform.
LabelVector normalize_label_distribution(const LabelVector& weights);
LabelVector uniform_labels(int n);

std::string to_string(Gait g);
std::string to_string(AffordanceStatus s);
std::string to_string(Affordance a);
Gait gait_from_string(const std::string& s);
AffordanceStatus status_from_string(const std::string& s);
Affordance affordance_from_string(const std::string& s);

}  // namespace sb2g

#endif  // SB2G_TYPES_HPP
