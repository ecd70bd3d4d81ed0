#include "sb2g/types.hpp"

#include <algorithm>

namespace sb2g {

LabelRegistry::LabelRegistry(std::vector<LabelInfo> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ScenarioError("labels", "registry must not be empty");
  if (static_cast<int>(labels_.size()) > kMaxLabels)
    throw ScenarioError("labels", "at most " + std::to_string(kMaxLabels) + " labels supported");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto& l = labels_[i];
    const std::string field = "labels[" + std::to_string(i) + "]";
    if (l.name.empty()) throw ScenarioError(field + ".name", "must not be empty");
    if (!(l.gamma > 0.0)) throw ScenarioError(field + ".gamma", "must be > 0");
    if (!(l.score.peak > 0.0 && l.score.peak <= 1.0)) throw ScenarioError(field + ".score.p", "must be in (0, 1]");
    if (!(l.score.optimal_distance >= 0.0)) throw ScenarioError(field + ".score.m", "must be >= 0");
    if (!(l.score.decay > 0.0)) throw ScenarioError(field + ".score.v", "must be > 0");
    if (!(l.base_detection > 0.0 && l.base_detection <= 1.0))
      throw ScenarioError(field + ".detection.p0", "must be in (0, 1]");
    if (!(l.optimal_detection_distance >= 0.0)) throw ScenarioError(field + ".detection.m0", "must be >= 0");
    if (!(l.detection_decay > 0.0)) throw ScenarioError(field + ".detection.v0", "must be > 0");
    if (!(l.standoff >= 0.0)) throw ScenarioError(field + ".standoff", "must be >= 0");
    for (std::size_t j = 0; j < i; ++j)
      if (labels_[j].name == l.name) throw ScenarioError(field + ".name", "duplicate label '" + l.name + "'");
  }
}

std::optional<SemanticClassId> LabelRegistry::find(const std::string& name) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i].name == name) return SemanticClassId{static_cast<int>(i)};
  return std::nullopt;
}

SemanticClassId LabelRegistry::require(const std::string& name) const {
  auto id = find(name);
  if (!id) throw ScenarioError("label", "unknown label '" + name + "'");
  return *id;
}

bool is_resolved(AffordanceStatus s) {
  return s == AffordanceStatus::inspected || s == AffordanceStatus::ascended || s == AffordanceStatus::dismissed;
}

bool is_allowed_transition(AffordanceStatus from, AffordanceStatus to) {
  if (from == to) return true;
  switch (from) {
    case AffordanceStatus::to_be_inspected:
      return to == AffordanceStatus::inspected || to == AffordanceStatus::dismissed;
    case AffordanceStatus::to_be_ascended:
      return to == AffordanceStatus::ascended || to == AffordanceStatus::dismissed;
    default:
      return false;
  }
}

AffordanceStatus advance_status(AffordanceStatus from, AffordanceStatus to) {
  if (!is_allowed_transition(from, to))
    throw InvalidTransition("status cannot move from " + to_string(from) + " to " + to_string(to));
  return to;
}

AffordanceStatus initial_status(Affordance a) {
  switch (a) {
    case Affordance::inspect: return AffordanceStatus::to_be_inspected;
    case Affordance::ascend: return AffordanceStatus::to_be_ascended;
    case Affordance::none: return AffordanceStatus::dismissed;
  }
  return AffordanceStatus::dismissed;
}

ControlInput clamp_to_limits(ControlInput u, const VelocityLimits& limits, Gait gait) {
  const double v_long = gait == Gait::stair ? std::min(limits.v_max, limits.stair_speed) : limits.v_max;
  const double v_lat = gait == Gait::stair ? std::min(limits.v_max_lateral, limits.stair_speed) : limits.v_max_lateral;
  u.vx = std::clamp(u.vx, -v_long, v_long);
  u.vy = std::clamp(u.vy, -v_lat, v_lat);
  u.omega = std::clamp(u.omega, -limits.omega_max, limits.omega_max);
  return u;
}

bool within_limits(const ControlInput& u, const VelocityLimits& limits) {
  return std::abs(u.vx) <= limits.v_max && std::abs(u.vy) <= limits.v_max_lateral &&
         std::abs(u.omega) <= limits.omega_max;
}

RobotState RobotPoseBelief::as_state() const {
  RobotState s;
  s.position = mean.head<2>();
  s.heading = mean(2);
  s.floor = floor;
  s.gait = gait;
  return s;
}

LabelVector normalize_label_distribution(const LabelVector& weights) {
  double total = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (!(weights(i) >= 0.0)) throw DegenerateEvidence("label weights must be non-negative");
    total += weights(i);
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateEvidence("label weights carry no evidence");
  LabelVector out = weights / total;
  return out;
}

LabelVector uniform_labels(int n) {
  LabelVector v(n);
  v.setConstant(1.0 / n);
  return v;
}

std::string to_string(Gait g) { return g == Gait::walk ? "walk" : "stair"; }

std::string to_string(AffordanceStatus s) {
  switch (s) {
    case AffordanceStatus::to_be_inspected: return "to_be_inspected";
    case AffordanceStatus::inspected: return "inspected";
    case AffordanceStatus::to_be_ascended: return "to_be_ascended";
    case AffordanceStatus::ascended: return "ascended";
    case AffordanceStatus::dismissed: return "dismissed";
  }
  return "dismissed";
}

std::string to_string(Affordance a) {
  switch (a) {
    case Affordance::inspect: return "inspect";
    case Affordance::ascend: return "ascend";
    case Affordance::none: return "none";
  }
  return "none";
}

Gait gait_from_string(const std::string& s) {
  if (s == "walk") return Gait::walk;
  if (s == "stair") return Gait::stair;
  throw ScenarioError("gait", "unknown gait '" + s + "'");
}

AffordanceStatus status_from_string(const std::string& s) {
  for (auto st : {AffordanceStatus::to_be_inspected, AffordanceStatus::inspected, AffordanceStatus::to_be_ascended,
                  AffordanceStatus::ascended, AffordanceStatus::dismissed})
    if (to_string(st) == s) return st;
  throw ScenarioError("status", "unknown status '" + s + "'");
}

Affordance affordance_from_string(const std::string& s) {
  for (auto a : {Affordance::inspect, Affordance::ascend, Affordance::none})
    if (to_string(a) == s) return a;
  throw ScenarioError("affordance", "unknown affordance '" + s + "'");
}

}  // namespace sb2g
