#include "sb2g/behaviors.hpp"

#include <cmath>

namespace sb2g {

namespace {

double heading_to(const Vec2& from, const Vec2& to) {
  const Vec2 d = to - from;
  return d.squaredNorm() > 0.0 ? std::atan2(d.y(), d.x()) : 0.0;
}

double turn_rate(double error, const VelocityLimits& limits) {
  return std::clamp(2.0 * error, -limits.omega_max, limits.omega_max);
}

std::vector<Vec2> plan_path(const NavGrid& nav, const Vec2& from, const Vec2& to) {
  auto p = astar(nav, from, to);
  if (!p) return {to};
  auto s = shortcut(nav, *p);
  std::vector<Vec2> out(s.waypoints.begin() + (s.waypoints.size() > 1 ? 1 : 0), s.waypoints.end());
  if (out.empty()) out.push_back(to);
  return out;
}

}  // namespace

ControlInput face(const RobotState& robot, double heading, const VelocityLimits& limits) {
  ControlInput u;
  u.omega = turn_rate(wrap_angle(heading - robot.heading), limits);
  return u;
}

ControlInput drive_to(const RobotState& robot, const Vec2& goal, double heading, const VelocityLimits& limits) {
  ControlInput u = face(robot, heading, limits);
  const Vec2 d = goal - robot.position;
  const double dist = d.norm();
  if (dist < 1e-3) return u;
  const double speed = std::min(limits.v_max, 0.8 * dist);
  const Vec2 vw = d / dist * speed;
  const double c = std::cos(robot.heading);
  const double s = std::sin(robot.heading);
  double vx = c * vw.x() + s * vw.y();
  double vy = -s * vw.x() + c * vw.y();
  double scale = 1.0;
  if (std::abs(vx) > limits.v_max) scale = std::max(scale, std::abs(vx) / limits.v_max);
  if (limits.v_max_lateral <= 0.0)
    vy = 0.0;
  else if (std::abs(vy) > limits.v_max_lateral)
    scale = std::max(scale, std::abs(vy) / limits.v_max_lateral);
  u.vx = vx / scale;
  u.vy = vy / scale;
  return u;
}

namespace {

// Robots that drifted into the clearance margin first step back out of it;
// paths planned from inside the margin hug the obstacle.
std::optional<ControlInput> escape_margin(const RobotState& robot, const NavGrid& nav, const VelocityLimits& limits) {
  if (nav.passable(nav.map().cell_of(robot.position))) return std::nullopt;
  const auto c = nav.nearest_passable(robot.position, 1.5);
  if (!c) return std::nullopt;
  return drive_to(robot, nav.map().center_of(*c), robot.heading, limits);
}

}  // namespace

ControlInput pure_pursuit(const RobotState& robot, std::vector<Vec2>& path, double lookahead,
                          const VelocityLimits& limits, const NavGrid* nav) {
  while (path.size() > 1 && (path.front() - robot.position).norm() < lookahead &&
         (!nav || nav->segment_passable(robot.position, path[1])))
    path.erase(path.begin());
  if (path.size() == 1 && (path.front() - robot.position).norm() < 0.1) path.clear();
  ControlInput u;
  if (path.empty()) return u;
  const Vec2& goal = path.front();
  const double e = wrap_angle(heading_to(robot.position, goal) - robot.heading);
  u.omega = turn_rate(e, limits);
  const double align = std::max(0.0, (std::cos(e) - std::cos(std::numbers::pi / 4)) / (1.0 - std::cos(std::numbers::pi / 4)));
  double v = limits.v_max;
  if (path.size() == 1) v = std::min(v, 0.8 * (goal - robot.position).norm());
  u.vx = v * align;
  return u;
}

// ---------------------------------------------------------------------------

bool CoveragePlanner::choose_target(const RobotState& robot, const MapKnowledge& maps, const CoverageConfig& config) {
  const auto& nav = maps.nav(robot.floor);
  const auto& known = maps.known(robot.floor);
  const auto field = flood(nav, robot.position);
  std::vector<std::size_t> candidates;
  for (std::size_t i : field.order) {
    const Cell c = known.cell_at(i);
    if (known.at(c) != CellState::free || maps.covered(robot.floor, c) || !nav.passable(c)) continue;
    candidates.push_back(i);
    if (static_cast<int>(candidates.size()) >= config.candidate_cells) break;
  }
  if (candidates.empty()) return false;
  double best = std::numeric_limits<double>::infinity();
  std::size_t choice = candidates.front();
  const int r = 4;
  for (std::size_t i : candidates) {
    const Cell c = known.cell_at(i);
    int info = 0;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const Cell n{c.x + dx, c.y + dy};
        if (known.in_bounds(n) && known.at(n) == CellState::free && !maps.covered(robot.floor, n)) ++info;
      }
    const double score = field.distance[i] / (1.0 + info);
    if (score < best) {
      best = score;
      choice = i;
    }
  }
  target_ = known.cell_at(choice);
  const auto path = shortcut(nav, path_from_field(nav, field, *target_));
  path_.assign(path.waypoints.begin() + (path.waypoints.size() > 1 ? 1 : 0), path.waypoints.end());
  if (path_.empty()) path_.push_back(known.center_of(*target_));
  return true;
}

CoverageStep CoveragePlanner::step(const RobotState& robot, const MapKnowledge& maps, const CoverageConfig& config,
                                   const VelocityLimits& limits, double time) {
  CoverageStep out;
  if (floor_ != robot.floor) {
    target_.reset();
    floor_ = robot.floor;
  }
  if (target_ && maps.covered(robot.floor, *target_)) target_.reset();
  if (!target_ || path_.empty() || time - planned_at_ >= 5.0) {
    target_.reset();
    planned_at_ = time;
    if (!choose_target(robot, maps, config)) {
      out.complete = true;
      return out;
    }
  }
  if (auto esc = escape_margin(robot, maps.nav(robot.floor), limits)) {
    out.u = *esc;
    return out;
  }
  out.u = pure_pursuit(robot, path_, config.lookahead, limits, &maps.nav(robot.floor));
  return out;
}

// ---------------------------------------------------------------------------

void SearchBehavior::reset() {
  planned_at_ = -1e300;
  approach_.reset();
  approach_path_.clear();
  approach_planned_at_ = -1e300;
}

SearchStep SearchBehavior::step(const ObjectBelief& target, SemanticClassId label, const RobotState& robot,
                                const WorldScenario& scenario, const MapKnowledge& maps, double time,
                                std::mt19937_64& seed_source) {
  SearchStep out;
  const auto& cfg = scenario.planner;
  const auto& th = scenario.thresholds;
  const auto& limits = scenario.robot.limits;
  if (target.probability(label) > th.confident_probability && target.position_std() < th.confident_std) {
    // Only the distance gate is left, and entropy cannot see it.
    if (time - approach_planned_at_ >= 2.0) {
      const double radius = std::max(0.5, th.confident_distance - 1.0);
      approach_ = reachable_standoff(target, radius, robot, maps);
      approach_path_ = approach_ ? plan_path(maps.nav(robot.floor), robot.position, approach_->position)
                                 : std::vector<Vec2>{};
      approach_planned_at_ = time;
    }
    const double face_heading = heading_to(robot.position, target.mean);
    if (!approach_) {
      out.u = face(robot, face_heading, limits);
      return out;
    }
    const double dist = (approach_->position - robot.position).norm();
    if (dist > 0.6 && !approach_path_.empty()) {
      if (auto esc = escape_margin(robot, maps.nav(robot.floor), limits)) {
        out.u = *esc;
        return out;
      }
      out.u = pure_pursuit(robot, approach_path_, scenario.coverage.lookahead, limits, &maps.nav(robot.floor));
      return out;
    }
    out.u = drive_to(robot, approach_->position, face_heading, limits);
    return out;
  }
  approach_planned_at_ = -1e300;
  const bool moved_there = (waypoint_.position - robot.position).norm() < 0.2 &&
                           std::abs(wrap_angle(waypoint_.heading - robot.heading)) < 0.1;
  const bool was_stay = planned_at_ > -1e299 && (waypoint_.position - robot.position).norm() < 1e-9;
  if (time - planned_at_ >= cfg.step_duration() - 1e-9 || (moved_there && !was_stay && time - planned_at_ >= 0.5)) {
    SearchWorld world{&scenario.sensor, &maps.nav(robot.floor), &maps.known(robot.floor), cfg};
    out.plan = plan_active_search(target, robot, world, seed_source(), SearchMethod::branch_and_bound);
    out.replanned = true;
    waypoint_ = out.plan.candidates[static_cast<std::size_t>(out.plan.best)];
    recovery_ = out.plan.recovery;
    planned_at_ = time;
  }
  if (recovery_) {
    out.u.omega = 0.5 * scenario.robot.limits.omega_max;
    return out;
  }
  out.u = drive_to(robot, waypoint_.position, heading_to(robot.position, target.mean), scenario.robot.limits);
  return out;
}

// ---------------------------------------------------------------------------

Pose2 standoff_pose(const ObjectBelief& belief, double standoff) {
  const Vec2 p = belief.mean + standoff * Vec2(std::cos(belief.heading_mean), std::sin(belief.heading_mean));
  return {p, heading_to(p, belief.mean)};
}

std::optional<Pose2> reachable_standoff(const ObjectBelief& target, double standoff, const RobotState& robot,
                                        const MapKnowledge& maps) {
  const auto& nav = maps.nav(robot.floor);
  const auto& known = maps.known(robot.floor);
  const auto field = flood(nav, robot.position);
  const double radii[] = {standoff, standoff + 0.3, standoff - 0.3};
  for (double radius : radii) {
    if (radius < 0.3) continue;
    for (int k = 0; k < 16; ++k) {
      const int step = (k + 1) / 2 * (k % 2 == 1 ? 1 : -1);
      const double a = target.heading_mean + step * (2.0 * std::numbers::pi / 16.0);
      const Vec2 p = target.mean + radius * Vec2(std::cos(a), std::sin(a));
      const Cell c = known.cell_of(p);
      if (!nav.passable(c) || !std::isfinite(field.distance[known.index(c)])) continue;
      if (!known.line_of_sight(p, target.mean)) continue;
      return Pose2{p, heading_to(p, target.mean)};
    }
  }
  return std::nullopt;
}

void InspectBehavior::reset() {
  goal_.reset();
  path_.clear();
  planned_at_ = -1e300;
  triggered_ = false;
}

ControlInput InspectBehavior::step(const ObjectBelief& target, double standoff, const RobotState& robot, const WorldScenario& scenario,
                                   const MapKnowledge& maps, double time) {
  const auto& limits = scenario.robot.limits;
  if (!goal_ || time - planned_at_ >= 2.0) {
    const auto goal = reachable_standoff(target, standoff, robot, maps);
    planned_at_ = time;
    if (goal && (!goal_ || (goal->position - goal_->position).norm() > 0.2 || path_.empty()))
      path_ = plan_path(maps.nav(robot.floor), robot.position, goal->position);
    goal_ = goal;
  }
  ControlInput u;
  if (!goal_) {
    u.action = TriggerInspect{target.id, target.mean};
    return u;
  }
  const double face_heading = heading_to(robot.position, target.mean);
  const double dist = (goal_->position - robot.position).norm();
  if (dist > 0.1) {
    if (dist > 0.6 && !path_.empty()) {
      if (auto esc = escape_margin(robot, maps.nav(robot.floor), limits)) return *esc;
      return pure_pursuit(robot, path_, scenario.coverage.lookahead, limits, &maps.nav(robot.floor));
    }
    return drive_to(robot, goal_->position, face_heading, limits);
  }
  if (std::abs(wrap_angle(face_heading - robot.heading)) > 0.05) return face(robot, face_heading, limits);
  u.action = TriggerInspect{target.id, target.mean};
  triggered_ = true;
  return u;
}

void ClimbBehavior::reset() {
  path_.clear();
  goal_.reset();
  planned_at_ = -1e300;
  climbing_ = false;
}

ControlInput ClimbBehavior::step(const ObjectBelief& target, double standoff, const RobotState& robot, const WorldScenario& scenario,
                                 const MapKnowledge& maps, double time) {
  const auto& limits = scenario.robot.limits;
  ControlInput u;
  if (robot.floor != target.floor) return u;
  if (climbing_) {
    if (robot.gait != Gait::stair) {
      u.action = SetGait{Gait::stair};
      return u;
    }
    const Vec2 dir(std::cos(line_heading_), std::sin(line_heading_));
    const Vec2 lat(-dir.y(), dir.x());
    const double across = (robot.position - line_origin_).dot(lat);
    const double e = wrap_angle(line_heading_ - robot.heading);
    u.omega = turn_rate(e, limits);
    u.vx = limits.stair_speed;
    // Lateral correction expressed in the body frame.
    const Vec2 vw = -1.0 * across * lat;
    const double c = std::cos(robot.heading);
    const double s = std::sin(robot.heading);
    u.vy = std::clamp(-s * vw.x() + c * vw.y(), -0.1, 0.1);
    return u;
  }

  const Pose2 entry = standoff_pose(target, standoff);
  if (!goal_ || time - planned_at_ >= 2.0) {
    if (!goal_ || (entry.position - goal_->position).norm() > 0.2 || path_.empty())
      path_ = plan_path(maps.nav(robot.floor), robot.position, entry.position);
    goal_ = entry;
    planned_at_ = time;
  }
  const double dist = (entry.position - robot.position).norm();
  if (dist > 0.6 && !path_.empty()) {
    if (auto esc = escape_margin(robot, maps.nav(robot.floor), limits)) return *esc;
    return pure_pursuit(robot, path_, scenario.coverage.lookahead, limits, &maps.nav(robot.floor));
  }
  const double e = wrap_angle(entry.heading - robot.heading);
  if (dist > 0.05) return drive_to(robot, entry.position, entry.heading, limits);
  if (std::abs(e) > 0.03) return face(robot, entry.heading, limits);
  climbing_ = true;
  line_origin_ = target.mean;
  line_heading_ = entry.heading;
  u.action = SetGait{Gait::stair};
  return u;
}

}  // namespace sb2g
