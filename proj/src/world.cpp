#include "sb2g/world.hpp"

#include <cmath>

namespace sb2g {

std::string to_string(WorldEvent::Kind k) {
  switch (k) {
    case WorldEvent::Kind::collision: return "collision";
    case WorldEvent::Kind::inspection_succeeded: return "inspection_succeeded";
    case WorldEvent::Kind::inspection_failed: return "inspection_failed";
    case WorldEvent::Kind::stair_failure: return "stair_failure";
    case WorldEvent::Kind::ascended: return "ascended";
    case WorldEvent::Kind::gait_changed: return "gait_changed";
  }
  return "unknown";
}

World::World(const WorldScenario& scenario)
    : scenario_(&scenario), robot_(scenario.robot.start), objects_(scenario.objects) {
  robot_.heading = wrap_angle(robot_.heading);
}

bool World::cell_blocks(const Vec2& p) const {
  const auto s = scenario_->floor(robot_.floor).state_at(p);
  return s == CellState::occupied || s == CellState::unknown;
}

void World::adjudicate(const DiscreteAction& action, std::vector<WorldEvent>& events) {
  if (const auto* g = std::get_if<SetGait>(&action)) {
    if (g->gait != robot_.gait) {
      robot_.gait = g->gait;
      events.push_back({WorldEvent::Kind::gait_changed, -1, to_string(g->gait)});
    }
    return;
  }
  const auto* t = std::get_if<TriggerInspect>(&action);
  if (!t) return;
  ObjectTruth* obj = nullptr;
  for (auto& o : objects_)
    if (o.id == t->object_id) obj = &o;
  auto fail = [&](const std::string& why) {
    events.push_back({WorldEvent::Kind::inspection_failed, t->object_id, why});
  };
  if (!obj) return fail("no such object");
  if (obj->floor != robot_.floor) return fail("different floor");
  if (obj->status != AffordanceStatus::to_be_inspected) return fail("nothing to inspect");
  if ((obj->position - t->believed_position).norm() > 0.5) return fail("belief too far from object");
  const auto& info = scenario_->sensor.labels.at(obj->label);
  if ((obj->position - robot_.position).norm() > info.standoff + 0.5) return fail("robot out of reach");
  obj->status = advance_status(obj->status, AffordanceStatus::inspected);
  rewards_ += info.reward;
  ++tasks_completed_;
  events.push_back({WorldEvent::Kind::inspection_succeeded, obj->id, ""});
}

void World::move(const Vec2& target, double heading, std::vector<WorldEvent>& events) {
  const auto& sc = *scenario_;
  const Vec2 from = robot_.position;
  const Vec2 seg = target - from;
  const double len = seg.norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / (0.25 * sc.floor(robot_.floor).cell_size()))));
  Vec2 q = from;
  robot_.heading = heading;
  for (int i = 1; i <= n; ++i) {
    const Vec2 p = from + seg * (static_cast<double>(i) / n);
    if (active_stair_ >= 0) {
      const auto& zone = sc.stairs[static_cast<std::size_t>(active_stair_)];
      const auto* obj = sc.object(zone.object);
      const auto frame = stair_frame(*obj, zone);
      if (frame.along(p) > frame.length) {
        path_length_ += (p - from).norm();
        robot_.floor += 1;
        robot_.position = zone.exit.position;
        robot_.heading = wrap_angle(zone.exit.heading);
        for (auto& o : objects_)
          if (o.id == zone.object && o.status == AffordanceStatus::to_be_ascended) {
            o.status = advance_status(o.status, AffordanceStatus::ascended);
            rewards_ += sc.sensor.labels.at(o.label).reward;
            ++tasks_completed_;
          }
        events.push_back({WorldEvent::Kind::ascended, zone.object, ""});
        active_stair_ = -1;
        return;
      }
      if (!frame.contains(p)) active_stair_ = -1;
    } else {
      for (std::size_t z = 0; z < sc.stairs.size(); ++z) {
        const auto& zone = sc.stairs[z];
        const auto* obj = sc.object(zone.object);
        if (obj->floor != robot_.floor) continue;
        const auto frame = stair_frame(*obj, zone);
        if (!frame.contains(p) || frame.contains(q)) continue;
        const double ascent = std::atan2(frame.ascent.y(), frame.ascent.x());
        std::string why;
        if (robot_.gait != Gait::stair)
          why = "walk gait";
        else if (std::abs(frame.across(p)) > 0.3)
          why = "lateral offset";
        else if (std::abs(wrap_angle(robot_.heading - ascent)) > 0.2)
          why = "heading misaligned";
        if (why.empty()) {
          active_stair_ = static_cast<int>(z);
          stair_contact_ = -1;
          break;
        }
        path_length_ += (q - robot_.position).norm();
        robot_.position = q;
        if (stair_contact_ != static_cast<int>(z)) {
          ++stair_failures_;
          stair_contact_ = static_cast<int>(z);
          events.push_back({WorldEvent::Kind::stair_failure, zone.object, why});
        }
        return;
      }
    }
    if (cell_blocks(p)) {
      events.push_back({WorldEvent::Kind::collision, -1, ""});
      break;
    }
    q = p;
  }
  path_length_ += (q - from).norm();
  robot_.position = q;

  if (stair_contact_ >= 0) {
    const auto& zone = sc.stairs[static_cast<std::size_t>(stair_contact_)];
    const auto frame = stair_frame(*sc.object(zone.object), zone);
    const double a = frame.along(robot_.position);
    if (a < -0.5 || a > frame.length + 0.5 || std::abs(frame.across(robot_.position)) > 0.5 * frame.width + 0.5)
      stair_contact_ = -1;
  }
}

std::vector<WorldEvent> World::step(const ControlInput& u, double dt, std::mt19937_64& motion_rng) {
  std::vector<WorldEvent> events;
  ++tick_;
  adjudicate(u.action, events);
  const auto& rc = scenario_->robot;
  const ControlInput uc = clamp_to_limits(u, rc.limits, robot_.gait);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double nx = gauss(motion_rng) * rc.motion_noise_std;
  const double ny = gauss(motion_rng) * rc.motion_noise_std;
  const double nq = gauss(motion_rng) * rc.heading_noise_std;
  const Vec3 next = propagate_pose(Vec3(robot_.position.x(), robot_.position.y(), robot_.heading), uc, dt);
  move(next.head<2>() + Vec2(nx, ny), wrap_angle(next(2) + nq), events);
  time_ = static_cast<double>(tick_) * dt;
  return events;
}

}  // namespace sb2g
