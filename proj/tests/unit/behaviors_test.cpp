#include "sb2g/behaviors.hpp"

#include "sb2g/world.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

using namespace sb2g;
using fixtures::labels_of;

namespace {

WorldScenario quiet_room(Json objects = Json::array()) {
  auto sc = fixtures::room_scenario(40, 40, Vec2(2, 2), 0.0, std::move(objects));
  sc.robot.motion_noise_std = 0.0;
  return sc;
}

MapKnowledge mapped(const WorldScenario& sc, const Vec2& from, int floor = 0) {
  MapKnowledge maps(sc);
  maps.scan(sc.floor(floor), floor, from, 30.0);
  return maps;
}

ObjectBelief settled(ObjectId id, Vec2 mean, double heading, int label, int floor = 0) {
  ObjectBelief b;
  b.id = id;
  b.floor = floor;
  b.mean = mean;
  b.cov = Mat2::Identity() * 0.01;
  b.heading_mean = heading;
  b.heading_var = 0.01;
  b.labels = LabelVector::Constant(4, 0.01);
  b.labels(label) = 0.97;
  return b;
}

}  // namespace

TEST(Coverage, CompleteWhenEverythingIsCovered) {
  const auto sc = quiet_room();
  auto maps = mapped(sc, Vec2(5, 5));
  RobotState r;
  r.position = Vec2(5, 5);
  maps.mark_covered(r, std::numbers::pi, 20.0);
  CoveragePlanner planner;
  const auto step = planner.step(r, maps, sc.coverage, sc.robot.limits, 0.0);
  EXPECT_TRUE(step.complete);
  EXPECT_TRUE(step.u.is_zero());
}

TEST(Coverage, UncoveredCellsAheadDriveForward) {
  auto sc = fixtures::room_scenario(40, 8, Vec2(0.6, 1.0), 0.0, Json::array());
  auto maps = mapped(sc, Vec2(0.6, 1.0));
  RobotState r;
  r.position = Vec2(0.6, 1.0);
  maps.mark_covered(r, std::numbers::pi, 1.5);
  CoveragePlanner planner;
  const auto step = planner.step(r, maps, sc.coverage, sc.robot.limits, 0.0);
  EXPECT_FALSE(step.complete);
  EXPECT_GT(step.u.vx, 0.0);
  EXPECT_TRUE(within_limits(step.u, sc.robot.limits));
}

TEST(Inspect, TriggersImmediatelyAtStandoff) {
  const auto sc = quiet_room();
  const auto maps = mapped(sc, Vec2(6, 5));
  const auto target = settled(1, Vec2(5, 5), 0.0, 0);
  RobotState r;
  r.position = Vec2(6, 5);
  r.heading = std::numbers::pi;
  InspectBehavior inspect;
  const auto u = inspect.step(target, 1.0, r, sc, maps, 0.0);
  const auto* t = std::get_if<TriggerInspect>(&u.action);
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->object_id, 1);
  EXPECT_EQ(t->believed_position, target.mean);
}

TEST(Inspect, ClosesInBeforeTriggering) {
  auto sc = quiet_room(Json::array({fixtures::object_json(1, "fire_extinguisher", Vec2(7, 7), 0.0)}));
  World world(sc);
  auto maps = mapped(sc, sc.robot.start.position);
  const auto target = settled(1, Vec2(7, 7), 0.0, 0);
  const Pose2 goal = standoff_pose(target, 1.0);
  InspectBehavior inspect;
  std::mt19937_64 rng(1);
  bool triggered = false;
  for (int k = 0; k < 600 && !triggered; ++k) {
    const auto u = inspect.step(target, 1.0, world.robot(), sc, maps, world.time());
    EXPECT_TRUE(within_limits(u, sc.robot.limits));
    if (std::holds_alternative<TriggerInspect>(u.action)) {
      EXPECT_LT((world.robot().position - goal.position).norm(), 0.1);
      const auto events = world.step(u, sc.dt(), rng);
      ASSERT_FALSE(events.empty());
      EXPECT_EQ(events[0].kind, WorldEvent::Kind::inspection_succeeded);
      triggered = true;
    } else {
      world.step(u, sc.dt(), rng);
    }
  }
  EXPECT_TRUE(triggered);
  EXPECT_EQ(world.objects()[0].status, AffordanceStatus::inspected);
}

TEST(Inspect, BadBeliefFailsInWorld) {
  auto sc = quiet_room(Json::array({fixtures::object_json(1, "fire_extinguisher", Vec2(5, 5), 0.0)}));
  World world(sc);
  RobotState r;
  r.position = Vec2(6, 5);
  r.heading = std::numbers::pi;
  world.set_robot(r);
  std::mt19937_64 rng(1);
  ControlInput u;
  u.action = TriggerInspect{1, Vec2(5.8, 5)};
  const auto events = world.step(u, sc.dt(), rng);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, WorldEvent::Kind::inspection_failed);
  EXPECT_EQ(world.objects()[0].status, AffordanceStatus::to_be_inspected);
  EXPECT_EQ(world.rewards(), 0.0);
}

class Stairs : public ::testing::Test {
 protected:
  void SetUp() override {
    sc = fixtures::load("office-two-floor");
    sc.robot.motion_noise_std = 0.0;
    stair = *sc.object(2);
  }
  RobotState at_entry(double lateral, Gait gait) const {
    RobotState r;
    r.position = Vec2(15.4, 6.0 + lateral);
    r.heading = 0.0;
    r.gait = gait;
    return r;
  }
  WorldScenario sc;
  ObjectTruth stair;
};

TEST_F(Stairs, AlignedClimbSwitchesGait) {
  const auto maps = mapped(sc, Vec2(15.4, 6.0));
  const auto target = settled(2, stair.position, stair.orientation, 2);
  ClimbBehavior climb;
  const auto u = climb.step(target, 0.6, at_entry(0.0, Gait::walk), sc, maps, 0.0);
  const auto* g = std::get_if<SetGait>(&u.action);
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->gait, Gait::stair);
}

TEST_F(Stairs, ClosedLoopClimbAscends) {
  World world(sc);
  world.set_robot(at_entry(0.0, Gait::walk));
  auto maps = mapped(sc, Vec2(15.4, 6.0));
  const auto target = settled(2, stair.position, stair.orientation, 2);
  ClimbBehavior climb;
  std::mt19937_64 rng(1);
  bool ascended = false;
  for (int k = 0; k < 400 && !ascended; ++k) {
    const auto u = climb.step(target, 0.6, world.robot(), sc, maps, world.time());
    for (const auto& e : world.step(u, sc.dt(), rng)) {
      EXPECT_NE(e.kind, WorldEvent::Kind::stair_failure);
      if (e.kind == WorldEvent::Kind::ascended) ascended = true;
    }
  }
  ASSERT_TRUE(ascended);
  EXPECT_EQ(world.robot().floor, 1);
  EXPECT_EQ(world.objects()[2].status, AffordanceStatus::ascended);
  EXPECT_EQ(world.tasks_completed(), 1);
}

TEST_F(Stairs, LateralOffsetFails) {
  World world(sc);
  world.set_robot(at_entry(0.45, Gait::stair));
  std::mt19937_64 rng(1);
  ControlInput u;
  u.vx = 0.3;
  int failures = 0;
  for (int k = 0; k < 60; ++k)
    for (const auto& e : world.step(u, sc.dt(), rng))
      if (e.kind == WorldEvent::Kind::stair_failure) {
        ++failures;
        EXPECT_EQ(e.detail, "lateral offset");
      }
  EXPECT_EQ(failures, 1);
  EXPECT_EQ(world.robot().floor, 0);
  EXPECT_EQ(world.stair_failures(), 1);
}

TEST_F(Stairs, WalkGaitFails) {
  World world(sc);
  world.set_robot(at_entry(0.0, Gait::walk));
  std::mt19937_64 rng(1);
  ControlInput u;
  u.vx = 0.5;
  std::string why;
  for (int k = 0; k < 30; ++k)
    for (const auto& e : world.step(u, sc.dt(), rng))
      if (e.kind == WorldEvent::Kind::stair_failure) why = e.detail;
  EXPECT_EQ(why, "walk gait");
  EXPECT_EQ(world.robot().floor, 0);
}

TEST(DriveTo, StaysWithinLimits) {
  VelocityLimits lim;
  RobotState r;
  for (double a = -3.0; a <= 3.0; a += 0.5) {
    const Vec2 goal = 5.0 * Vec2(std::cos(a), std::sin(a));
    EXPECT_TRUE(within_limits(drive_to(r, goal, a, lim), lim));
    EXPECT_TRUE(within_limits(face(r, a, lim), lim));
  }
}
