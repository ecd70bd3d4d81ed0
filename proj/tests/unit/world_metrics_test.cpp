#include "sb2g/metrics.hpp"
#include "sb2g/rng.hpp"
#include "sb2g/world.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

using namespace sb2g;

namespace {

WorldScenario quiet_room() {
  auto sc = fixtures::room_scenario(40, 40, Vec2(2, 2), 0.0,
                                    Json::array({fixtures::object_json(1, "door", Vec2(5, 5), 0.0)}));
  sc.robot.motion_noise_std = 0.0;
  return sc;
}

}  // namespace

TEST(WorldStep, ZeroVelocityWithoutNoiseStaysPut) {
  const auto sc = quiet_room();
  World world(sc);
  std::mt19937_64 rng(1);
  const auto before = world.robot();
  for (int k = 0; k < 10; ++k) EXPECT_TRUE(world.step(ControlInput{}, sc.dt(), rng).empty());
  EXPECT_EQ(world.robot().position, before.position);
  EXPECT_EQ(world.robot().heading, before.heading);
  EXPECT_EQ(world.path_length(), 0.0);
  EXPECT_EQ(world.tick(), 10);
  EXPECT_NEAR(world.time(), 1.0, 1e-12);
}

TEST(WorldStep, InspectionWithDistantBeliefFails) {
  const auto sc = quiet_room();
  World world(sc);
  RobotState r;
  r.position = Vec2(5, 6.5);
  world.set_robot(r);
  std::mt19937_64 rng(1);
  ControlInput u;
  u.action = TriggerInspect{1, Vec2(5.8, 5.0)};
  const auto events = world.step(u, sc.dt(), rng);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, WorldEvent::Kind::inspection_failed);
  EXPECT_EQ(events[0].detail, "belief too far from object");

  u.action = TriggerInspect{1, Vec2(5.1, 5.0)};
  const auto ok = world.step(u, sc.dt(), rng);
  ASSERT_EQ(ok.size(), 1u);
  EXPECT_EQ(ok[0].kind, WorldEvent::Kind::inspection_succeeded);
  EXPECT_EQ(world.rewards(), 100.0);
  // A second inspection of the same object earns nothing.
  const auto again = world.step(u, sc.dt(), rng);
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].kind, WorldEvent::Kind::inspection_failed);
  EXPECT_EQ(world.rewards(), 100.0);
}

TEST(WorldStep, WallClipsMotionAndReportsCollision) {
  const auto sc = quiet_room();
  World world(sc);
  RobotState r;
  r.position = Vec2(9.5, 5.0);  // 0.25 m from the east wall
  world.set_robot(r);
  std::mt19937_64 rng(1);
  ControlInput u;
  u.vx = 1.0;
  const auto events = world.step(u, 1.0, rng);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, WorldEvent::Kind::collision);
  EXPECT_TRUE(sc.floor(0).is_free(world.robot().position));
  EXPECT_GT(world.robot().position.x(), 9.5);
  EXPECT_LT(world.robot().position.x(), 9.75);
  EXPECT_NEAR(world.path_length(), world.robot().position.x() - 9.5, 1e-12);
}

TEST(WorldStep, CommandsAreClampedBeforeMotion) {
  const auto sc = quiet_room();
  World world(sc);
  std::mt19937_64 rng(1);
  ControlInput u;
  u.vx = 5.0;
  world.step(u, 1.0, rng);
  EXPECT_NEAR(world.robot().position.x(), 3.0, 1e-12);
}

TEST(ClosestDistance, StartsAtCapPerObject) {
  ClosestDistance c(3);
  EXPECT_EQ(c.sum(), 15.0);
}

TEST(ClosestDistance, TouchingIsZero) {
  ObjectTruth o;
  o.position = Vec2(1, 1);
  RobotState r;
  r.position = Vec2(1, 1);
  ClosestDistance c(1);
  EXPECT_EQ(c.update(r, std::span(&o, 1)), 0.0);
}

TEST(ClosestDistance, KeepsRunningMinimumPerObject) {
  std::vector<ObjectTruth> objs(2);
  objs[0].position = Vec2(0, 0);
  objs[1].position = Vec2(20, 0);
  ClosestDistance c(2);
  RobotState r;
  r.position = Vec2(1, 0);
  c.update(r, objs);
  r.position = Vec2(17, 0);
  c.update(r, objs);
  r.position = Vec2(10, 0);
  EXPECT_DOUBLE_EQ(c.update(r, objs), 4.0);
}

TEST(ClosestDistance, OtherFloorCountsAsCap) {
  ObjectTruth o;
  o.floor = 1;
  RobotState r;
  ClosestDistance c(1);
  EXPECT_EQ(c.update(r, std::span(&o, 1)), kClosestDistanceCap);
}

TEST(Reward, EmptyRunIsNotPositive) {
  RewardSpec spec;
  EXPECT_LE(reward_cost(RunTotals{}, spec), 0.0);
  RunTotals idle;
  idle.elapsed = 700.0;
  EXPECT_LT(reward_cost(idle, spec), 0.0);
}

TEST(Reward, RewardMinusTravelAndTime) {
  RewardSpec spec;
  RunTotals t;
  t.rewards = 100.0;
  t.path_length = 20.0;
  t.elapsed = 60.0;
  EXPECT_DOUBLE_EQ(reward_cost(t, spec), 77.0);
  EXPECT_DOUBLE_EQ(reward_cost(t, spec), reward_cost(t, spec));
  t.stair_failures = 1;
  EXPECT_DOUBLE_EQ(reward_cost(t, spec), 27.0);
}

TEST(Resample, CarriesLastValueForward) {
  std::vector<MetricsSample> s(3);
  s[0].t = 0.0;
  s[1].t = 4.0;
  s[1].inspected = 1;
  s[2].t = 12.0;
  s[2].inspected = 2;
  const auto r = resample(s, 5.0, 30.0);
  ASSERT_EQ(r.size(), 7u);
  EXPECT_EQ(r[0].inspected, 0);
  EXPECT_EQ(r[1].inspected, 1);
  EXPECT_EQ(r[2].inspected, 1);
  EXPECT_EQ(r[3].inspected, 2);
  EXPECT_EQ(r[6].inspected, 2);
  EXPECT_DOUBLE_EQ(r[6].t, 30.0);
}

TEST(Rng, StreamsAreIsolated) {
  RngStreams a(5), b(5);
  for (int i = 0; i < 1000; ++i) a.motion();
  EXPECT_EQ(a.detection(), b.detection());
  EXPECT_EQ(a.measurement(), b.measurement());
  EXPECT_EQ(a.planner(), b.planner());
  EXPECT_NE(stream_seed(5, Stream::motion), stream_seed(5, Stream::detection));
  EXPECT_NE(stream_seed(5, Stream::motion), stream_seed(6, Stream::motion));
}
